import pytest
from hypothesis import given, strategies as st

from faircheck.lts import ActionSet
from faircheck.mucalc import (
    FF, TT, Acts, Alt, And, Box, Diamond, EvaluationError, Eps, Mu, Not, Nu, Or, Seq, Star, Var,
    alpha_rename, check_syntactic_monotonicity, evaluate, expand_regular_modalities,
    format_formula, free_vars, is_closed, is_monotonic, least_fixpoint_approximant, parse_formula,
    satisfies, simplify, substitute, walk,
)
from faircheck.mucalc.syntax import has_regular_modalities
from support import action_sets, approximant_oracle, formulas, ltss

ALL = Acts(ActionSet.everything())


def a(label):
    return Acts(ActionSet.of(label))


class TestMonotonicity:
    def test_single_negation(self):
        found = check_syntactic_monotonicity(Mu("X", Not(Var("X"))))
        assert [v.variable for v in found] == ["X"]

    def test_no_negation(self):
        assert check_syntactic_monotonicity(Mu("X", Diamond(a("a"), Var("X")))) == []

    def test_double_negation(self):
        assert is_monotonic(Mu("X", Not(Diamond(a("a"), Not(Var("X"))))))

    def test_implication_left_is_negative(self):
        assert not is_monotonic(parse_formula("nu X. X => tt"))
        assert is_monotonic(parse_formula("nu X. tt => X"))

    def test_evaluate_rejects_non_monotonic(self, coffee_lts):
        with pytest.raises(EvaluationError):
            evaluate(coffee_lts, Mu("X", Not(Var("X"))))


class TestEvaluate:
    def test_ff(self, coffee_lts):
        assert evaluate(coffee_lts, FF()) == frozenset()

    def test_order_enabled(self, coffee_lts):
        assert evaluate(coffee_lts, Diamond(a("order"), TT())) == {0}

    def test_eventually_deliver(self, coffee_lts):
        f = Mu("X", Or(Diamond(a("deliver"), TT()), Diamond(ALL, Var("X"))))
        assert evaluate(coffee_lts, f) == {0, 1, 2, 3, 4}

    def test_satisfies_fixture_formulae(self, coffee_lts):
        single = parse_formula("[!{}* . order . !{deliver}* . order]ff")
        possible = parse_formula("[!{}*]<!{}* . deliver>tt")
        assert satisfies(coffee_lts, single)
        assert satisfies(coffee_lts, possible)

    def test_unbound_variable(self, coffee_lts):
        with pytest.raises(EvaluationError):
            evaluate(coffee_lts, Var("X"))
        assert evaluate(coffee_lts, Var("X"), {"X": {2}}) == {2}

    def test_unknown_label(self, coffee_lts):
        with pytest.raises(EvaluationError):
            evaluate(coffee_lts, Diamond(a("tea"), TT()))

    def test_nested_alternation(self, coffee_lts):
        # infinitely often brew: only reachable through the brew self-loop at 3
        f = parse_formula("nu X. mu Y. <brew>X || <!{brew}>Y")
        assert evaluate(coffee_lts, f) == {0, 1, 2, 3, 4}
        g = parse_formula("nu X. mu Y. <deliver>X || <!{deliver}>Y")
        assert evaluate(coffee_lts, g) == {0, 1, 2, 3, 4}

    @given(st.data())
    def test_duality(self, data):
        lts = data.draw(ltss())
        f = data.draw(formulas(lts.alphabet))
        states = frozenset(lts.states)
        assert evaluate(lts, Not(f)) == states - evaluate(lts, f)

    @given(st.data())
    def test_nu_is_dual_of_mu(self, data):
        lts = data.draw(ltss())
        body = data.draw(formulas(lts.alphabet, bound=("X0",)))
        nu = Nu("X0", body)
        mu = Mu("X0", Not(substitute(body, "X0", Not(Var("X0")))))
        assert evaluate(lts, nu) == frozenset(lts.states) - evaluate(lts, mu)

    @given(st.data())
    def test_environment_irrelevant_for_closed(self, data):
        lts = data.draw(ltss())
        f = data.draw(formulas(lts.alphabet))
        assert is_closed(f)
        env = {"X0": data.draw(st.frozensets(st.sampled_from(list(lts.states))))}
        assert evaluate(lts, f, env) == evaluate(lts, f)

    @given(st.data())
    def test_expansion_preserves_semantics(self, data):
        lts = data.draw(ltss())
        f = data.draw(formulas(lts.alphabet))
        g = expand_regular_modalities(f, lts.alphabet)
        assert not has_regular_modalities(g)
        assert is_monotonic(g)
        assert evaluate(lts, g) == evaluate(lts, f)

    @given(st.data())
    def test_simplify_preserves_semantics(self, data):
        lts = data.draw(ltss())
        f = data.draw(formulas(lts.alphabet))
        assert evaluate(lts, simplify(f, lts.alphabet)) == evaluate(lts, f)

    @given(st.data())
    def test_alpha_rename(self, data):
        lts = data.draw(ltss())
        f = And(data.draw(formulas(lts.alphabet)), data.draw(formulas(lts.alphabet)))
        g = alpha_rename(f)
        binders = [h.var for h in walk(g) if isinstance(h, (Mu, Nu))]
        assert len(binders) == len(set(binders))
        assert evaluate(lts, g) == evaluate(lts, f)


class TestExpansion:
    def test_eps(self):
        assert expand_regular_modalities(Diamond(Eps(), TT()), set()) == TT()

    def test_alt(self):
        f = expand_regular_modalities(Diamond(Alt(a("x"), a("y")), TT()), {"x", "y"})
        assert f == Or(Diamond(a("x"), TT()), Diamond(a("y"), TT()))

    def test_star_becomes_least_fixpoint(self):
        f = expand_regular_modalities(Diamond(Star(a("x")), TT()), {"x"})
        assert isinstance(f, Mu)
        assert f.sub == Or(Diamond(a("x"), Var(f.var)), TT())

    def test_fresh_variable_avoids_capture(self):
        f = Mu("Z", Diamond(Star(a("x")), Var("Z")))
        g = expand_regular_modalities(f, {"x"})
        inner = g.sub
        assert isinstance(inner, Mu) and inner.var != "Z"
        assert free_vars(g) == frozenset()

    def test_seq(self):
        f = expand_regular_modalities(Box(Seq(a("x"), a("y")), FF()), {"x", "y"})
        assert f == Box(a("x"), Box(a("y"), FF()))


class TestApproximants:
    BINDER = Mu("Y", Or(Diamond(a("deliver"), TT()), Diamond(ALL, Var("Y"))))

    def test_zero(self, coffee_lts):
        assert least_fixpoint_approximant(coffee_lts, self.BINDER, 0) == frozenset()

    def test_one(self, coffee_lts):
        assert least_fixpoint_approximant(coffee_lts, self.BINDER, 1) == {4}

    def test_last(self, coffee_lts):
        assert least_fixpoint_approximant(coffee_lts, self.BINDER, 5) == {0, 1, 2, 3, 4}

    def test_range(self, coffee_lts):
        with pytest.raises(ValueError):
            least_fixpoint_approximant(coffee_lts, self.BINDER, 6)
        with pytest.raises(ValueError):
            least_fixpoint_approximant(coffee_lts, Nu("Y", TT()), 1)

    @given(st.data())
    def test_increasing_and_converging(self, data):
        lts = data.draw(ltss(max_states=6))
        body = data.draw(formulas(lts.alphabet, bound=("X0",)))
        binder = Mu("X0", body)
        chain = [least_fixpoint_approximant(lts, binder, i) for i in range(lts.num_states + 1)]
        assert all(x <= y for x, y in zip(chain, chain[1:]))
        assert chain[-1] == evaluate(lts, binder)

    @given(st.data())
    def test_until_shape_matches_path_search(self, data):
        lts = data.draw(ltss(max_states=6))
        phi1 = data.draw(formulas(lts.alphabet, depth=2))
        phi2 = data.draw(formulas(lts.alphabet, depth=2))
        alpha = data.draw(action_sets(lts.alphabet))
        f = Mu("Y", And(phi1, Or(phi2, Diamond(Acts(alpha), Var("Y")))))
        expected = approximant_oracle(lts, evaluate(lts, phi1), evaluate(lts, phi2), alpha)
        assert evaluate(lts, f) == expected


def test_printed_formulae_are_readable():
    f = Nu("X", Or(Diamond(a("a"), Var("X")), Box(ALL, FF())))
    assert format_formula(f) == "nu X. <a>X || [!{}]ff"
