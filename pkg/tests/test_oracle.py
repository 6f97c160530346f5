import random

import pytest

from faircheck.harness import random_action_set, random_concurrency, random_lts, random_pattern
from faircheck.lts import LTS, ActionSet, ConcurrencyRelation, Lasso, LTSError, Path, Transition
from faircheck.mucalc import Eps
from faircheck.oracle import (
    OracleBudgetExceeded, SearchBounds, cross_validate, enumerate_candidates,
    oracle_admits_violating,
)
from faircheck.predicates import check_criterion, is_violating, satisfies_progress
from faircheck.templates import CRITERIA, CriterionSpec, PatternSpec, ViolationTemplate, instantiate_pattern
from support import brew_loop, pay_loop

DELIVERY = PatternSpec("global", "response", sq="order", sr="deliver")
STRENGTH_BELOW = {"shfa": ["sfa", "whfa", "wfa", "progress"], "sfa": ["wfa", "progress"],
                  "whfa": ["wfa", "progress"], "wfa": ["progress"]}


def delivery(lts):
    return instantiate_pattern(DELIVERY, lts.alphabet)[0]


def tiny_instances(seed, count):
    rng = random.Random(seed)
    for _ in range(count):
        lts = random_lts(rng, 3, 2, 5)
        for t in instantiate_pattern(random_pattern(rng, lts.alphabet), lts.alphabet):
            for kind in CRITERIA:
                conc = random_concurrency(rng, lts) if kind == "ja" else None
                yield lts, t, CriterionSpec(kind, random_action_set(rng, lts.alphabet), conc=conc)


class TestCandidates:
    def test_deadlock(self):
        assert list(enumerate_candidates(LTS(1, 0, ()), SearchBounds(3, 3))) == [Path(0)]

    def test_self_loop(self):
        a = Transition(0, "a", 0)
        lts = LTS(1, 0, (a,))
        assert list(enumerate_candidates(lts, SearchBounds(1, 1))) == [
            Path(0), Path(0, (a,)), Lasso(Path(0), Path(0, (a,)))]

    def test_coffee_loops_present(self, coffee_lts):
        cands = set(enumerate_candidates(coffee_lts, SearchBounds(2, 2)))
        assert brew_loop() in cands and pay_loop() in cands

    def test_no_duplicates(self, coffee_lts):
        cands = list(enumerate_candidates(coffee_lts, SearchBounds(4, 3)))
        assert len(cands) == len(set(cands))

    def test_default_bounds(self, coffee_lts):
        assert SearchBounds.default(coffee_lts) == SearchBounds(45, 45)


class TestOracle:
    def test_progress_finds_a_loop(self, coffee_lts):
        result = oracle_admits_violating(coffee_lts, delivery(coffee_lts), CriterionSpec("progress"))
        assert result.admits and result.complete
        # the brew loop is an equally good witness
        assert is_violating(brew_loop(), delivery(coffee_lts))

    def test_whfa_has_no_violation(self, coffee_lts):
        result = oracle_admits_violating(coffee_lts, delivery(coffee_lts), CriterionSpec("whfa"))
        assert not result.admits and result.complete

    def test_sfa_finds_the_brew_loop(self, coffee_lts):
        result = oracle_admits_violating(coffee_lts, delivery(coffee_lts), CriterionSpec("sfa"))
        assert result.witness == brew_loop()

    def test_deadlock_empty_path(self):
        t = ViolationTemplate(Eps(), ActionSet.of("a"))
        lts = LTS(1, 0, (), frozenset({"a"}))
        result = oracle_admits_violating(lts, t, CriterionSpec("progress"))
        assert result.admits and result.witness == Path(0)

    def test_invalid_relation_rejected(self, coffee_lts):
        crit = CriterionSpec("ja", conc=ConcurrencyRelation(frozenset({("card", "to_cash")})))
        with pytest.raises(LTSError):
            oracle_admits_violating(coffee_lts, delivery(coffee_lts), crit)

    def test_budget(self, coffee_lts):
        with pytest.raises(OracleBudgetExceeded):
            oracle_admits_violating(coffee_lts, delivery(coffee_lts), CriterionSpec("whfa"),
                                    strategy="exhaustive", budget=100)

    def test_strategies_agree_on_tiny_instances(self):
        checked = 0
        for lts, t, crit in tiny_instances(7, 25):
            quick = oracle_admits_violating(lts, t, crit)
            try:
                slow = oracle_admits_violating(lts, t, crit, strategy="exhaustive", budget=20_000)
            except OracleBudgetExceeded:
                continue
            assert quick.admits == slow.admits, (lts, t, crit)
            checked += 1
        assert checked > 50

    def test_witnesses_recheck_and_certify_weaker_criteria(self):
        for lts, t, crit in tiny_instances(11, 40):
            result = oracle_admits_violating(lts, t, crit)
            if not result.admits:
                continue
            w = result.witness
            assert is_violating(w, t) and satisfies_progress(lts, w, crit.blocking)
            assert check_criterion(lts, w, crit)
            for weaker in STRENGTH_BELOW.get(crit.kind, []):
                assert check_criterion(lts, w, CriterionSpec(weaker, crit.blocking))

    def test_larger_bounds_never_lose_witnesses(self):
        for lts, t, crit in tiny_instances(3, 25):
            small = oracle_admits_violating(lts, t, crit, SearchBounds(2, 2))
            if small.admits:
                assert oracle_admits_violating(lts, t, crit, SearchBounds(4, 4)).admits
                assert oracle_admits_violating(lts, t, crit).admits


class TestCrossValidate:
    def test_progress(self, coffee_lts):
        report = cross_validate(coffee_lts, delivery(coffee_lts), CriterionSpec("progress"))
        assert report.agree and not report.formula_verdict and report.oracle_verdict
        assert report.counterexample is not None

    def test_sfa(self, coffee_lts):
        report = cross_validate(coffee_lts, delivery(coffee_lts), CriterionSpec("sfa"))
        assert report.agree and not report.formula_verdict
        assert report.counterexample == brew_loop()

    @pytest.mark.parametrize("kind", ["whfa", "shfa"])
    def test_hyperfair_satisfied(self, coffee_lts, kind):
        report = cross_validate(coffee_lts, delivery(coffee_lts), CriterionSpec(kind))
        assert report.agree and report.formula_verdict and report.complete
        assert report.counterexample is None

    def test_chain_response_uses_every_template(self):
        lts = LTS(2, 0, [(0, "q", 1), (1, "r", 1), (1, "x", 1)])
        spec = PatternSpec("global", "chain-response", chain_q=("q",), chain_r=("r", "x"))
        ts = instantiate_pattern(spec, lts.alphabet)
        report = cross_validate(lts, ts, CriterionSpec("wfa"))
        assert report.agree
