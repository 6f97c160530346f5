"""Shared fixtures for the test suite: the coffee machine, its paths, and strategies."""
from importlib.resources import files

from hypothesis import strategies as st

from faircheck.lts import LTS, ActionSet, ConcurrencyRelation, Lasso, Path, Transition, load_aut

FIXTURES = files("faircheck") / "fixtures"

T1 = Transition(0, "order", 1)
T2 = Transition(1, "to_cash", 2)
T3 = Transition(2, "to_card", 1)
T4 = Transition(1, "card", 3)
T5 = Transition(2, "cash", 3)
T6 = Transition(3, "brew", 3)
T7 = Transition(3, "brew", 4)
T8 = Transition(4, "deliver", 0)

PAY_T4 = Transition(1, "pay", 3)
PAY_T5 = Transition(2, "pay", 3)

EMPTY = ActionSet()


def fixture(name):
    return str(FIXTURES / name)


def coffee():
    return load_aut(fixture("coffee.aut"))


def coffee_pay():
    return load_aut(fixture("coffee_pay.aut"))


def pay_loop():
    """0 -order-> 1 then to_cash/to_card forever."""
    return Lasso(Path(0, (T1,)), Path(1, (T2, T3)))


def brew_loop():
    """0 -order-> 1 -card-> 3 then brew forever."""
    return Lasso(Path(0, (T1, T4)), Path(3, (T6,)))


def full_cycle():
    return Lasso(Path(0), Path(0, (T1, T4, T7, T8)))


def example3_relation(alphabet):
    """card/to_cash and cash/to_card interfere in both directions; the rest is concurrent."""
    return ConcurrencyRelation.from_interference(alphabet, [
        ("card", "to_cash"), ("to_cash", "card"), ("cash", "to_card"), ("to_card", "cash"),
    ])


def merged_pay_relation(alphabet):
    """pay is concurrent with to_cash and to_card; the switches interfere with each other."""
    return ConcurrencyRelation.from_interference(alphabet, [
        ("to_cash", "pay"), ("to_card", "pay"), ("to_cash", "to_card"), ("to_card", "to_cash"),
    ])


@st.composite
def ltss(draw, max_states=5, max_actions=4, max_transitions=10, connected=True):
    n = draw(st.integers(1, max_states))
    labels = "abcdefgh"[:draw(st.integers(1, max_actions))]
    trans = set()
    if connected:
        for s in range(1, n):
            trans.add(Transition(draw(st.integers(0, s - 1)), draw(st.sampled_from(labels)), s))
    extra = draw(st.lists(
        st.tuples(st.integers(0, n - 1), st.sampled_from(labels), st.integers(0, n - 1)),
        max_size=max(0, max_transitions - len(trans))))
    trans.update(Transition(*t) for t in extra)
    return LTS(n, 0, tuple(sorted(trans)), frozenset(labels))


def action_sets(alphabet):
    return st.frozensets(st.sampled_from(sorted(alphabet))).map(ActionSet)


@st.composite
def walks(draw, lts, start=None, max_len=6):
    """A finite path of the LTS from ``start`` (default: the initial state)."""
    here = lts.initial if start is None else start
    steps = []
    for _ in range(draw(st.integers(0, max_len))):
        out = lts.outgoing[here]
        if not out:
            break
        t = draw(st.sampled_from(out))
        steps.append(t)
        here = t.target
    return Path(lts.initial if start is None else start, tuple(steps))


@st.composite
def lassos(draw, lts, max_stem=5, max_cycle=5):
    """A lasso of the LTS, or None when the drawn stem end lies on no cycle."""
    stem = draw(walks(lts, max_len=max_stem))
    s = stem.final
    # search for a cycle back to s, guided by draws
    here, steps = s, []
    for _ in range(max_cycle):
        out = lts.outgoing[here]
        if not out:
            return None
        t = draw(st.sampled_from(out))
        steps.append(t)
        here = t.target
        if here == s and draw(st.booleans()):
            return Lasso(stem, Path(s, tuple(steps)))
    if here == s:
        return Lasso(stem, Path(s, tuple(steps)))
    return None


# -- formulae ----------------------------------------------------------------

from faircheck.mucalc import (  # noqa: E402
    FF, TT, Acts, Alt, And, Box, Diamond, Eps, Implies, Mu, Not, Nu, Or, Seq, Star, Var,
)


def regulars(alphabet, depth=2):
    sets = action_sets(alphabet).map(Acts)
    comp = action_sets(alphabet).map(lambda s: Acts(s.complement()))
    leaf = st.one_of(st.just(Eps()), sets, comp)
    if depth == 0:
        return leaf
    sub = regulars(alphabet, depth - 1)
    return st.one_of(
        leaf,
        st.builds(Seq, sub, sub),
        st.builds(Alt, sub, sub),
        st.builds(Star, sub),
    )


@st.composite
def formulas(draw, alphabet, depth=3, bound=(), closed=True):
    """Monotonic formulae; bound variables only occur positively.

    Negation and the left side of implication only wrap closed subformulae,
    which keeps every variable under an even number of negations.
    """
    choices = ["ff", "tt"] + (["var"] if bound else [])
    if depth > 0:
        choices += ["not", "or", "and", "imp", "dia", "box", "mu", "nu"]
    kind = draw(st.sampled_from(choices))
    sub = lambda: draw(formulas(alphabet, depth - 1, bound))  # noqa: E731
    if kind == "ff":
        return FF()
    if kind == "tt":
        return TT()
    if kind == "var":
        return Var(draw(st.sampled_from(bound)))
    if kind == "not":
        return Not(draw(formulas(alphabet, depth - 1, ())))
    if kind == "or":
        return Or(sub(), sub())
    if kind == "and":
        return And(sub(), sub())
    if kind == "imp":
        return Implies(draw(formulas(alphabet, depth - 1, ())), sub())
    if kind in ("dia", "box"):
        reg = draw(regulars(alphabet, 1))
        return (Diamond if kind == "dia" else Box)(reg, sub())
    name = f"X{len(bound)}"
    body = draw(formulas(alphabet, depth - 1, bound + (name,)))
    return (Mu if kind == "mu" else Nu)(name, body)


def approximant_oracle(lts, phi1, phi2, alpha):
    """States with a finite alpha-path through phi1-states ending in a phi1 & phi2 state."""
    goal = set(phi1) & set(phi2)
    seen = set(goal)
    todo = list(goal)
    while todo:
        u = todo.pop()
        for t in lts.transitions:
            if t.target == u and t.action in alpha and t.source in phi1 and t.source not in seen:
                seen.add(t.source)
                todo.append(t.source)
    return frozenset(seen)
