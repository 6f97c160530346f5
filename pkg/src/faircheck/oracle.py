"""Brute-force search for complete violating paths, independent of the formulae.

Two strategies decide the same question: does the initial state admit a path
that matches the violation template, satisfies progress, and satisfies the
completeness criterion?

``exhaustive`` literally enumerates finite paths and lassos up to the bounds
and runs the path predicates on each one. It is only feasible for tiny
instances and serves as the reference for the default strategy.

``quotient`` explores the same paths up to an exact finite abstraction. A
finite prefix is summarised by its final state, the set of automaton states
reached for rho, whether a violation is still possible/already certain, and
(for finitely realisable criteria) the set of actions switched on but not
yet eliminated. A cycle from a state is summarised by the states it visits,
the actions it uses, and whether alpha_e or alpha_f comes first on it. Every
witness is rebuilt as a concrete path and re-checked with the predicates.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from faircheck.lts import (
    ActionSet, Lasso, LTSError, Path, b_reachable_states, validate_concurrency_relation,
)
from faircheck.mucalc import evaluate, satisfies
from faircheck.predicates import RegularAutomaton, check_criterion, is_violating, satisfies_progress
from faircheck.templates import DEFAULT_SUBSET_CAP, build_property_formula

DEFAULT_BUDGET = 3_000_000

# violation status of a prefix
NONE, PENDING, CONFIRMED = 0, 1, 2
# what a cycle does to a pending violation: nothing, confirms it, kills it
CLEAN, CONF, DEAD = 0, 1, 2


class OracleBudgetExceeded(RuntimeError):
    def __init__(self, explored, budget):
        self.explored = explored
        self.budget = budget
        super().__init__(f"search explored {explored} configurations, over the budget of {budget}")


class OracleInconsistency(AssertionError):
    pass


@dataclass(frozen=True)
class SearchBounds:
    max_stem: int
    max_cycle: int

    def __post_init__(self):
        if self.max_stem < 0 or self.max_cycle < 1:
            raise ValueError("bounds must be positive")

    @classmethod
    def default(cls, lts):
        n = lts.num_states * (len(lts.alphabet) + 2)
        return cls(n, n)


# -- literal enumeration ---------------------------------------------------


def _paths_from(lts, start, max_len):
    """Every path from ``start`` with at most ``max_len`` steps, shortest first per branch."""
    stack = [(start, ())]
    while stack:
        here, steps = stack.pop()
        yield Path(start, steps)
        if len(steps) < max_len:
            for t in reversed(lts.outgoing[here]):
                stack.append((t.target, steps + (t,)))


def _is_primitive(steps):
    n = len(steps)
    for d in range(1, n):
        if n % d == 0 and steps[:d] * (n // d) == steps:
            return False
    return True


def _cycles_from(lts, s, max_len):
    for p in _paths_from(lts, s, max_len):
        if len(p) and p.final == s:
            yield p


def enumerate_candidates(lts, bounds):
    """Finite paths from the initial state and lassos within ``bounds``.

    Lassos are generated in a canonical form only: the cycle is not a power
    of a shorter cycle, and the stem does not end with the cycle's last step
    (such a lasso is the same infinite path as one with a shorter stem).
    """
    cycles = {}
    for stem in _paths_from(lts, lts.initial, bounds.max_stem):
        yield stem
    for stem in _paths_from(lts, lts.initial, bounds.max_stem):
        s = stem.final
        if s not in cycles:
            cycles[s] = [c for c in _cycles_from(lts, s, bounds.max_cycle) if _is_primitive(c.steps)]
        for cycle in cycles[s]:
            if stem.steps and stem.steps[-1] == cycle.steps[-1]:
                continue
            yield Lasso(stem, cycle)


# -- criterion summaries ---------------------------------------------------


@dataclass
class _Model:
    kind: str  # progress | realisable | strong
    on: list = None
    off: list = None
    el: dict = None


def _criterion_model(lts, criterion):
    blocking = criterion.blocking
    nb = frozenset(blocking.complement().resolve(lts.alphabet))
    states = list(lts.states)
    if criterion.kind == "progress":
        return _Model("progress")
    if criterion.kind in ("wfa", "ja", "sfa"):
        enabled = [lts.enabled(s) & nb for s in states]
    if criterion.kind in ("whfa", "shfa"):
        reach = [frozenset().union(*(lts.enabled(u) for u in b_reachable_states(lts, s, blocking))) & nb
                 for s in states]
    if criterion.kind == "wfa":
        return _Model("realisable", enabled, [nb - e for e in enabled], {a: frozenset([a]) for a in nb})
    if criterion.kind == "whfa":
        return _Model("realisable", reach, [nb - r for r in reach], {a: frozenset([a]) for a in nb})
    if criterion.kind == "ja":
        el = {a: criterion.conc.eliminators(a, lts.alphabet) for a in nb}
        return _Model("realisable", enabled, [frozenset()] * len(states), el)
    if criterion.kind == "sfa":
        return _Model("strong", off=[nb - e for e in enabled])
    if criterion.kind == "shfa":
        return _Model("strong", off=[nb - r for r in reach])
    if criterion.kind == "generic":
        spec = criterion.realisable
        on_sets = {a: evaluate(lts, spec.phi_on[a]) for a in nb}
        off_sets = {a: evaluate(lts, spec.phi_of[a]) for a in nb}
        on = [frozenset(a for a in nb if s in on_sets[a]) for s in states]
        off = [frozenset(a for a in nb if s in off_sets[a]) for s in states]
        el = {a: frozenset(ActionSet.coerce(spec.alpha_el[a]).resolve(lts.alphabet)) for a in nb}
        return _Model("realisable", on, off, el)
    if criterion.kind == "generic-strong":
        off_sets = {a: evaluate(lts, criterion.phi_of[a]) for a in nb}
        return _Model("strong", off=[frozenset(a for a in nb if s in off_sets[a]) for s in states])
    raise ValueError(f"unknown criterion {criterion.kind!r}")


# -- quotient search -------------------------------------------------------


@dataclass
class OracleResult:
    admits: bool
    witness: object = None
    complete: bool = True
    explored: int = 0
    strategy: str = "quotient"


class _Search:
    def __init__(self, lts, template, criterion, bounds, budget):
        self.lts = lts
        self.t = template
        self.criterion = criterion
        self.bounds = bounds
        self.budget = budget
        self.explored = 0
        self.complete = True
        self.nfa = RegularAutomaton(template.rho)
        self.model = _criterion_model(lts, criterion)
        self.nb = frozenset(criterion.blocking.complement().resolve(lts.alphabet))
        self._classes = {}

    def tick(self):
        self.explored += 1
        if self.explored > self.budget:
            raise OracleBudgetExceeded(self.explored, self.budget)

    def locked(self, s):
        return not (self.lts.enabled(s) & self.nb)

    # prefix summaries

    def start_config(self):
        s = self.lts.initial
        subset = self.nfa.initial
        status = PENDING if self.nfa.accepting(subset) else NONE
        pending = frozenset()
        if self.model.kind == "realisable":
            pending = self.model.on[s] - self.model.off[s]
        return (s, subset, status, pending)

    def step_config(self, config, t):
        _, subset, status, pending = config
        x, s2 = t.action, t.target
        if status == PENDING:
            if x in self.t.alpha_e:
                status = CONFIRMED
            elif x in self.t.alpha_f:
                status = NONE
        subset = self.nfa.step(subset, x)
        if status == NONE and self.nfa.accepting(subset):
            status = PENDING
        if self.model.kind == "realisable":
            m = self.model
            pending = frozenset(a for a in pending if x not in m.el[a] and a not in m.off[s2])
            pending |= m.on[s2] - m.off[s2]
        return (s2, subset, status, pending)

    def finite_ok(self, config):
        s, _, status, pending = config
        if status == NONE or not self.locked(s):
            return False
        if self.model.kind == "realisable":
            return not pending
        if self.model.kind == "strong":
            return self.nb <= self.model.off[s]
        return True

    def lasso_ok(self, config, cls):
        _, _, status, pending = config
        visited, used, cstatus = cls
        if not (status == CONFIRMED or (status == PENDING and cstatus != DEAD)):
            return False
        m = self.model
        if m.kind == "realisable":
            on_cycle = frozenset().union(*(m.on[v] for v in visited))
            off_cycle = frozenset().union(*(m.off[v] for v in visited))
            for a in pending | on_cycle:
                if not (m.el[a] & used) and a not in off_cycle:
                    return False
            return True
        if m.kind == "strong":
            always_off = frozenset.intersection(*(m.off[v] for v in visited))
            return all(a in used or a in always_off for a in self.nb)
        return True

    # cycle summaries

    def classes(self, s):
        """Summaries of closed walks from ``s``, each with the walk's end configuration."""
        if s in self._classes:
            return self._classes[s]
        alpha_e, alpha_f = self.t.alpha_e, self.t.alpha_f
        parent = {}
        found = {}
        frontier = []
        for t in self.lts.outgoing[s]:
            cs = CONF if t.action in alpha_e else DEAD if t.action in alpha_f else CLEAN
            cfg = (t.target, frozenset([s, t.target]), frozenset([t.action]), cs)
            if cfg not in parent:
                parent[cfg] = (None, t)
                frontier.append(cfg)
        depth = 1
        while frontier:
            nxt = []
            for cfg in frontier:
                self.tick()
                cur, visited, used, cs = cfg
                if cur == s:
                    found.setdefault((visited, used, cs), cfg)
                for t in self.lts.outgoing[cur]:
                    ncs = cs
                    if cs == CLEAN:
                        ncs = CONF if t.action in alpha_e else DEAD if t.action in alpha_f else CLEAN
                    ncfg = (t.target, visited | {t.target}, used | {t.action}, ncs)
                    if ncfg not in parent:
                        if depth >= self.bounds.max_cycle:
                            self.complete = False
                            continue
                        parent[ncfg] = (cfg, t)
                        nxt.append(ncfg)
            frontier = nxt
            depth += 1
        out = [(cls, parent, cfg) for cls, cfg in sorted(found.items(), key=_class_order)]
        self._classes[s] = out
        return out

    def cycle_path(self, s, parent, cfg):
        steps = []
        while cfg is not None:
            prev, t = parent[cfg]
            steps.append(t)
            cfg = prev
        return Path(s, tuple(reversed(steps)))

    def run(self):
        start = self.start_config()
        parent = {start: None}
        frontier = [start]
        depth = 0
        while frontier:
            nxt = []
            for cfg in frontier:
                self.tick()
                if self.finite_ok(cfg):
                    return self.rebuild(parent, cfg)
                s = cfg[0]
                for cls, cparent, cend in self.classes(s):
                    if self.lasso_ok(cfg, cls):
                        stem = self.rebuild(parent, cfg)
                        return Lasso(stem, self.cycle_path(s, cparent, cend))
                for t in self.lts.outgoing[s]:
                    ncfg = self.step_config(cfg, t)
                    if ncfg not in parent:
                        if depth >= self.bounds.max_stem:
                            self.complete = False
                            continue
                        parent[ncfg] = (cfg, t)
                        nxt.append(ncfg)
            frontier = nxt
            depth += 1
        return None

    def rebuild(self, parent, cfg):
        steps = []
        while parent[cfg] is not None:
            cfg, t = parent[cfg]
            steps.append(t)
        return Path(self.lts.initial, tuple(reversed(steps)))


def _class_order(item):
    (visited, used, cs), _ = item
    return (len(visited) + len(used), sorted(visited), sorted(used), cs)


def _check_witness(lts, template, criterion, witness):
    checks = {
        "violating": is_violating(witness, template),
        "progress": satisfies_progress(lts, witness, criterion.blocking),
        criterion.kind: check_criterion(lts, witness, criterion),
    }
    bad = [f"{name}: {verdict}" for name, verdict in checks.items() if not verdict]
    if bad:
        raise OracleInconsistency(f"witness {witness} fails re-checking: {'; '.join(bad)}")


def _exhaustive(lts, template, criterion, bounds, budget):
    explored = 0
    for cand in enumerate_candidates(lts, bounds):
        explored += 1
        if explored > budget:
            raise OracleBudgetExceeded(explored, budget)
        if (is_violating(cand, template) and satisfies_progress(lts, cand, criterion.blocking)
                and check_criterion(lts, cand, criterion)):
            return OracleResult(True, cand, False, explored, "exhaustive")
    return OracleResult(False, None, False, explored, "exhaustive")


def oracle_admits_violating(lts, template, criterion, bounds=None, strategy="quotient",
                            budget=DEFAULT_BUDGET):
    """Search for a complete (progressing and criterion-satisfying) violating path."""
    bounds = bounds or SearchBounds.default(lts)
    if criterion.kind == "ja":
        report = validate_concurrency_relation(lts, criterion.conc)
        if not report.valid:
            raise LTSError("concurrency relation is invalid: " + "; ".join(list(report.lines())[1:]))
    if strategy == "exhaustive":
        result = _exhaustive(lts, template, criterion, bounds, budget)
    elif strategy == "quotient":
        search = _Search(lts, template, criterion, bounds, budget)
        witness = search.run()
        result = OracleResult(witness is not None, witness, search.complete, search.explored)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if result.witness is not None:
        _check_witness(lts, template, criterion, result.witness)
    return result


# -- cross-validation ------------------------------------------------------


@dataclass
class CrossValidationReport:
    formula_verdict: bool
    oracle_verdict: bool
    counterexample: object = None
    formula_seconds: float = 0.0
    oracle_seconds: float = 0.0
    complete: bool = True
    formula: object = field(default=None, repr=False)

    @property
    def agree(self):
        return self.formula_verdict != self.oracle_verdict


def cross_validate(lts, templates, criterion, bounds=None, subset_cap=DEFAULT_SUBSET_CAP,
                   budget=DEFAULT_BUDGET):
    """Compare the formula verdict with the oracle over one or more templates."""
    if not isinstance(templates, (list, tuple)):
        templates = [templates]
    t0 = time.perf_counter()
    formula = build_property_formula(templates, criterion, lts.alphabet, subset_cap)
    formula_verdict = satisfies(lts, formula)
    t1 = time.perf_counter()
    oracle_verdict, witness, complete = False, None, True
    for t in templates:
        result = oracle_admits_violating(lts, t, criterion, bounds, budget=budget)
        complete = complete and result.complete
        if result.admits:
            oracle_verdict, witness = True, result.witness
            break
    t2 = time.perf_counter()
    return CrossValidationReport(formula_verdict, oracle_verdict, witness, t1 - t0, t2 - t1,
                                 complete, formula)


__all__ = [
    "SearchBounds", "OracleResult", "OracleBudgetExceeded", "OracleInconsistency",
    "CrossValidationReport", "enumerate_candidates", "oracle_admits_violating",
    "cross_validate",
]
