"""Decision procedures on individual paths: the violation template, the
completeness criteria, and constructions that extend a finite path to a
complete one."""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass

from faircheck.lts import (
    ActionSet, Lasso, LTSError, Path, Transition, b_free_path_to, b_reachable_states,
    is_b_locked, validate_concurrency_relation,
)
from faircheck.mucalc import Acts, Alt, Eps, Seq, Star, evaluate


@dataclass(frozen=True)
class Witness:
    action: str
    position: int
    clause: str

    def __str__(self):
        return self.clause


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: Witness = None

    def __bool__(self):
        return self.holds

    def __str__(self):
        return "holds" if self.holds else f"fails ({self.witness})"


HOLDS = Verdict(True)


def _fails(action, position, clause):
    return Verdict(False, Witness(action, position, clause))


def format_blocking(blocking):
    blocking = ActionSet.coerce(blocking)
    if not blocking.complemented and not blocking.members:
        return "∅"
    return str(blocking)


# -- regular languages -----------------------------------------------------


class RegularAutomaton:
    """Nondeterministic automaton for a regular formula, with action-set edges."""

    def __init__(self, reg):
        self.eps = []
        self.edges = []
        self.start, self.end = self._build(reg)
        self._closure_cache = {}
        self._step_cache = {}
        self.initial = self.closure({self.start})

    def _new(self):
        self.eps.append([])
        self.edges.append([])
        return len(self.eps) - 1

    def _build(self, r):
        s, e = self._new(), self._new()
        if isinstance(r, Eps):
            self.eps[s].append(e)
        elif isinstance(r, Acts):
            self.edges[s].append((r.actions, e))
        elif isinstance(r, Seq):
            ls, le = self._build(r.left)
            rs, re_ = self._build(r.right)
            self.eps[s].append(ls)
            self.eps[le].append(rs)
            self.eps[re_].append(e)
        elif isinstance(r, Alt):
            for part in (r.left, r.right):
                ps, pe = self._build(part)
                self.eps[s].append(ps)
                self.eps[pe].append(e)
        elif isinstance(r, Star):
            ps, pe = self._build(r.sub)
            self.eps[s] += [ps, e]
            self.eps[pe] += [ps, e]
        else:
            raise TypeError(r)
        return s, e

    def closure(self, states):
        key = frozenset(states)
        hit = self._closure_cache.get(key)
        if hit is not None:
            return hit
        seen = set(key)
        todo = list(key)
        while todo:
            u = todo.pop()
            for v in self.eps[u]:
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
        out = frozenset(seen)
        self._closure_cache[key] = out
        return out

    def step(self, subset, action):
        key = (subset, action)
        hit = self._step_cache.get(key)
        if hit is None:
            hit = self.closure({v for u in subset for acts, v in self.edges[u] if action in acts})
            self._step_cache[key] = hit
        return hit

    def accepting(self, subset):
        return self.end in subset

    def accepts(self, word):
        subset = self.initial
        for a in word:
            subset = self.step(subset, a)
            if not subset:
                return False
        return self.accepting(subset)


def matches_regular(p, reg):
    """Whether the action sequence of the finite path ``p`` is in the language of ``reg``."""
    return RegularAutomaton(reg).accepts(p.actions)


# -- the violation template ------------------------------------------------


def _suffix_ok(actions, start, alpha_f, alpha_e):
    """alpha_f-free from ``start`` up to the first alpha_e action (which may itself be in alpha_f)."""
    for x in actions[start:]:
        if x in alpha_e:
            return True
        if x in alpha_f:
            return False
    return True


def violating_split(p, t, automaton=None):
    """Index of the first split point witnessing that ``p`` is ``t``-violating, or None.

    For lassos the index counts steps of stem followed by the unrolled cycle.
    """
    nfa = automaton or RegularAutomaton(t.rho)
    subset = nfa.initial
    if isinstance(p, Path):
        actions = p.actions
        for i in range(len(actions) + 1):
            if i:
                subset = nfa.step(subset, actions[i - 1])
                if not subset:
                    return None
            if nfa.accepting(subset) and _suffix_ok(actions, i, t.alpha_f, t.alpha_e):
                return i
        return None

    stem, cyc = p.stem.actions, p.cycle.actions
    n, m = len(stem), len(cyc)
    window = stem + cyc + cyc  # every suffix condition can be decided within one more cycle
    for i in range(n + 1):
        if i:
            subset = nfa.step(subset, stem[i - 1])
            if not subset:
                return None
        if nfa.accepting(subset) and _suffix_ok(stem + cyc, i, t.alpha_f, t.alpha_e):
            return i
    seen = set()
    j = 0
    while (subset, j % m) not in seen:
        seen.add((subset, j % m))
        subset = nfa.step(subset, cyc[j % m])
        j += 1
        if not subset:
            return None
        pos = n + j
        if nfa.accepting(subset) and _suffix_ok(window, n + (j % m), t.alpha_f, t.alpha_e):
            return pos
    return None


def is_violating(p, t):
    split = violating_split(p, t)
    if split is not None:
        return HOLDS
    return _fails(None, None, "no prefix matching rho is followed by an alpha_f-free stretch")


# -- criteria --------------------------------------------------------------


def _non_blocking(lts, blocking):
    return sorted(blocking.complement().resolve(lts.alphabet))


def satisfies_progress(lts, p, blocking):
    if isinstance(p, Lasso):
        return HOLDS
    blocking = ActionSet.coerce(blocking)
    s = p.final
    if is_b_locked(lts, s, blocking):
        return HOLDS
    a = min(x for x in lts.enabled(s) if x not in blocking)
    return _fails(a, len(p), f"ends in state {s}, which enables non-blocking {a}")


def satisfies_ja(lts, p, blocking, conc):
    """Justness: every enabled non-blocking action is later eliminated."""
    blocking = ActionSet.coerce(blocking)
    elim = {a: conc.eliminators(a, lts.alphabet) for a in _non_blocking(lts, blocking)}
    if isinstance(p, Path):
        states, actions = p.states, p.actions
        for i, s in enumerate(states):
            later = set(actions[i:])
            for a in sorted(lts.enabled(s)):
                if a in elim and not (elim[a] & later):
                    return _fails(a, i, f"{a} enabled at position {i}, never eliminated")
        return HOLDS
    stem, cyc = p.stem, p.cycle
    cyc_actions = set(cyc.actions)
    for i, s in enumerate(stem.states[:-1]):
        later = set(stem.actions[i:]) | cyc_actions
        for a in sorted(lts.enabled(s)):
            if a in elim and not (elim[a] & later):
                return _fails(a, i, f"{a} enabled at position {i}, never eliminated")
    for j, s in enumerate(p.cycle_states):
        for a in sorted(lts.enabled(s)):
            if a in elim and not (elim[a] & cyc_actions):
                return _fails(a, len(stem) + j,
                              f"{a} enabled at position {len(stem) + j}, never eliminated")
    return HOLDS


def _finite_fairness(p, nb, on_sets, weak, describe):
    """Definitional check over every suffix of a finite path.

    ``on_sets[i]`` is the set of actions that count as possible at state i.
    Weak: possible in every state of the suffix; strong: possible in every
    suffix of the suffix, i.e. at the final state.
    """
    states, actions = p.states, p.actions
    n = len(states)
    for i in range(n):
        occurring = set(actions[i:])
        for a in nb:
            if a in occurring:
                continue
            if weak:
                possible = all(a in on_sets[j] for j in range(i, n))
            else:
                possible = a in on_sets[n - 1]
            if possible:
                return _fails(a, i, f"{a} {describe}, never occurs")
    return HOLDS


def _lasso_fairness(p, nb, on_sets, weak, describe, order=None):
    cyc_states = p.cycle_states
    cyc_actions = p.cycle_actions
    candidates = []
    for a in nb:
        if a in cyc_actions:
            continue
        hits = [a in on_sets[s] for s in cyc_states]
        if all(hits) if weak else any(hits):
            candidates.append(a)
    if not candidates:
        return HOLDS
    a = min(candidates, key=order) if order else candidates[0]
    return _fails(a, len(p.stem), f"{a} {describe}, never occurs")


def _enabled_sets(lts):
    return [lts.enabled(s) for s in lts.states]


def _reachable_sets(lts, blocking):
    return [frozenset().union(*(lts.enabled(u) for u in b_reachable_states(lts, s, blocking)))
            for s in lts.states]


def _check_fairness(lts, p, blocking, weak, hyper):
    blocking = ActionSet.coerce(blocking)
    nb = _non_blocking(lts, blocking)
    per_state = _reachable_sets(lts, blocking) if hyper else _enabled_sets(lts)
    mode = "perpetually" if weak else "relentlessly"
    what = f"{format_blocking(blocking)}-reachable" if hyper else "enabled"
    describe = f"{mode} {what}"
    if isinstance(p, Path):
        return _finite_fairness(p, nb, [per_state[s] for s in p.states], weak, describe)
    order = None
    if hyper:
        dist = _distance_to_enabling(lts, p.cycle_states, blocking)
        order = lambda a: (dist.get(a, float("inf")), a)  # noqa: E731
    return _lasso_fairness(p, nb, per_state, weak, describe, order)


def _distance_to_enabling(lts, sources, blocking):
    """Fewest B-free steps from any of ``sources`` to a state enabling each action."""
    dist = {}
    seen = set(sources)
    frontier = list(sources)
    d = 0
    while frontier:
        for s in frontier:
            for a in lts.enabled(s):
                dist.setdefault(a, d)
        nxt = []
        for s in frontier:
            for t in lts.outgoing[s]:
                if t.action not in blocking and t.target not in seen:
                    seen.add(t.target)
                    nxt.append(t.target)
        frontier = nxt
        d += 1
    return dist


def satisfies_wfa(lts, p, blocking):
    return _check_fairness(lts, p, blocking, weak=True, hyper=False)


def satisfies_sfa(lts, p, blocking):
    return _check_fairness(lts, p, blocking, weak=False, hyper=False)


def satisfies_whfa(lts, p, blocking):
    return _check_fairness(lts, p, blocking, weak=True, hyper=True)


def satisfies_shfa(lts, p, blocking):
    return _check_fairness(lts, p, blocking, weak=False, hyper=True)


def satisfies_finitely_realisable(lts, p, blocking, spec):
    """Every state where ``phi_on(a)`` holds is followed by an ``alpha_el(a)``
    action or a state where ``phi_of(a)`` holds."""
    blocking = ActionSet.coerce(blocking)
    nb = _non_blocking(lts, blocking)
    on = {a: evaluate(lts, spec.phi_on[a]) for a in nb}
    off = {a: evaluate(lts, spec.phi_of[a]) for a in nb}
    el = {a: ActionSet.coerce(spec.alpha_el[a]) for a in nb}

    def eliminated(a, states, actions):
        return any(s in off[a] for s in states) or any(x in el[a] for x in actions)

    if isinstance(p, Path):
        states, actions = p.states, p.actions
        for i, s in enumerate(states):
            for a in nb:
                if s in on[a] and not eliminated(a, states[i:], actions[i:]):
                    return _fails(a, i, f"{a} on at position {i}, never eliminated")
        return HOLDS
    stem, cyc = p.stem, p.cycle
    for i, s in enumerate(stem.states[:-1]):
        for a in nb:
            if s in on[a] and not eliminated(a, stem.states[i:] + cyc.states,
                                             stem.actions[i:] + cyc.actions):
                return _fails(a, i, f"{a} on at position {i}, never eliminated")
    for j, s in enumerate(p.cycle_states):
        for a in nb:
            if s in on[a] and not eliminated(a, cyc.states, cyc.actions):
                return _fails(a, len(stem) + j, f"{a} on at position {len(stem) + j}, never eliminated")
    return HOLDS


def satisfies_strong_generic(lts, p, blocking, phi_of):
    """Every non-blocking action occurs infinitely often or ``phi_of`` holds
    perpetually on some suffix."""
    blocking = ActionSet.coerce(blocking)
    nb = _non_blocking(lts, blocking)
    off = {a: evaluate(lts, phi_of[a]) for a in nb}
    if isinstance(p, Path):
        for a in nb:
            if p.final not in off[a]:
                return _fails(a, len(p), f"{a} not off at the end of a finite path")
        return HOLDS
    for a in nb:
        if a in p.cycle_actions:
            continue
        if not all(s in off[a] for s in p.cycle_states):
            return _fails(a, len(p.stem), f"{a} neither occurs infinitely often nor stays off")
    return HOLDS


def check_criterion(lts, p, criterion):
    """Dispatch on a CriterionSpec."""
    kind, blocking = criterion.kind, criterion.blocking
    if kind == "progress":
        return satisfies_progress(lts, p, blocking)
    if kind == "ja":
        return satisfies_ja(lts, p, blocking, criterion.conc)
    if kind == "wfa":
        return satisfies_wfa(lts, p, blocking)
    if kind == "sfa":
        return satisfies_sfa(lts, p, blocking)
    if kind == "whfa":
        return satisfies_whfa(lts, p, blocking)
    if kind == "shfa":
        return satisfies_shfa(lts, p, blocking)
    if kind == "generic":
        return satisfies_finitely_realisable(lts, p, blocking, criterion.realisable)
    if kind == "generic-strong":
        return satisfies_strong_generic(lts, p, blocking, criterion.phi_of)
    raise ValueError(f"unknown criterion {kind!r}")


# -- extension constructions -----------------------------------------------


def _fold(prefix, steps, marks, key):
    """Turn the run recorded in ``steps`` into a lasso starting where ``key`` was first seen."""
    cut = marks[key]
    stem = Path(prefix.start, tuple(steps[:cut]))
    cycle = Path(stem.final, tuple(steps[cut:]))
    return Lasso(stem, cycle)


def _first_transition(lts, s, action):
    ts = [t for t in lts.outgoing[s] if t.action == action]
    return min(ts, key=lambda t: t.target) if ts else None


def extend_to_whfa(lts, p, blocking):
    """Extend ``p`` to a weakly B-hyperfair path, adding no blocking actions.

    Round-robin over the non-blocking actions that are B-reachable from the
    end of ``p``: each turn walks to the head action and takes it.
    """
    lts.check_path(p)
    blocking = ActionSet.coerce(blocking)
    here = p.final
    reach = _reachable_sets(lts, blocking)
    queue = deque(sorted(a for a in reach[here] if a not in blocking))
    steps = list(p.steps)
    marks = {}
    while queue:
        key = (here, tuple(queue))
        if key in marks:
            return _fold(p, steps, marks, key)
        marks[key] = len(steps)
        a = queue.popleft()
        if a not in reach[here]:
            continue
        walk = b_free_path_to(lts, here, blocking, lambda s, a=a: a in lts.enabled(s))
        t = _first_transition(lts, walk.final, a)
        steps.extend(walk.steps)
        steps.append(t)
        here = t.target
        queue.append(a)
    return Path(p.start, tuple(steps))


def extend_to_just(lts, p, blocking, conc):
    """Extend ``p`` to a B-just path by always taking the oldest pending action."""
    lts.check_path(p)
    report = validate_concurrency_relation(lts, conc)
    if not report.valid:
        raise LTSError("concurrency relation is invalid: " + "; ".join(list(report.lines())[1:]))
    blocking = ActionSet.coerce(blocking)
    nb = set(_non_blocking(lts, blocking))
    pending = []
    for i, s in enumerate(p.states):
        later = set(p.actions[i:])
        for a in sorted(lts.enabled(s)):
            if a in nb and a not in pending and not (conc.eliminators(a, lts.alphabet) & later):
                pending.append(a)
    queue = deque(sorted(pending))
    here = p.final
    steps = list(p.steps)
    marks = {}
    while queue:
        key = (here, tuple(queue))
        if key in marks:
            return _fold(p, steps, marks, key)
        marks[key] = len(steps)
        a = queue.popleft()
        t = _first_transition(lts, here, a)
        if t is None:
            raise LTSError(f"pending action {a} is not enabled in state {here}")
        steps.append(t)
        here = t.target
        queue = deque(b for b in queue if conc.concurrent(b, a))
        for b in sorted(lts.enabled(here)):
            if b in nb and b not in queue:
                queue.append(b)
    return Path(p.start, tuple(steps))


# -- trace files -----------------------------------------------------------


class TraceFormatError(LTSError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        self.detail = message
        super().__init__(f"line {lineno}: {message}" if lineno else message)


_STEP = re.compile(r'\s*-(?:"((?:[^"\\]|\\.)*)"|(.+?))->\s*(\d+)')


def _parse_steps(text, lineno):
    m = re.match(r"\s*(\d+)", text)
    if not m:
        raise TraceFormatError("expected a state number", lineno)
    start = int(m.group(1))
    pos = m.end()
    here = start
    steps = []
    while pos < len(text.rstrip()):
        m = _STEP.match(text, pos)
        if not m:
            raise TraceFormatError(f"cannot read a step at {text[pos:].strip()!r}", lineno)
        label = re.sub(r"\\(.)", r"\1", m.group(1)) if m.group(1) is not None else m.group(2)
        target = int(m.group(3))
        steps.append(Transition(here, label, target))
        here = target
        pos = m.end()
    return start, tuple(steps)


def parse_trace(text, lts=None):
    """Read ``stem: 0 -a-> 1 ...`` and an optional ``cycle: ...`` line."""
    stem = cycle = None
    for lineno, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, rest = line.partition(":")
        key = key.strip().lower()
        if not sep or key not in ("stem", "cycle"):
            raise TraceFormatError(f"expected 'stem:' or 'cycle:', found {line!r}", lineno)
        if (stem if key == "stem" else cycle) is not None:
            raise TraceFormatError(f"duplicate {key} line", lineno)
        start, steps = _parse_steps(rest, lineno)
        if lts is not None:
            for t in steps:
                if not lts.has_transition(t):
                    raise TraceFormatError(f"{t.source} -{t.action}-> {t.target} is not a transition", lineno)
            try:
                lts.check_state(start)
            except LTSError as exc:
                raise TraceFormatError(str(exc), lineno) from None
        try:
            built = Path(start, steps)
        except LTSError as exc:
            raise TraceFormatError(str(exc), lineno) from None
        if key == "stem":
            stem = built
        else:
            cycle = (built, lineno)
    if stem is None:
        raise TraceFormatError("missing stem line")
    if cycle is None:
        return stem
    cycle, lineno = cycle
    try:
        return Lasso(stem, cycle)
    except LTSError as exc:
        raise TraceFormatError(str(exc), lineno) from None


def format_trace(p):
    if isinstance(p, Lasso):
        return f"stem: {p.stem}\ncycle: {p.cycle}\n"
    return f"stem: {p}\n"
