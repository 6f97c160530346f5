"""Finite labelled transition systems, paths, and the Aldebaran (.aut) format."""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Union


class LTSError(ValueError):
    pass


class AutFormatError(LTSError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        self.detail = message
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class ActionSet:
    """A set of action labels, either literal or the complement of ``members``.

    Complements are always relative to the alphabet of whatever LTS the set is
    used with, so membership tests do not need the alphabet but enumeration
    (``resolve``) does.
    """

    members: frozenset = frozenset()
    complemented: bool = False

    @classmethod
    def of(cls, *labels):
        return cls(frozenset(labels))

    @classmethod
    def everything(cls):
        return cls(frozenset(), True)

    @classmethod
    def coerce(cls, value):
        if isinstance(value, ActionSet):
            return value
        if isinstance(value, str):
            return cls.of(value)
        return cls(frozenset(value))

    def __contains__(self, label):
        return (label in self.members) != self.complemented

    def resolve(self, alphabet):
        if self.complemented:
            return frozenset(alphabet) - self.members
        return self.members

    def is_empty(self, alphabet):
        return not self.resolve(alphabet)

    def complement(self):
        return ActionSet(self.members, not self.complemented)

    def union(self, other):
        other = ActionSet.coerce(other)
        a, b = self, other
        if not a.complemented and not b.complemented:
            return ActionSet(a.members | b.members)
        if a.complemented and b.complemented:
            return ActionSet(a.members & b.members, True)
        lit, co = (a, b) if b.complemented else (b, a)
        return ActionSet(co.members - lit.members, True)

    def intersection(self, other):
        other = ActionSet.coerce(other)
        a, b = self, other
        if not a.complemented and not b.complemented:
            return ActionSet(a.members & b.members)
        if a.complemented and b.complemented:
            return ActionSet(a.members | b.members, True)
        lit, co = (a, b) if b.complemented else (b, a)
        return ActionSet(lit.members - co.members)

    def difference(self, other):
        return self.intersection(ActionSet.coerce(other).complement())

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def __invert__(self):
        return self.complement()

    def __str__(self):
        inner = ",".join(sorted(self.members))
        return ("!" if self.complemented else "") + "{" + inner + "}"


class Transition(NamedTuple):
    source: int
    action: str
    target: int


@dataclass(frozen=True)
class LTS:
    num_states: int
    initial: int
    transitions: tuple
    alphabet: frozenset = None

    def __post_init__(self):
        object.__setattr__(self, "transitions", tuple(Transition(*t) for t in self.transitions))
        labels = frozenset(t.action for t in self.transitions)
        if self.alphabet is None:
            object.__setattr__(self, "alphabet", labels)
        else:
            object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        if self.num_states < 1:
            raise LTSError("an LTS needs at least one state")
        if not 0 <= self.initial < self.num_states:
            raise LTSError(f"initial state {self.initial} out of range")
        for t in self.transitions:
            if not (0 <= t.source < self.num_states and 0 <= t.target < self.num_states):
                raise LTSError(f"transition {t} has an out-of-range state")
        if not labels <= self.alphabet:
            raise LTSError(f"labels {sorted(labels - self.alphabet)} missing from alphabet")

    @property
    def states(self):
        return range(self.num_states)

    @cached_property
    def outgoing(self):
        out = [[] for _ in self.states]
        for t in sorted(set(self.transitions)):
            out[t.source].append(t)
        return tuple(tuple(ts) for ts in out)

    @cached_property
    def _enabled(self):
        return tuple(frozenset(t.action for t in ts) for ts in self.outgoing)

    def check_state(self, s):
        if not isinstance(s, int) or not 0 <= s < self.num_states:
            raise LTSError(f"unknown state {s!r}")

    def check_actions(self, actions):
        actions = ActionSet.coerce(actions)
        unknown = actions.members - self.alphabet
        if unknown:
            raise LTSError(f"actions {sorted(unknown)} are not in the alphabet")
        return actions

    def enabled(self, s):
        self.check_state(s)
        return self._enabled[s]

    def has_transition(self, t):
        return t in self.outgoing[t.source] if 0 <= t.source < self.num_states else False

    def check_path(self, p):
        for t in iter_steps(p):
            if not self.has_transition(t):
                raise LTSError(f"{t} is not a transition of this LTS")


def enabled_actions(lts, s):
    return ActionSet(lts.enabled(s))


def is_b_locked(lts, s, blocking):
    blocking = ActionSet.coerce(blocking)
    return all(a in blocking for a in lts.enabled(s))


def b_reachable_states(lts, s, blocking):
    """States reachable from ``s`` without taking a blocking action (``s`` included)."""
    lts.check_state(s)
    blocking = ActionSet.coerce(blocking)
    seen = {s}
    todo = deque([s])
    while todo:
        u = todo.popleft()
        for t in lts.outgoing[u]:
            if t.action not in blocking and t.target not in seen:
                seen.add(t.target)
                todo.append(t.target)
    return frozenset(seen)


def b_reachable_actions(lts, s, blocking):
    reached = b_reachable_states(lts, s, blocking)
    return ActionSet(frozenset().union(*(lts.enabled(u) for u in reached)))


def b_free_path_to(lts, s, blocking, goal):
    """Shortest B-free path from ``s`` to a state satisfying ``goal``.

    Successors are explored smallest-target-first, so the result is
    deterministic. Returns None if no such state is B-reachable.
    """
    blocking = ActionSet.coerce(blocking)
    parent = {s: None}
    todo = deque([s])
    while todo:
        u = todo.popleft()
        if goal(u):
            steps = []
            while parent[u] is not None:
                steps.append(parent[u])
                u = parent[u].source
            return Path(s, tuple(reversed(steps)))
        for t in sorted(lts.outgoing[u], key=lambda t: (t.target, t.action)):
            if t.action not in blocking and t.target not in parent:
                parent[t.target] = t
                todo.append(t.target)
    return None


# -- paths -----------------------------------------------------------------


@dataclass(frozen=True)
class Path:
    start: int
    steps: tuple = ()

    def __post_init__(self):
        steps = tuple(Transition(*t) for t in self.steps)
        object.__setattr__(self, "steps", steps)
        here = self.start
        for i, t in enumerate(steps):
            if t.source != here:
                raise LTSError(f"step {i} starts in {t.source}, expected {here}")
            here = t.target

    def __len__(self):
        return len(self.steps)

    @property
    def states(self):
        return (self.start,) + tuple(t.target for t in self.steps)

    @property
    def final(self):
        return self.steps[-1].target if self.steps else self.start

    @property
    def actions(self):
        return tuple(t.action for t in self.steps)

    def then(self, *steps):
        return Path(self.start, self.steps + tuple(steps))

    def __str__(self):
        return format_steps(self.start, self.steps)


@dataclass(frozen=True)
class Lasso:
    """The infinite path ``stem . cycle . cycle . ...``."""

    stem: Path
    cycle: Path

    def __post_init__(self):
        if len(self.cycle) < 1:
            raise LTSError("a lasso cycle needs at least one transition")
        if self.cycle.start != self.cycle.final:
            raise LTSError("a lasso cycle must end where it starts")
        if self.stem.final != self.cycle.start:
            raise LTSError("stem must end where the cycle starts")

    @property
    def start(self):
        return self.stem.start

    @property
    def cycle_states(self):
        return self.cycle.states[:-1]

    @property
    def cycle_actions(self):
        return frozenset(self.cycle.actions)

    def __str__(self):
        return f"{self.stem} ({self.cycle})^w"


PathOrLasso = Union[Path, Lasso]


def iter_steps(p):
    if isinstance(p, Lasso):
        yield from p.stem.steps
        yield from p.cycle.steps
    else:
        yield from p.steps


def append_paths(prefix, suffix):
    if isinstance(suffix, Lasso):
        return Lasso(append_paths(prefix, suffix.stem), suffix.cycle)
    if prefix.final != suffix.start:
        raise LTSError(f"cannot append a path from {suffix.start} to one ending in {prefix.final}")
    return Path(prefix.start, prefix.steps + suffix.steps)


def format_steps(start, steps):
    parts = [str(start)]
    for t in steps:
        parts.append(f"-{_quote_if_needed(t.action)}-> {t.target}")
    return " ".join(parts)


def _quote_if_needed(label):
    if re.fullmatch(r"[^\s\"\-<>]+", label) and not label.startswith(">"):
        return label
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


# -- concurrency relations -------------------------------------------------


@dataclass(frozen=True)
class ConcurrencyRelation:
    """Ordered pairs ``(a, b)`` meaning ``a`` is concurrent with ``b``.

    Every pair not listed interferes; ``eliminators(a)`` is the set of actions
    whose occurrence eliminates ``a``.
    """

    pairs: frozenset = frozenset()

    @classmethod
    def from_interference(cls, alphabet, interfering):
        interfering = set(interfering)
        return cls(frozenset(
            (a, b) for a in alphabet for b in alphabet
            if a != b and (a, b) not in interfering
        ))

    def concurrent(self, a, b):
        return (a, b) in self.pairs

    def eliminators(self, a, alphabet):
        return frozenset(b for b in alphabet if (a, b) not in self.pairs)

    def interference_pairs(self, alphabet):
        return sorted((a, b) for a in alphabet for b in alphabet if (a, b) not in self.pairs)


@dataclass(frozen=True)
class ConcurrencyViolation:
    action: str
    state: int
    witness: Path

    def __str__(self):
        return f"{self.action} enabled in {self.state} but not after {self.witness}"


@dataclass
class ConcurrencyReport:
    valid: bool
    reflexive: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    asymmetric: list = field(default_factory=list)

    def lines(self):
        yield "valid" if self.valid else "invalid"
        for a in self.reflexive:
            yield f"reflexive: {a} is listed as concurrent with itself"
        for v in self.violations:
            yield f"violation: {v}"
        for a, b in self.asymmetric:
            yield f"note: asymmetric pair {a} ~ {b}"


def validate_concurrency_relation(lts, conc):
    used = {x for pair in conc.pairs for x in pair}
    unknown = used - lts.alphabet
    if unknown:
        raise LTSError(f"concurrency relation mentions unknown actions {sorted(unknown)}")
    reflexive = sorted(a for a, b in conc.pairs if a == b)
    violations = []
    for a in sorted(lts.alphabet):
        for s in lts.states:
            if a not in lts.enabled(s):
                continue
            # BFS along transitions whose actions are concurrent with a
            parent = {s: None}
            todo = deque([s])
            while todo:
                u = todo.popleft()
                if a not in lts.enabled(u):
                    steps = []
                    while parent[u] is not None:
                        steps.append(parent[u])
                        u = parent[u].source
                    violations.append(ConcurrencyViolation(a, s, Path(s, tuple(reversed(steps)))))
                    break
                for t in lts.outgoing[u]:
                    if conc.concurrent(a, t.action) and t.target not in parent:
                        parent[t.target] = t
                        todo.append(t.target)
    asymmetric = sorted((a, b) for a, b in conc.pairs if a != b and (b, a) not in conc.pairs)
    return ConcurrencyReport(not reflexive and not violations, reflexive, violations, asymmetric)


def maximal_concurrency_relation(lts):
    """The largest valid concurrency relation on ``lts``; every subset is valid too."""
    pairs = set()
    for a in lts.alphabet:
        for b in lts.alphabet:
            if a == b:
                continue
            if all(a in lts.enabled(t.target)
                   for t in lts.transitions if t.action == b and a in lts.enabled(t.source)):
                pairs.add((a, b))
    return ConcurrencyRelation(frozenset(pairs))


# -- .aut format -----------------------------------------------------------

_HEADER = re.compile(r"des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")


def _read_label(line, i, lineno):
    """Read a (possibly quoted) label starting at ``line[i]``; return (label, next index)."""
    if i < len(line) and line[i] == '"':
        out = []
        i += 1
        while i < len(line):
            c = line[i]
            if c == "\\" and i + 1 < len(line):
                out.append(line[i + 1])
                i += 2
            elif c == '"':
                return "".join(out), i + 1
            else:
                out.append(c)
                i += 1
        raise AutFormatError("unterminated quoted label", lineno)
    j = i
    while j < len(line) and line[j] not in ",()\"":
        j += 1
    label = line[i:j].strip()
    if not label:
        raise AutFormatError("empty label", lineno)
    return label, j


def _parse_transition(line, lineno):
    m = re.match(r"\(\s*(\d+)\s*,\s*", line)
    if not m:
        raise AutFormatError(f"malformed transition {line!r}", lineno)
    label, i = _read_label(line, m.end(), lineno)
    m2 = re.compile(r"\s*,\s*(\d+)\s*\)\s*$").match(line, i)
    if not m2:
        raise AutFormatError(f"malformed transition {line!r}", lineno)
    return int(m.group(1)), label, int(m2.group(1))


def parse_aut(text):
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = text.replace("\r\n", "\n").split("\n")
    header = None
    declared = set()
    transitions = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("%"):
            if line.startswith("%alphabet"):
                rest = line[len("%alphabet"):].strip()
                i = 0
                while i < len(rest):
                    if rest[i].isspace():
                        i += 1
                        continue
                    label, i = _read_label(rest, i, lineno)
                    declared.add(label)
            continue
        if header is None:
            m = _HEADER.match(line)
            if not m:
                raise AutFormatError(f"malformed header {line!r}", lineno)
            header = tuple(int(g) for g in m.groups())
            continue
        src, label, tgt = _parse_transition(line, lineno)
        n = header[2]
        for s in (src, tgt):
            if s >= n:
                raise AutFormatError(f"state {s} out of range (header declares {n} states)", lineno)
        transitions.append(Transition(src, label, tgt))
    if header is None:
        raise AutFormatError("missing des header", 1)
    init, ntrans, nstates = header
    if len(transitions) != ntrans:
        raise AutFormatError(f"header declares {ntrans} transitions, found {len(transitions)}")
    if nstates < 1 or init >= nstates:
        raise AutFormatError(f"initial state {init} out of range", 1)
    alphabet = declared | {t.action for t in transitions}
    return LTS(nstates, init, tuple(transitions), frozenset(alphabet))


def _aut_label(label):
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize_aut(lts):
    lines = [f"des ({lts.initial},{len(lts.transitions)},{lts.num_states})"]
    unused = lts.alphabet - {t.action for t in lts.transitions}
    if unused:
        lines.append("%alphabet " + " ".join(_aut_label(a) for a in sorted(unused)))
    for t in lts.transitions:
        lines.append(f"({t.source},{_aut_label(t.action)},{t.target})")
    return "\n".join(lines) + "\n"


def load_aut(path):
    with open(path, encoding="utf-8") as fh:
        return parse_aut(fh.read())
