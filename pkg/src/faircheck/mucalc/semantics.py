"""Fixpoint-iteration semantics of formulae over a finite LTS.

State sets are handled internally as int bitmasks (bit s set iff state s is
in the set) and converted to frozensets at the API boundary.
"""
from __future__ import annotations

from faircheck.mucalc.syntax import (
    FF, TT, Acts, Alt, And, Box, Diamond, Eps, FormulaError, Implies, Mu, Not, Nu,
    Or, Seq, Star, Var, action_labels, check_syntactic_monotonicity, free_vars,
)


class EvaluationError(FormulaError):
    pass


def to_mask(states):
    m = 0
    for s in states:
        m |= 1 << s
    return m


def from_mask(mask):
    out = []
    s = 0
    while mask:
        if mask & 1:
            out.append(s)
        mask >>= 1
        s += 1
    return frozenset(out)


class _Evaluator:
    def __init__(self, lts):
        self.lts = lts
        self.full = (1 << lts.num_states) - 1
        self.out = [[(t.action, t.target) for t in ts] for ts in lts.outgoing]
        self._pre_cache = {}

    def pre(self, actions, target):
        """States with an ``actions``-transition into ``target``."""
        key = (actions, target)
        hit = self._pre_cache.get(key)
        if hit is not None:
            return hit
        m = 0
        for s, ts in enumerate(self.out):
            for a, t in ts:
                if (target >> t) & 1 and a in actions:
                    m |= 1 << s
                    break
        if len(self._pre_cache) < 100_000:
            self._pre_cache[key] = m
        return m

    def dia(self, r, target):
        if isinstance(r, Eps):
            return target
        if isinstance(r, Acts):
            return self.pre(r.actions, target)
        if isinstance(r, Seq):
            return self.dia(r.left, self.dia(r.right, target))
        if isinstance(r, Alt):
            return self.dia(r.left, target) | self.dia(r.right, target)
        if isinstance(r, Star):
            z = target
            while True:
                nz = z | self.dia(r.sub, z)
                if nz == z:
                    return z
                z = nz
        raise TypeError(r)

    def eval(self, f, env):
        if isinstance(f, FF):
            return 0
        if isinstance(f, TT):
            return self.full
        if isinstance(f, Var):
            return env[f.name]
        if isinstance(f, Not):
            return self.full & ~self.eval(f.sub, env)
        if isinstance(f, Or):
            return self.eval(f.left, env) | self.eval(f.right, env)
        if isinstance(f, And):
            left = self.eval(f.left, env)
            if not left:
                return 0
            return left & self.eval(f.right, env)
        if isinstance(f, Implies):
            return (self.full & ~self.eval(f.left, env)) | self.eval(f.right, env)
        if isinstance(f, Diamond):
            return self.dia(f.reg, self.eval(f.sub, env))
        if isinstance(f, Box):
            return self.full & ~self.dia(f.reg, self.full & ~self.eval(f.sub, env))
        if isinstance(f, (Mu, Nu)):
            x = 0 if isinstance(f, Mu) else self.full
            while True:
                nx = self.eval(f.sub, {**env, f.var: x})
                if nx == x:
                    return x
                x = nx
        raise TypeError(f)


def _check(lts, f, env):
    violations = check_syntactic_monotonicity(f)
    if violations:
        raise EvaluationError(f"formula is not syntactically monotonic: {violations[0]}")
    unbound = free_vars(f) - set(env)
    if unbound:
        raise EvaluationError(f"unbound variables {sorted(unbound)}")
    unknown = action_labels(f) - lts.alphabet
    if unknown:
        raise EvaluationError(f"actions {sorted(unknown)} are not in the alphabet")
    masks = {}
    for name, states in env.items():
        states = frozenset(states)
        bad = [s for s in states if not (isinstance(s, int) and 0 <= s < lts.num_states)]
        if bad:
            raise EvaluationError(f"environment entry {name} has unknown states {bad}")
        masks[name] = to_mask(states)
    return masks


def evaluate(lts, f, env=None):
    """The set of states of ``lts`` satisfying ``f`` under ``env``."""
    masks = _check(lts, f, env or {})
    return from_mask(_Evaluator(lts).eval(f, masks))


def satisfies(lts, f):
    return lts.initial in evaluate(lts, f)


def least_fixpoint_approximant(lts, binder, i, env=None):
    """The i-th iterate of the binder's transformer starting from the empty set."""
    if not isinstance(binder, Mu):
        raise EvaluationError("approximants are defined for least-fixpoint binders")
    if not 0 <= i <= lts.num_states:
        raise EvaluationError(f"approximant index {i} outside 0..{lts.num_states}")
    masks = _check(lts, binder, env or {})
    ev = _Evaluator(lts)
    x = 0
    for _ in range(i):
        x = ev.eval(binder.sub, {**masks, binder.var: x})
    return from_mask(x)
