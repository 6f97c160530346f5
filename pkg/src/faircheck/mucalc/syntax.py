"""Abstract syntax of the modal mu-calculus with regular modalities."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import reduce

from faircheck.lts import ActionSet


class FormulaError(ValueError):
    pass


# -- regular formulae ------------------------------------------------------


class Regular:
    __slots__ = ()

    def __str__(self):
        return format_regular(self)


@dataclass(frozen=True)
class Eps(Regular):
    pass


@dataclass(frozen=True)
class Acts(Regular):
    actions: ActionSet


@dataclass(frozen=True)
class Seq(Regular):
    left: Regular
    right: Regular


@dataclass(frozen=True)
class Alt(Regular):
    left: Regular
    right: Regular


@dataclass(frozen=True)
class Star(Regular):
    sub: Regular


def as_regular(x):
    if isinstance(x, Regular):
        return x
    return Acts(ActionSet.coerce(x))


def seq(*parts):
    """Concatenate regular formulae, dropping epsilons."""
    parts = [as_regular(p) for p in parts]
    parts = [p for p in parts if not isinstance(p, Eps)]
    if not parts:
        return Eps()
    return reduce(Seq, parts)


def alt(*parts):
    parts = [as_regular(p) for p in parts]
    if not parts:
        raise FormulaError("empty union of regular formulae")
    return reduce(Alt, parts)


def star(r):
    return Star(as_regular(r))


def power(r, i):
    return seq(*([r] * i))


# -- state formulae --------------------------------------------------------


class Formula:
    __slots__ = ()

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True)
class FF(Formula):
    pass


@dataclass(frozen=True)
class TT(Formula):
    pass


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    reg: Regular
    sub: Formula


@dataclass(frozen=True)
class Box(Formula):
    reg: Regular
    sub: Formula


@dataclass(frozen=True)
class Mu(Formula):
    var: str
    sub: Formula


@dataclass(frozen=True)
class Nu(Formula):
    var: str
    sub: Formula


def diamond(reg, sub):
    return Diamond(as_regular(reg), sub)


def box(reg, sub):
    return Box(as_regular(reg), sub)


def big_and(parts):
    parts = list(parts)
    return reduce(And, parts) if parts else TT()


def big_or(parts):
    parts = list(parts)
    return reduce(Or, parts) if parts else FF()


def children(f):
    if isinstance(f, (Not, Diamond, Box, Mu, Nu)):
        return (f.sub,)
    if isinstance(f, (Or, And, Implies)):
        return (f.left, f.right)
    return ()


def walk(f):
    yield f
    for c in children(f):
        yield from walk(c)


def free_vars(f):
    if isinstance(f, Var):
        return frozenset([f.name])
    if isinstance(f, (Mu, Nu)):
        return free_vars(f.sub) - {f.var}
    return frozenset().union(*(free_vars(c) for c in children(f)))


def is_closed(f):
    return not free_vars(f)


def var_names(f):
    names = set()
    for g in walk(f):
        if isinstance(g, Var):
            names.add(g.name)
        elif isinstance(g, (Mu, Nu)):
            names.add(g.var)
    return names


def action_labels(f):
    """All labels mentioned by action sets anywhere in ``f``."""
    out = set()

    def reg_labels(r):
        if isinstance(r, Acts):
            out.update(r.actions.members)
        elif isinstance(r, (Seq, Alt)):
            reg_labels(r.left)
            reg_labels(r.right)
        elif isinstance(r, Star):
            reg_labels(r.sub)

    for g in walk(f):
        if isinstance(g, (Diamond, Box)):
            reg_labels(g.reg)
    return out


def substitute(f, name, replacement):
    """Replace free occurrences of variable ``name``; ``replacement`` must be closed
    or have free variables not bound inside ``f``."""
    if isinstance(f, Var):
        return replacement if f.name == name else f
    if isinstance(f, (Mu, Nu)):
        if f.var == name:
            return f
        return type(f)(f.var, substitute(f.sub, name, replacement))
    if isinstance(f, Not):
        return Not(substitute(f.sub, name, replacement))
    if isinstance(f, (Or, And, Implies)):
        return type(f)(substitute(f.left, name, replacement), substitute(f.right, name, replacement))
    if isinstance(f, (Diamond, Box)):
        return type(f)(f.reg, substitute(f.sub, name, replacement))
    return f


# -- monotonicity ----------------------------------------------------------


@dataclass(frozen=True)
class MonotonicityViolation:
    variable: str
    path: tuple

    def __str__(self):
        return f"{self.variable} occurs under an odd number of negations at {' / '.join(self.path)}"


def check_syntactic_monotonicity(f):
    """Return the occurrences of fixpoint variables under an odd number of negations.

    An empty list means the formula is syntactically monotonic. Implication
    counts as a negation of its left operand; box and nu are neutral since
    their desugarings add two negations around the bound variable.
    """
    found = []

    def go(g, parity, path):
        # parity: variable name -> negation parity since its binder
        if isinstance(g, Var):
            if parity.get(g.name, 0) % 2:
                found.append(MonotonicityViolation(g.name, path + (g.name,)))
            return
        if isinstance(g, (Mu, Nu)):
            kw = "mu" if isinstance(g, Mu) else "nu"
            go(g.sub, {**parity, g.var: 0}, path + (f"{kw} {g.var}",))
        elif isinstance(g, Not):
            go(g.sub, {k: v + 1 for k, v in parity.items()}, path + ("!",))
        elif isinstance(g, Implies):
            go(g.left, {k: v + 1 for k, v in parity.items()}, path + ("=> left",))
            go(g.right, parity, path + ("=> right",))
        elif isinstance(g, (Or, And)):
            op = "||" if isinstance(g, Or) else "&&"
            go(g.left, parity, path + (f"{op} left",))
            go(g.right, parity, path + (f"{op} right",))
        elif isinstance(g, (Diamond, Box)):
            tag = f"<{g.reg}>" if isinstance(g, Diamond) else f"[{g.reg}]"
            go(g.sub, parity, path + (tag,))

    go(f, {}, ())
    return found


def is_monotonic(f):
    return not check_syntactic_monotonicity(f)


# -- renaming, expansion, simplification -----------------------------------


def fresh_names(avoid, base="Z"):
    for i in itertools.count(1):
        name = f"{base}{i}"
        if name not in avoid:
            yield name


def alpha_rename(f):
    """Rename binders so that every bound variable name is unique.

    The first binder of each name keeps it; later ones get a numeric suffix.
    """
    used = set(free_vars(f))

    def pick(name):
        if name not in used:
            used.add(name)
            return name
        base = re.sub(r"\d+$", "", name) or "X"
        for i in itertools.count(1):
            cand = f"{base}{i}"
            if cand not in used:
                used.add(cand)
                return cand

    def go(g, env):
        if isinstance(g, Var):
            return Var(env.get(g.name, g.name))
        if isinstance(g, (Mu, Nu)):
            new = pick(g.var)
            return type(g)(new, go(g.sub, {**env, g.var: new}))
        if isinstance(g, Not):
            return Not(go(g.sub, env))
        if isinstance(g, (Or, And, Implies)):
            return type(g)(go(g.left, env), go(g.right, env))
        if isinstance(g, (Diamond, Box)):
            return type(g)(g.reg, go(g.sub, env))
        return g

    return go(f, {})


def expand_regular_modalities(f, alphabet):
    """Rewrite every regular modality into single-action modalities and fixpoints."""
    names = fresh_names(var_names(f))
    alphabet = frozenset(alphabet)

    def dia(r, phi):
        if isinstance(r, Eps):
            return phi
        if isinstance(r, Acts):
            return big_or(Diamond(Acts(ActionSet.of(a)), phi) for a in sorted(r.actions.resolve(alphabet)))
        if isinstance(r, Seq):
            return dia(r.left, dia(r.right, phi))
        if isinstance(r, Alt):
            return Or(dia(r.left, phi), dia(r.right, phi))
        x = next(names)
        return Mu(x, Or(dia(r.sub, Var(x)), phi))

    def bx(r, phi):
        if isinstance(r, Eps):
            return phi
        if isinstance(r, Acts):
            return big_and(Box(Acts(ActionSet.of(a)), phi) for a in sorted(r.actions.resolve(alphabet)))
        if isinstance(r, Seq):
            return bx(r.left, bx(r.right, phi))
        if isinstance(r, Alt):
            return And(bx(r.left, phi), bx(r.right, phi))
        x = next(names)
        return Nu(x, And(bx(r.sub, Var(x)), phi))

    def go(g):
        if isinstance(g, Diamond):
            return dia(g.reg, go(g.sub))
        if isinstance(g, Box):
            return bx(g.reg, go(g.sub))
        if isinstance(g, (Mu, Nu)):
            return type(g)(g.var, go(g.sub))
        if isinstance(g, Not):
            return Not(go(g.sub))
        if isinstance(g, (Or, And, Implies)):
            return type(g)(go(g.left), go(g.right))
        return g

    return go(f)


def has_regular_modalities(f):
    for g in walk(f):
        if isinstance(g, (Diamond, Box)):
            if not (isinstance(g.reg, Acts) and not g.reg.actions.complemented
                    and len(g.reg.actions.members) == 1):
                return True
    return False


def _empty_language(r, alphabet):
    if isinstance(r, Acts):
        return alphabet is not None and r.actions.is_empty(alphabet)
    if isinstance(r, Seq):
        return _empty_language(r.left, alphabet) or _empty_language(r.right, alphabet)
    if isinstance(r, Alt):
        return _empty_language(r.left, alphabet) and _empty_language(r.right, alphabet)
    return False


def simplify(f, alphabet=None):
    """Constant folding: empty modalities, tt/ff units, vacuous fixpoints.

    Without an alphabet, only literally empty action sets count as empty.
    """
    alphabet = None if alphabet is None else frozenset(alphabet)

    def empty(r):
        if alphabet is None:
            return isinstance(r, Acts) and not r.actions.complemented and not r.actions.members \
                or isinstance(r, Seq) and (empty(r.left) or empty(r.right))
        return _empty_language(r, alphabet)

    def go(g):
        if isinstance(g, Not):
            s = go(g.sub)
            if isinstance(s, TT):
                return FF()
            if isinstance(s, FF):
                return TT()
            return Not(s)
        if isinstance(g, Or):
            a, b = go(g.left), go(g.right)
            if isinstance(a, TT) or isinstance(b, TT):
                return TT()
            if isinstance(a, FF):
                return b
            if isinstance(b, FF):
                return a
            return Or(a, b)
        if isinstance(g, And):
            a, b = go(g.left), go(g.right)
            if isinstance(a, FF) or isinstance(b, FF):
                return FF()
            if isinstance(a, TT):
                return b
            if isinstance(b, TT):
                return a
            return And(a, b)
        if isinstance(g, Implies):
            a, b = go(g.left), go(g.right)
            if isinstance(a, FF) or isinstance(b, TT):
                return TT()
            if isinstance(a, TT):
                return b
            return Implies(a, b)
        if isinstance(g, Diamond):
            s = go(g.sub)
            if isinstance(g.reg, Eps):
                return s
            if isinstance(s, FF) or empty(g.reg):
                return FF()
            return Diamond(g.reg, s)
        if isinstance(g, Box):
            s = go(g.sub)
            if isinstance(g.reg, Eps):
                return s
            if isinstance(s, TT) or empty(g.reg):
                return TT()
            return Box(g.reg, s)
        if isinstance(g, (Mu, Nu)):
            s = go(g.sub)
            if g.var not in free_vars(s):
                return s
            return type(g)(g.var, s)
        return g

    return go(f)


# -- printing --------------------------------------------------------------

KEYWORDS = {"ff", "tt", "mu", "nu", "eps"}
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


def format_label(label):
    if _IDENT.match(label) and label not in KEYWORDS:
        return label
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_action_set(s):
    inner = ",".join(format_label(a) for a in sorted(s.members))
    return ("!" if s.complemented else "") + "{" + inner + "}"


def format_regular(r, level=0):
    # levels: 0 union, 1 concatenation, 2 postfix star
    if isinstance(r, Eps):
        return "eps"
    if isinstance(r, Acts):
        s = r.actions
        if not s.complemented and len(s.members) == 1:
            return format_label(next(iter(s.members)))
        return format_action_set(s)
    if isinstance(r, Alt):
        text = f"{format_regular(r.left, 0)} + {format_regular(r.right, 1)}"
        return text if level <= 0 else f"({text})"
    if isinstance(r, Seq):
        text = f"{format_regular(r.left, 1)} . {format_regular(r.right, 2)}"
        return text if level <= 1 else f"({text})"
    if isinstance(r, Star):
        return f"{format_regular(r.sub, 3)}*"
    raise TypeError(r)


def format_formula(f, level=0):
    # levels: 0 binder, 1 implication, 2 disjunction, 3 conjunction, 4 prefix
    if isinstance(f, FF):
        return "ff"
    if isinstance(f, TT):
        return "tt"
    if isinstance(f, Var):
        return f.name
    if isinstance(f, (Mu, Nu)):
        kw = "mu" if isinstance(f, Mu) else "nu"
        text = f"{kw} {f.var}. {format_formula(f.sub, 0)}"
        return text if level <= 0 else f"({text})"
    if isinstance(f, Implies):
        text = f"{format_formula(f.left, 2)} => {format_formula(f.right, 1)}"
        return text if level <= 1 else f"({text})"
    if isinstance(f, Or):
        text = f"{format_formula(f.left, 2)} || {format_formula(f.right, 3)}"
        return text if level <= 2 else f"({text})"
    if isinstance(f, And):
        text = f"{format_formula(f.left, 3)} && {format_formula(f.right, 4)}"
        return text if level <= 3 else f"({text})"
    if isinstance(f, Not):
        return "!" + format_formula(f.sub, 4)
    if isinstance(f, Diamond):
        return f"<{format_regular(f.reg)}>" + format_formula(f.sub, 4)
    if isinstance(f, Box):
        return f"[{format_regular(f.reg)}]" + format_formula(f.sub, 4)
    raise TypeError(f)
