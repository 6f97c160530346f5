"""Liveness patterns, violation templates and the criterion formulae built from them."""
from __future__ import annotations

import itertools
import os
import re
import warnings
from dataclasses import dataclass, field

from faircheck.lts import ActionSet, ConcurrencyRelation
from faircheck.mucalc import (
    FF, TT, Acts, And, Box, Diamond, Eps, Implies, Mu, Not, Nu, Or, Var, alpha_rename,
    alt, big_and, big_or, power, seq, star,
)
from faircheck.mucalc.parser import FormulaSyntaxError, parse_formula

SCOPES = ("global", "until", "after", "after-until")
BEHAVIOURS = ("existence", "existence-at-least", "response", "chain-response")
CRITERIA = ("progress", "ja", "wfa", "whfa", "sfa", "shfa")
DEFAULT_SUBSET_CAP = 12


class TemplateError(ValueError):
    pass


class SubsetCapExceeded(TemplateError):
    def __init__(self, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(
            f"{count} non-blocking actions would need {2 ** count - 1} subset disjuncts; "
            f"the cap is {cap} actions"
        )


class DegenerateTemplateWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PatternSpec:
    scope: str
    behaviour: str
    k: int = 1
    sa: ActionSet = ActionSet()
    sb: ActionSet = ActionSet()
    sq: ActionSet = ActionSet()
    sr: ActionSet = ActionSet()
    chain_q: tuple = ()
    chain_r: tuple = ()

    def __post_init__(self):
        if self.scope not in SCOPES:
            raise TemplateError(f"unknown scope {self.scope!r}; expected one of {', '.join(SCOPES)}")
        if self.behaviour not in BEHAVIOURS:
            raise TemplateError(
                f"unknown behaviour {self.behaviour!r}; expected one of {', '.join(BEHAVIOURS)}")
        if self.k < 1:
            raise TemplateError("k must be at least 1")
        for name in ("sa", "sb", "sq", "sr"):
            object.__setattr__(self, name, ActionSet.coerce(getattr(self, name)))
        object.__setattr__(self, "chain_q", tuple(ActionSet.coerce(s) for s in self.chain_q))
        object.__setattr__(self, "chain_r", tuple(ActionSet.coerce(s) for s in self.chain_r))
        if self.behaviour == "chain-response" and (not self.chain_q or not self.chain_r):
            raise TemplateError("chain response needs non-empty chain_q and chain_r")

    def used_sets(self):
        sets = []
        if self.scope in ("after", "after-until"):
            sets.append(self.sa)
        if self.scope in ("until", "after-until"):
            sets.append(self.sb)
        if self.behaviour == "chain-response":
            sets.extend(self.chain_q + self.chain_r)
        else:
            sets.append(self.sr)
            if self.behaviour == "response":
                sets.append(self.sq)
        return sets


@dataclass(frozen=True)
class ViolationTemplate:
    """Paths with a prefix in L(rho) followed by a suffix that is alpha_f-free
    up to the first alpha_e action."""

    rho: object
    alpha_f: ActionSet
    alpha_e: ActionSet = ActionSet()

    def __post_init__(self):
        object.__setattr__(self, "alpha_f", ActionSet.coerce(self.alpha_f))
        object.__setattr__(self, "alpha_e", ActionSet.coerce(self.alpha_e))

    def is_degenerate(self, alphabet=None):
        if alphabet is None:
            return not self.alpha_f.complemented and not self.alpha_f.members
        return self.alpha_f.is_empty(alphabet)

    def __str__(self):
        return f"rho={self.rho} alpha_f={self.alpha_f} alpha_e={self.alpha_e}"


def _check_within(sets, alphabet):
    alphabet = frozenset(alphabet)
    for s in sets:
        unknown = s.members - alphabet
        if unknown:
            raise TemplateError(f"actions {sorted(unknown)} are not in the alphabet")


def instantiate_pattern(spec, alphabet):
    """The violation templates whose joint absence expresses ``spec``."""
    _check_within(spec.used_sets(), alphabet)
    everything = ActionSet.everything()
    if spec.scope == "global":
        rho_s, alpha_e = Eps(), ActionSet()
    elif spec.scope == "until":
        rho_s, alpha_e = Eps(), spec.sb
    elif spec.scope == "after":
        rho_s, alpha_e = seq(star(~spec.sa), spec.sa), ActionSet()
    else:
        rho_s, alpha_e = seq(star(everything), spec.sa), spec.sb

    not_e = ~alpha_e
    if spec.behaviour == "existence":
        return [ViolationTemplate(rho_s, spec.sr, alpha_e)]
    if spec.behaviour == "existence-at-least":
        unit = seq(star(~(alpha_e | spec.sr)), spec.sr)
        rho_b = alt(*(power(unit, i) for i in range(spec.k)))
        return [ViolationTemplate(seq(rho_s, rho_b), spec.sr, alpha_e)]
    if spec.behaviour == "response":
        return [ViolationTemplate(seq(rho_s, star(not_e), spec.sq), spec.sr, alpha_e)]

    templates = []
    for i, forbidden in enumerate(spec.chain_r):
        chain = spec.chain_q + spec.chain_r[:i]
        parts = [star(not_e), chain[0]]
        for s in chain[1:]:
            parts += [star(~(alpha_e | s)), s]
        templates.append(ViolationTemplate(seq(rho_s, *parts), forbidden, alpha_e))
    return templates


# -- criteria --------------------------------------------------------------


@dataclass(frozen=True)
class FinitelyRealisableSpec:
    """Per non-blocking action: when it is on, when it is off, and what eliminates it."""

    phi_on: dict
    phi_of: dict
    alpha_el: dict

    def domain(self):
        return frozenset(self.phi_on)


@dataclass(frozen=True)
class CriterionSpec:
    kind: str
    blocking: ActionSet = ActionSet()
    conc: ConcurrencyRelation = None
    realisable: FinitelyRealisableSpec = None
    phi_of: dict = None

    KINDS = CRITERIA + ("generic", "generic-strong")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise TemplateError(f"unknown criterion {self.kind!r}")
        object.__setattr__(self, "blocking", ActionSet.coerce(self.blocking))
        if self.kind == "ja" and self.conc is None:
            object.__setattr__(self, "conc", ConcurrencyRelation())
        if self.kind == "generic" and self.realisable is None:
            raise TemplateError("the generic criterion needs a finitely realisable spec")
        if self.kind == "generic-strong" and self.phi_of is None:
            raise TemplateError("the generic strong criterion needs a phi_of map")

    @property
    def is_strong(self):
        return self.kind in ("sfa", "shfa", "generic-strong")

    def non_blocking(self, alphabet):
        return sorted(self.blocking.complement().resolve(alphabet))


def wfa_spec(blocking, alphabet):
    nb = sorted(ActionSet.coerce(blocking).complement().resolve(alphabet))
    return FinitelyRealisableSpec(
        {a: Diamond(Acts(ActionSet.of(a)), TT()) for a in nb},
        {a: Box(Acts(ActionSet.of(a)), FF()) for a in nb},
        {a: ActionSet.of(a) for a in nb},
    )


def whfa_spec(blocking, alphabet):
    blocking = ActionSet.coerce(blocking)
    nb = sorted(blocking.complement().resolve(alphabet))

    def reach(a):
        return seq(star(~blocking), a)

    return FinitelyRealisableSpec(
        {a: Diamond(reach(a), TT()) for a in nb},
        {a: Box(reach(a), FF()) for a in nb},
        {a: ActionSet.of(a) for a in nb},
    )


def ja_spec(blocking, alphabet, conc):
    nb = sorted(ActionSet.coerce(blocking).complement().resolve(alphabet))
    return FinitelyRealisableSpec(
        {a: Diamond(Acts(ActionSet.of(a)), TT()) for a in nb},
        {a: FF() for a in nb},
        {a: ActionSet(conc.eliminators(a, alphabet)) for a in nb},
    )


def sfa_phi_of(blocking, alphabet):
    nb = sorted(ActionSet.coerce(blocking).complement().resolve(alphabet))
    return {b: Box(Acts(ActionSet.of(b)), FF()) for b in nb}


def shfa_phi_of(blocking, alphabet):
    blocking = ActionSet.coerce(blocking)
    nb = sorted(blocking.complement().resolve(alphabet))
    return {b: Box(seq(star(~blocking), b), FF()) for b in nb}


def realisable_spec_for(criterion, alphabet):
    if criterion.kind == "wfa":
        return wfa_spec(criterion.blocking, alphabet)
    if criterion.kind == "whfa":
        return whfa_spec(criterion.blocking, alphabet)
    if criterion.kind == "ja":
        return ja_spec(criterion.blocking, alphabet, criterion.conc)
    if criterion.kind == "generic":
        return criterion.realisable
    raise TemplateError(f"{criterion.kind} is not a finitely realisable criterion")


def strong_phi_of_for(criterion, alphabet):
    if criterion.kind == "sfa":
        return sfa_phi_of(criterion.blocking, alphabet)
    if criterion.kind == "shfa":
        return shfa_phi_of(criterion.blocking, alphabet)
    if criterion.kind == "generic-strong":
        return criterion.phi_of
    raise TemplateError(f"{criterion.kind} is not a strong criterion")


# -- formula builders ------------------------------------------------------


def _warn_if_degenerate(t, alphabet=None):
    if t.is_degenerate(alphabet):
        warnings.warn(
            f"template {t} has an empty alpha_f: every matching complete path violates it",
            DegenerateTemplateWarning, stacklevel=3)


def build_progress_formula(t, blocking):
    """No progressing path that matches rho and then avoids alpha_f up to alpha_e."""
    _warn_if_degenerate(t)
    blocking = ActionSet.coerce(blocking)
    x = Var("X")
    body = big_or([
        Diamond(Acts(t.alpha_e), TT()),
        Box(Acts(~blocking), FF()),
        Diamond(Acts(~t.alpha_f), x),
    ])
    return Not(Diamond(t.rho, Nu("X", body)))


def build_finitely_realisable_formula(t, blocking, spec, alphabet):
    blocking = ActionSet.coerce(blocking)
    nb = sorted(blocking.complement().resolve(alphabet))
    for part in (spec.phi_on, spec.phi_of, spec.alpha_el):
        if set(part) != set(nb):
            raise TemplateError(
                f"finitely realisable spec is defined on {sorted(part)}, "
                f"but the non-blocking actions are {nb}")
    _warn_if_degenerate(t, alphabet)
    x = Var("X")
    conjuncts = []
    for a in nb:
        eliminate = big_or([
            Diamond(Acts(t.alpha_e), TT()),
            And(spec.phi_of[a], x),
            Diamond(Acts(spec.alpha_el[a] - t.alpha_f), x),
        ])
        conjuncts.append(Implies(spec.phi_on[a], Diamond(star(~t.alpha_f), eliminate)))
    return alpha_rename(Not(Diamond(t.rho, Nu("X", big_and(conjuncts)))))


def nonempty_subsets(actions):
    """Non-empty subsets in canonical order: by size, then lexicographically."""
    actions = sorted(actions)
    for r in range(1, len(actions) + 1):
        yield from itertools.combinations(actions, r)


def build_strong_formula(t, blocking, phi_of, alphabet, subset_cap=DEFAULT_SUBSET_CAP):
    blocking = ActionSet.coerce(blocking)
    nb = sorted(blocking.complement().resolve(alphabet))
    if set(phi_of) != set(nb):
        raise TemplateError(
            f"phi_of is defined on {sorted(phi_of)}, but the non-blocking actions are {nb}")
    if len(nb) > subset_cap:
        raise SubsetCapExceeded(len(nb), subset_cap)
    _warn_if_degenerate(t, alphabet)
    not_f = ~t.alpha_f
    disjuncts = [Diamond(Acts(t.alpha_e), TT()), Box(Acts(~blocking), FF())]
    for chosen in nonempty_subsets(nb):
        off = big_and(phi_of[b] for b in nb if b not in chosen)
        per_action = []
        for a in chosen:
            step = Or(Diamond(Acts(ActionSet.of(a) - t.alpha_f), Var("X")),
                      Diamond(Acts(not_f), Var("W")))
            per_action.append(Mu("W", And(off, step)))
        disjuncts.append(Nu("X", big_and(per_action)))
    return alpha_rename(Not(Diamond(seq(t.rho, star(not_f)), big_or(disjuncts))))


def build_criterion_formula(t, criterion, alphabet, subset_cap=DEFAULT_SUBSET_CAP):
    if criterion.kind == "progress":
        return build_progress_formula(t, criterion.blocking)
    if criterion.is_strong:
        return build_strong_formula(t, criterion.blocking, strong_phi_of_for(criterion, alphabet),
                                    alphabet, subset_cap)
    return build_finitely_realisable_formula(
        t, criterion.blocking, realisable_spec_for(criterion, alphabet), alphabet)


def build_property_formula(templates, criterion, alphabet, subset_cap=DEFAULT_SUBSET_CAP):
    """Conjunction of the per-template formulae (one template gives one formula)."""
    parts = [build_criterion_formula(t, criterion, alphabet, subset_cap) for t in templates]
    return alpha_rename(big_and(parts))


# -- property files --------------------------------------------------------


class PropertyFormatError(TemplateError):
    def __init__(self, message, path=None, lineno=None):
        self.path = path
        self.lineno = lineno
        where = ":".join(str(x) for x in (path, lineno) if x is not None)
        super().__init__(f"{where}: {message}" if where else message)


@dataclass
class PropertySpec:
    pattern: PatternSpec = None
    formula: object = None
    criterion: str = "progress"
    blocking: ActionSet = field(default_factory=ActionSet)
    interference: list = None
    source: str = None

    def criterion_spec(self, alphabet, blocking=None):
        blocking = self.blocking if blocking is None else ActionSet.coerce(blocking)
        conc = None
        if self.criterion == "ja":
            conc = ConcurrencyRelation.from_interference(alphabet, self.interference or [])
        return CriterionSpec(self.criterion, blocking, conc=conc)


_LABEL_TOKEN = re.compile(r'\s*(?:"((?:[^"\\]|\\.)*)"|([^,;"\s]+))\s*')


def parse_label_list(text, where=None):
    """Parse ``"a", "b"`` (or bare ``a, b``) into an ActionSet; empty text gives the empty set."""
    text = text.strip()
    if text in ("", '""'):
        return ActionSet()
    labels = []
    pos = 0
    while pos < len(text):
        m = _LABEL_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PropertyFormatError(f"cannot read an action label in {text!r}", *(where or ()))
        if m.group(1) is not None:
            label = re.sub(r"\\(.)", r"\1", m.group(1))
            if not label:
                raise PropertyFormatError(f"empty action label in {text!r}", *(where or ()))
        else:
            label = m.group(2)
        labels.append(label)
        pos = m.end()
        if pos < len(text):
            if text[pos] != ",":
                raise PropertyFormatError(f"expected ',' in {text!r}", *(where or ()))
            pos += 1
    return ActionSet(frozenset(labels))


_KEYS = {"scope", "behaviour", "behavior", "k", "sa", "sb", "sq", "sr", "chain_q", "chain_r",
         "criterion", "blocking", "concurrency_file", "formula"}


def parse_property(text, path=None):
    values = {}
    lines = {}
    for lineno, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise PropertyFormatError(f"expected 'key = value', found {line!r}", path, lineno)
        key, value = line.split("=", 1)
        key = key.strip().lower()
        if key not in _KEYS:
            raise PropertyFormatError(f"unknown key {key!r}", path, lineno)
        if key == "behavior":
            key = "behaviour"
        value = value.strip()
        if key != "formula":
            value = _strip_comment(value)
        values[key] = value
        lines[key] = lineno

    def where(key):
        return (path, lines.get(key))

    spec = PropertySpec(source=path)
    if "criterion" in values:
        crit = values["criterion"].lower()
        if crit not in CRITERIA:
            raise PropertyFormatError(
                f"unknown criterion {crit!r}; expected one of {', '.join(CRITERIA)}", *where("criterion"))
        spec.criterion = crit
    if "blocking" in values:
        spec.blocking = parse_label_list(values["blocking"], where("blocking"))
    if "concurrency_file" in values:
        conc_path = values["concurrency_file"].strip('"')
        if path is not None and not os.path.isabs(conc_path):
            conc_path = os.path.join(os.path.dirname(path), conc_path)
        try:
            with open(conc_path, encoding="utf-8") as fh:
                spec.interference = parse_interference(fh.read(), conc_path)
        except OSError as exc:
            raise PropertyFormatError(f"cannot read concurrency file: {exc}", *where("concurrency_file"))

    if "formula" in values:
        if "scope" in values or "behaviour" in values:
            raise PropertyFormatError("a property has either a formula or a pattern, not both",
                                      *where("formula"))
        try:
            spec.formula = parse_formula(values["formula"])
        except FormulaSyntaxError as exc:
            raise PropertyFormatError(f"bad formula: {exc}", *where("formula")) from None
        return spec

    for key in ("scope", "behaviour"):
        if key not in values:
            raise PropertyFormatError(f"missing {key!r} (or a raw 'formula')", path)
    kwargs = {"scope": values["scope"], "behaviour": values["behaviour"]}
    if "k" in values:
        try:
            kwargs["k"] = int(values["k"])
        except ValueError:
            raise PropertyFormatError(f"k must be an integer, got {values['k']!r}", *where("k")) from None
    for key in ("sa", "sb", "sq", "sr"):
        if key in values:
            kwargs[key] = parse_label_list(values[key], where(key))
    for key in ("chain_q", "chain_r"):
        if key in values:
            kwargs[key] = tuple(parse_label_list(part, where(key)) for part in values[key].split(";"))
    try:
        spec.pattern = PatternSpec(**kwargs)
    except TemplateError as exc:
        raise PropertyFormatError(str(exc), *where("behaviour")) from None
    return spec


def _strip_comment(value):
    out = []
    quoted = False
    for c in value:
        if c == '"':
            quoted = not quoted
        if c == "#" and not quoted:
            break
        out.append(c)
    return "".join(out).strip()


def load_property(path):
    with open(path, encoding="utf-8") as fh:
        return parse_property(fh.read(), path)


def parse_interference(text, path=None):
    """Read ``a !| b`` lines: ``a`` is not concurrent with ``b`` (``b`` eliminates ``a``)."""
    pairs = []
    for lineno, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        if "!|" not in line:
            raise PropertyFormatError(f"expected 'a !| b', found {line!r}", path, lineno)
        left, right = line.split("!|", 1)
        a = parse_label_list(left, (path, lineno)).members
        b = parse_label_list(right, (path, lineno)).members
        if len(a) != 1 or len(b) != 1:
            raise PropertyFormatError("each side of '!|' must be a single label", path, lineno)
        pairs.append((next(iter(a)), next(iter(b))))
    return pairs
