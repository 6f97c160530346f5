"""Randomised cross-validation of formula verdicts against the oracle."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, fields

from faircheck.lts import LTS, ActionSet, ConcurrencyRelation, Transition, maximal_concurrency_relation
from faircheck.oracle import SearchBounds, cross_validate
from faircheck.templates import CRITERIA, PatternSpec, SCOPES, CriterionSpec, instantiate_pattern


@dataclass
class HarnessConfig:
    seed: int = 0
    instances: int = 200
    max_states: int = 5
    max_actions: int = 4
    max_transitions: int = 10
    criteria: tuple = CRITERIA
    bounds_stem: int = None
    bounds_cycle: int = None

    @classmethod
    def parse(cls, text):
        known = {f.name: f for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or key not in known:
                raise ValueError(f"line {lineno}: expected one of {', '.join(known)} = value")
            if key == "criteria":
                crits = tuple(c.strip() for c in value.split(",") if c.strip())
                unknown = set(crits) - set(CRITERIA)
                if unknown:
                    raise ValueError(f"line {lineno}: unknown criteria {sorted(unknown)}")
                values[key] = crits
            else:
                try:
                    values[key] = int(value)
                except ValueError:
                    raise ValueError(f"line {lineno}: {key} must be an integer") from None
        return cls(**values)


def random_lts(rng, max_states=5, max_actions=4, max_transitions=10):
    """A random LTS in which every state is reachable from state 0."""
    n = rng.randint(1, max_states)
    labels = "abcdefghijklmnopqrstuvwxyz"[:rng.randint(1, max_actions)]
    trans = set()
    for s in range(1, n):
        trans.add(Transition(rng.randrange(s), rng.choice(labels), s))
    budget = rng.randint(len(trans), max(len(trans), max_transitions))
    tries = 0
    while len(trans) < budget and tries < 100:
        tries += 1
        trans.add(Transition(rng.randrange(n), rng.choice(labels), rng.randrange(n)))
    return LTS(n, 0, tuple(sorted(trans)), frozenset(labels))


def random_action_set(rng, alphabet, nonempty=False):
    alphabet = sorted(alphabet)
    while True:
        chosen = frozenset(a for a in alphabet if rng.random() < 0.4)
        if chosen or not nonempty:
            return ActionSet(chosen)


def random_pattern(rng, alphabet):
    scope = rng.choice(SCOPES)
    behaviour = rng.choice(["existence", "existence-at-least", "response", "chain-response"])
    pick = lambda: random_action_set(rng, alphabet, nonempty=True)  # noqa: E731
    kwargs = dict(scope=scope, behaviour=behaviour, sa=pick(), sb=pick(), sq=pick(), sr=pick())
    if behaviour == "existence-at-least":
        kwargs["k"] = rng.randint(1, 3)
    if behaviour == "chain-response":
        kwargs["chain_q"] = tuple(pick() for _ in range(rng.randint(1, 2)))
        kwargs["chain_r"] = tuple(pick() for _ in range(rng.randint(1, 2)))
    return PatternSpec(**kwargs)


def random_concurrency(rng, lts):
    """A random subset of the largest valid concurrency relation (so it is valid too)."""
    pairs = maximal_concurrency_relation(lts).pairs
    return ConcurrencyRelation(frozenset(p for p in sorted(pairs) if rng.random() < 0.5))


@dataclass
class Instance:
    index: int
    lts: LTS
    pattern: PatternSpec
    criterion: CriterionSpec
    label: str


def generate_instances(config):
    """Each random LTS and pattern is checked under every criterion, with B
    empty and with one random non-empty B; justness gets the empty relation
    and one random valid relation."""
    rng = random.Random(config.seed)
    for index in range(config.instances):
        lts = random_lts(rng, config.max_states, config.max_actions, config.max_transitions)
        pattern = random_pattern(rng, lts.alphabet)
        blockings = [ActionSet(), random_action_set(rng, lts.alphabet, nonempty=True)]
        conc = random_concurrency(rng, lts)
        for crit in config.criteria:
            for bi, blocking in enumerate(blockings):
                relations = [ConcurrencyRelation(), conc] if crit == "ja" else [None]
                for ri, rel in enumerate(relations):
                    label = f"{crit} B={'empty' if bi == 0 else blocking}"
                    if crit == "ja":
                        label += " conc=" + ("empty" if ri == 0 else "random")
                    yield Instance(index, lts, pattern, CriterionSpec(crit, blocking, conc=rel), label)


@dataclass
class HarnessSummary:
    runs: int = 0
    agree: int = 0
    disagree: int = 0
    cut_off: int = 0
    seconds: float = 0.0

    @property
    def ok(self):
        return self.disagree == 0


def run_harness(config, emit=print):
    summary = HarnessSummary()
    t0 = time.perf_counter()
    for inst in generate_instances(config):
        bounds = SearchBounds.default(inst.lts)
        if config.bounds_stem is not None or config.bounds_cycle is not None:
            bounds = SearchBounds(config.bounds_stem or bounds.max_stem,
                                  config.bounds_cycle or bounds.max_cycle)
        templates = instantiate_pattern(inst.pattern, inst.lts.alphabet)
        report = cross_validate(inst.lts, templates, inst.criterion, bounds)
        summary.runs += 1
        summary.agree += report.agree
        summary.disagree += not report.agree
        summary.cut_off += not report.complete
        tag = "AGREE" if report.agree else "DISAGREE"
        emit(f"{tag} instance={inst.index} states={inst.lts.num_states} "
             f"transitions={len(inst.lts.transitions)} pattern={inst.pattern.scope}/"
             f"{inst.pattern.behaviour} {inst.label} formula={report.formula_verdict} "
             f"oracle={report.oracle_verdict}" + ("" if report.complete else " (search cut off by bounds)"))
    summary.seconds = time.perf_counter() - t0
    emit(f"summary: {summary.agree}/{summary.runs} agree, {summary.disagree} disagree, "
         f"{summary.cut_off} hit the search bounds, {summary.seconds:.1f}s")
    return summary
