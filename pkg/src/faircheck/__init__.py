"""Checking liveness properties of LTSs under progress, justness and fairness assumptions."""
from faircheck.lts import LTS, ActionSet, ConcurrencyRelation, Lasso, Path, load_aut, parse_aut
from faircheck.templates import CriterionSpec, PatternSpec, ViolationTemplate, instantiate_pattern

__all__ = [
    "LTS", "ActionSet", "ConcurrencyRelation", "Lasso", "Path", "load_aut", "parse_aut",
    "CriterionSpec", "PatternSpec", "ViolationTemplate", "instantiate_pattern",
]
