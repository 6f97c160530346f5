from faircheck.mucalc.syntax import (  # noqa: F401
    FF, TT, Acts, Alt, And, Box, Diamond, Eps, Formula, FormulaError, Implies, Mu,
    MonotonicityViolation, Not, Nu, Or, Regular, Seq, Star, Var, alpha_rename, alt,
    as_regular, big_and, big_or, box, check_syntactic_monotonicity, diamond,
    expand_regular_modalities, format_formula, format_regular, free_vars, is_closed,
    is_monotonic, power, seq, simplify, star, substitute, walk,
)
from faircheck.mucalc.parser import FormulaSyntaxError, parse_formula, parse_regular  # noqa: F401
from faircheck.mucalc.semantics import (  # noqa: F401
    EvaluationError, evaluate, least_fixpoint_approximant, satisfies,
)
