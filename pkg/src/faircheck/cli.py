"""Command-line interface: ``faircheck {check,generate,validate-conc,check-trace,crossval}``."""
from __future__ import annotations

import argparse
import os
import sys

from faircheck.harness import HarnessConfig, run_harness
from faircheck.lts import ConcurrencyRelation, LTSError, load_aut, validate_concurrency_relation
from faircheck.mucalc import FormulaError, format_formula, satisfies, simplify
from faircheck.oracle import OracleBudgetExceeded, SearchBounds, cross_validate
from faircheck.predicates import (
    check_criterion, is_violating, parse_trace, satisfies_progress,
)
from faircheck.templates import (
    CRITERIA, DEFAULT_SUBSET_CAP, CriterionSpec, PropertyFormatError, SubsetCapExceeded,
    TemplateError, build_property_formula, instantiate_pattern, load_property,
    parse_interference, parse_label_list,
)

EXIT_SATISFIED, EXIT_VIOLATED, EXIT_INPUT, EXIT_RESOURCE, EXIT_DISAGREE = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def _located(path, exc):
    """``file:line: message`` when the error knows its line, else ``file: message``."""
    lineno = getattr(exc, "lineno", None)
    if lineno is not None:
        return InputError(f"{path}:{lineno}: {getattr(exc, 'detail', exc)}")
    return InputError(f"{path}: {exc}")


class Output:
    def __init__(self, stream, porcelain=False, color=None):
        self.stream = stream
        self.porcelain = porcelain
        if color is None:
            env = os.environ.get("FAIRCHECK_COLOR")
            color = env == "1" if env in ("0", "1") else stream.isatty()
        self.color = color and not porcelain

    def line(self, text=""):
        print(text, file=self.stream)

    def field(self, key, value, human=None):
        if self.porcelain:
            self.line(f"{key}\t{value}")
        else:
            self.line(human if human is not None else f"{key}: {value}")

    def verdict(self, ok, yes="SATISFIED", no="VIOLATED"):
        word = yes if ok else no
        if self.porcelain:
            self.line(f"verdict\t{word}")
        elif self.color:
            self.line(f"\033[{32 if ok else 31}m{word}\033[0m")
        else:
            self.line(word)


def _load_lts(path):
    try:
        return load_aut(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except LTSError as exc:
        raise _located(path, exc) from None


def _load_property(path):
    try:
        return load_property(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _blocking(args, prop):
    if args.blocking is None:
        return prop.blocking
    return parse_label_list(args.blocking, ("--blocking", None))


def _bounds(args, lts):
    default = SearchBounds.default(lts)
    return SearchBounds(args.bounds_stem if args.bounds_stem is not None else default.max_stem,
                        args.bounds_cycle if args.bounds_cycle is not None else default.max_cycle)


def _property_formula(lts, prop, args):
    """The formula for a property file plus its templates and criterion (None for raw formulae)."""
    if prop.formula is not None:
        return prop.formula, None, None
    criterion = prop.criterion_spec(lts.alphabet, _blocking(args, prop))
    templates = instantiate_pattern(prop.pattern, lts.alphabet)
    formula = build_property_formula(templates, criterion, lts.alphabet, args.subset_cap)
    return formula, templates, criterion


def cmd_check(args, out):
    lts = _load_lts(args.lts)
    prop = _load_property(args.property)
    formula, templates, criterion = _property_formula(lts, prop, args)
    if args.simplify:
        formula = simplify(formula, lts.alphabet)
    if criterion is not None and criterion.kind == "ja":
        _require_valid(lts, criterion.conc)
    try:
        ok = satisfies(lts, formula)
    except FormulaError as exc:
        raise InputError(f"{args.property}: {exc}") from None
    out.verdict(ok)
    out.field("formula", format_formula(formula))
    if criterion is not None:
        out.field("criterion", criterion.kind)
        out.field("blocking", ",".join(sorted(criterion.blocking.members)) or "-")
    if not args.with_oracle:
        return EXIT_SATISFIED if ok else EXIT_VIOLATED
    if templates is None:
        out.field("oracle", "not applicable to raw formulae")
        return EXIT_SATISFIED if ok else EXIT_VIOLATED
    report = cross_validate(lts, templates, criterion, _bounds(args, lts), args.subset_cap)
    if report.counterexample is not None:
        out.field("oracle", "violating path found")
        out.field("witness", str(report.counterexample))
    else:
        note = "" if report.complete else " within the search bounds"
        out.field("oracle", "no violating path" + note)
    out.field("agreement", "yes" if report.agree else "no")
    if not report.agree:
        return EXIT_DISAGREE
    return EXIT_SATISFIED if ok else EXIT_VIOLATED


def _require_valid(lts, conc):
    report = validate_concurrency_relation(lts, conc)
    if not report.valid:
        raise InputError("concurrency relation is invalid: " + "; ".join(list(report.lines())[1:]))


def cmd_generate(args, out):
    lts = _load_lts(args.lts)
    prop = _load_property(args.property)
    formula, _, _ = _property_formula(lts, prop, args)
    if args.simplify:
        formula = simplify(formula, lts.alphabet)
    out.field("formula", format_formula(formula), human=format_formula(formula))
    return EXIT_SATISFIED


def _read_relation(path, lts):
    try:
        with open(path, encoding="utf-8") as fh:
            pairs = parse_interference(fh.read(), path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return ConcurrencyRelation.from_interference(lts.alphabet, pairs)


def cmd_validate_conc(args, out):
    lts = _load_lts(args.lts)
    conc = _read_relation(args.concurrency, lts)
    try:
        report = validate_concurrency_relation(lts, conc)
    except LTSError as exc:
        raise InputError(f"{args.concurrency}: {exc}") from None
    for i, line in enumerate(report.lines()):
        out.field("status" if i == 0 else "detail", line, human=line)
    return EXIT_SATISFIED if report.valid else EXIT_VIOLATED


def cmd_check_trace(args, out):
    lts = _load_lts(args.lts)
    try:
        with open(args.trace, encoding="utf-8") as fh:
            path = parse_trace(fh.read(), lts)
    except OSError as exc:
        raise InputError(f"{args.trace}: {exc.strerror}") from None
    except LTSError as exc:
        raise _located(args.trace, exc) from None
    prop = _load_property(args.property) if args.property else None
    if args.blocking is not None:
        blocking = parse_label_list(args.blocking, ("--blocking", None))
    else:
        blocking = prop.blocking if prop else parse_label_list("")
    conc = ConcurrencyRelation()
    if args.concurrency:
        conc = _read_relation(args.concurrency, lts)
    elif prop is not None and prop.interference is not None:
        conc = ConcurrencyRelation.from_interference(lts.alphabet, prop.interference)
    criteria = [c.strip() for c in args.criteria.split(",") if c.strip()]
    unknown = [c for c in criteria if c not in CRITERIA]
    if unknown:
        raise InputError(f"unknown criteria {', '.join(unknown)}; choose from {', '.join(CRITERIA)}")
    all_ok = True
    for name in criteria:
        crit = CriterionSpec(name, blocking, conc=conc if name == "ja" else None)
        verdict = satisfies_progress(lts, path, blocking) if name == "progress" \
            else check_criterion(lts, path, crit)
        all_ok &= verdict.holds
        out.field(name, str(verdict), human=f"{name}: {verdict}")
    if prop is not None and prop.pattern is not None:
        templates = instantiate_pattern(prop.pattern, lts.alphabet)
        violating = any(is_violating(path, t) for t in templates)
        out.field("violating", "yes" if violating else "no")
    return EXIT_SATISFIED if all_ok else EXIT_VIOLATED


def cmd_crossval(args, out):
    config = HarnessConfig()
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = HarnessConfig.parse(fh.read())
        except OSError as exc:
            raise InputError(f"{args.config}: {exc.strerror}") from None
        except ValueError as exc:
            raise InputError(f"{args.config}: {exc}") from None
    if args.seed is not None:
        config.seed = args.seed
    if args.instances is not None:
        config.instances = args.instances
    if args.bounds_stem is not None:
        config.bounds_stem = args.bounds_stem
    if args.bounds_cycle is not None:
        config.bounds_cycle = args.bounds_cycle
    summary = run_harness(config, emit=out.line)
    return EXIT_SATISFIED if summary.ok else EXIT_DISAGREE


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--blocking", help='comma-separated blocking actions, e.g. "a,b" ("" for none)')
    common.add_argument("--with-oracle", action="store_true",
                        help="also search for a violating path and compare (exit 4 on disagreement)")
    common.add_argument("--bounds-stem", type=int)
    common.add_argument("--bounds-cycle", type=int)
    common.add_argument("--subset-cap", type=int, default=DEFAULT_SUBSET_CAP,
                        help="largest number of non-blocking actions for strong criteria")
    common.add_argument("--simplify", action="store_true", help="fold constants in the formula")
    common.add_argument("--porcelain", action="store_true", help="print key<TAB>value lines")
    common.add_argument("--seed", type=int)

    parser = argparse.ArgumentParser(prog="faircheck", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="model-check a property")
    p.add_argument("lts")
    p.add_argument("property")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("generate", parents=[common], help="print the formula for a property")
    p.add_argument("lts")
    p.add_argument("property")
    p.set_defaults(run=cmd_generate)

    p = sub.add_parser("validate-conc", parents=[common], help="validate a concurrency relation")
    p.add_argument("lts")
    p.add_argument("concurrency")
    p.set_defaults(run=cmd_validate_conc)

    p = sub.add_parser("check-trace", parents=[common], help="evaluate criteria on a trace")
    p.add_argument("lts")
    p.add_argument("trace")
    p.add_argument("--criteria", default=",".join(CRITERIA))
    p.add_argument("--property", help="property file; adds a violating: line for patterns")
    p.add_argument("--concurrency", help="interference file used for ja")
    p.set_defaults(run=cmd_check_trace)

    p = sub.add_parser("crossval", parents=[common], help="random formula/oracle cross-validation")
    p.add_argument("config", nargs="?")
    p.add_argument("--instances", type=int)
    p.set_defaults(run=cmd_crossval)
    return parser


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_SATISFIED
    out = Output(stdout, porcelain=args.porcelain)
    try:
        return args.run(args, out)
    except (InputError, PropertyFormatError, TemplateError, FormulaError, LTSError) as exc:
        if isinstance(exc, SubsetCapExceeded):
            print(f"faircheck: resource guard: {exc}", file=stderr)
            return EXIT_RESOURCE
        print(f"faircheck: error: {exc}", file=stderr)
        return EXIT_INPUT
    except (OracleBudgetExceeded, RecursionError, MemoryError) as exc:
        print(f"faircheck: resource guard: {exc}", file=stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
