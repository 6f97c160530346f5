"""Walk through inevitable delivery on the coffee machine under every criterion.

For each criterion this prints the formula verdict, the oracle's witness (if
any), and whether the two agree.
"""
from importlib.resources import files

from faircheck.lts import ConcurrencyRelation, load_aut
from faircheck.oracle import cross_validate
from faircheck.templates import CRITERIA, CriterionSpec, PatternSpec, instantiate_pattern

FIXTURES = files("faircheck") / "fixtures"


def main():
    lts = load_aut(str(FIXTURES / "coffee.aut"))
    templates = instantiate_pattern(
        PatternSpec("global", "response", sq="order", sr="deliver"), lts.alphabet)
    switching = ConcurrencyRelation.from_interference(lts.alphabet, [
        ("card", "to_cash"), ("to_cash", "card"), ("cash", "to_card"), ("to_card", "cash")])
    print(f"{'criterion':<10} {'formula':<10} {'agree':<6} witness")
    for kind in CRITERIA:
        crit = CriterionSpec(kind, conc=switching if kind == "ja" else None)
        report = cross_validate(lts, templates, crit)
        verdict = "holds" if report.formula_verdict else "violated"
        witness = report.counterexample if report.counterexample is not None else "-"
        print(f"{kind:<10} {verdict:<10} {str(report.agree):<6} {witness}")


if __name__ == "__main__":
    main()
