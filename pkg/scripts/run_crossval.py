"""Run the formula/oracle cross-validation harness and write the report to a file.

    python3 scripts/run_crossval.py --seed 7 --instances 500 --out crossval.txt
"""
import argparse
import sys

from faircheck.harness import HarnessConfig, run_harness


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="key=value harness config file")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--instances", type=int)
    ap.add_argument("--max-states", type=int)
    ap.add_argument("--out", help="report file (default: stdout)")
    ap.add_argument("--quiet", action="store_true", help="only print DISAGREE lines and the summary")
    args = ap.parse_args()

    config = HarnessConfig()
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            config = HarnessConfig.parse(fh.read())
    for key in ("seed", "instances", "max_states"):
        value = getattr(args, key)
        if value is not None:
            setattr(config, key, value)

    sink = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout

    def emit(line):
        if not args.quiet or not line.startswith("AGREE"):
            print(line, file=sink)

    summary = run_harness(config, emit=emit)
    if args.out:
        sink.close()
        print(f"{summary.agree}/{summary.runs} agree; report in {args.out}")
    return 0 if summary.ok else 4


if __name__ == "__main__":
    sys.exit(main())
