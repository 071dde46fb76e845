"""Run every example scenario and print its checks."""
import argparse
import sys

from parentham.demos import DEMOS, run_demo


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=list(DEMOS), help="subset of scenarios")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    failed = []
    for name in args.names:
        rep = run_demo(name, args.seed)
        print(rep.text())
        print()
        if not rep.passed:
            failed.append(name)
    print("all scenarios passed" if not failed else f"failed: {', '.join(failed)}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
