"""Parents for Haar-random three-qubit states: route counts and fidelities."""
import argparse
from collections import Counter

import numpy as np

from parentham.constructors import acin_decompose, haar_state, three_qubit_parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    routes = Counter()
    fid, gaps, ts = [], [], []
    for _ in range(args.count):
        a, _ = acin_decompose(haar_state(8, rng))
        res = three_qubit_parent(a)
        routes[res.route] += 1
        fid.append(res.report.overlap)
        gaps.append(res.report.gap)
        if res.t is not None:
            ts.append(res.t)
    print(f"{args.count} states; routes {dict(routes)}")
    print(f"worst fidelity {min(fid):.14f}")
    print(f"gap: min {min(gaps):.3e}, median {np.median(gaps):.3e}")
    if ts:
        print(f"t*: median {np.median(ts):.3e}, max {max(ts):.3e}")


if __name__ == "__main__":
    main()
