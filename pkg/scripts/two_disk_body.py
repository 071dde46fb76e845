"""Shadow of the two-qubit state body under H1 = X_2 + (I + Z_1)/2, H2 = Y_2.

Writes the sampled boundary and the catalog of non-exposed extreme points
as CSV, and optionally a plot when matplotlib is available.
"""
import argparse
from pathlib import Path

import numpy as np

from parentham.geometry2d import (
    catalog_csv,
    exposed_probe,
    nonexposed_catalog,
    sample_body,
    two_disk_observables,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--directions", type=int, default=3600)
    ap.add_argument("--probe-directions", type=int, default=100_000)
    ap.add_argument("--outdir", default="results/two_disk")
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    H1, H2 = two_disk_observables()
    body = sample_body(H1, H2, args.directions)
    print(f"hull area {body.area():.8f} (pi + 2 = {np.pi + 2:.8f})")
    (out / "boundary.csv").write_text(body.to_csv())

    cat = nonexposed_catalog(H1, H2, args.probe_directions)
    for e in cat:
        print(f"non-exposed extreme point ({e.x:+.8f}, {e.y:+.8f}) at theta {e.theta:.6f}")
    (out / "nonexposed.csv").write_text(catalog_csv(cat))
    r = exposed_probe(H1, H2, (-1.0, 0.0), n_directions=args.probe_directions)
    print(f"(-1, 0): {r.message}")

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        hull = body.hull()
        xy = hull.points[hull.vertices]
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.fill(xy[:, 0], xy[:, 1], alpha=0.3)
        ax.plot([e.x for e in cat], [e.y for e in cat], "ro", label="non-exposed")
        ax.set_aspect("equal")
        ax.set_xlabel("<H1>")
        ax.set_ylabel("<H2>")
        ax.legend()
        fig.savefig(out / "body.png", dpi=150, bbox_inches="tight")
        print(f"plot written to {out / 'body.png'}")


if __name__ == "__main__":
    main()
