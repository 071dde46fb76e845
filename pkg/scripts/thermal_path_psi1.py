"""Thermal path for the four-qubit state psi1 under all six pairs.

Prints the path table, the extracted 2-local Hamiltonian in the Pauli basis,
and its sign agreement with the reference listing at p = 1e-4.
"""
import argparse
from pathlib import Path

from parentham.demos import PSI1_PAIRS, PSI1_REFERENCE, Q4, psi1, psi1_sign_agreement
from parentham.maxent import PathConfig, thermal_path
from parentham.operators import Subspace
from parentham.patterns import Pattern


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p-min", type=float, default=1e-4)
    ap.add_argument("--csv", help="write the path table here")
    args = ap.parse_args()

    V = Subspace(Q4, psi1())
    res = thermal_path(V, Pattern.parse(PSI1_PAIRS, Q4), PathConfig.geometric(1e-1, args.p_min))
    print(res.to_csv())
    print(f"verdict {res.verdict}, overlap {res.overlap:.12f}")
    if args.csv:
        Path(args.csv).write_text(res.to_csv())

    ours = dict(res.hamiltonian.pauli_terms(1e-6))
    ref = dict(PSI1_REFERENCE)
    print(f"{'term':>6} {'ours':>10} {'reference':>10}")
    for label in sorted(set(ours) | set(ref)):
        print(f"{label:>6} {ours.get(label, 0.0):10.4f} {ref.get(label, float('nan')):10.4f}")
    ok, wrong = psi1_sign_agreement(res.hamiltonian)
    print(f"sign agreement {ok}/{len(PSI1_REFERENCE)}" + (f", differing {wrong}" if wrong else ""))


if __name__ == "__main__":
    main()
