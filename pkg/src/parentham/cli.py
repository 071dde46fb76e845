"""Command-line entry point.

Exit codes: 0 success, 2 input error, 3 negative verdict, 4 solver did not
converge.  Human summaries go to standard output; machine output (JSON with
``schema_version``, or CSV) goes to ``--out``.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import logging
import os
import sys

import numpy as np

from . import demos
from .constructors import (
    ConstructionError,
    ConstructionResult,
    NotKCorrelated,
    WTypeSpec,
    ff_hamiltonian,
    find_splitting_term,
    perturb_combine,
    subsystem_compose,
    thermal_parent,
    three_qubit_parent_of_state,
    verify_ground_space,
    w_chain_parent,
)
from .correlated import leakage
from .formats import (
    SCHEMA_VERSION,
    FormatError,
    StateFile,
    encode_complex,
    hamiltonian_to_json,
    load_hamiltonian,
    load_state,
    marginals_to_json,
    parse_pattern,
    write_json,
)
from .geometry2d import catalog_csv, nonexposed_catalog, sample_body
from .maxent import MaxEntError, PathConfig
from .operators import ShapeError, Subspace, SystemShape
from .patterns import PatternError, rdm_vector

EXIT_OK, EXIT_INPUT, EXIT_NEGATIVE, EXIT_SOLVER = 0, 2, 3, 4
TOL_ENV = "PARENTHAM_TOL"

log = logging.getLogger("parentham")


class Negative(Exception):
    """A well-posed question answered 'no'."""


def default_tol(fallback: float) -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return fallback
    try:
        return float(raw)
    except ValueError:
        raise FormatError(f"{TOL_ENV}={raw!r} is not a number") from None


def _emit(args, obj) -> None:
    if args.out:
        if isinstance(obj, str):
            with open(args.out, "w") as fh:
                fh.write(obj)
        else:
            write_json(obj, args.out)


# ---------------------------------------------------------------------------
# commands

def cmd_rdm(args) -> int:
    st = load_state(args.state)
    pattern = parse_pattern(args.pattern, st.shape)
    x = rdm_vector(st.density(), pattern)
    for s, m in zip(pattern.subsets, x.marginals):
        label = ",".join(str(i + 1) for i in s)
        print(f"marginal {{{label}}}: eigenvalues {np.round(np.linalg.eigvalsh(m), 10).tolist()}")
    _emit(args, marginals_to_json(x))
    return EXIT_OK


def certificate_json(cert) -> dict:
    return {"schema_version": SCHEMA_VERSION, "type": "certificate", "status": cert.status,
            "leakage_upper": cert.leakage, "leakage_lower": cert.lower_bound, "tol": cert.tol,
            "marginal_mismatch": cert.marginal_mismatch, "message": cert.message,
            "witness": None if cert.witness is None else encode_complex(cert.witness)}


def cmd_correlated(args) -> int:
    st = load_state(args.subspace)
    V = st.subspace()
    pattern = parse_pattern(args.pattern, st.shape)
    tol = args.tol if args.tol is not None else default_tol(1e-7)
    cert = leakage(V, pattern, tol)
    print(cert.summary())
    _emit(args, certificate_json(cert))
    if cert.status == "not_correlated":
        if args.witness_out:
            write_json(StateFile(st.shape, "density", cert.witness).to_json(), args.witness_out)
            print(f"witness written to {args.witness_out}")
        return EXIT_NEGATIVE
    if cert.status == "indeterminate":
        return EXIT_SOLVER
    return EXIT_OK


def _parent(args, V: Subspace | None, shape: SystemShape | None, tol: float):
    route = args.route
    if route == "w-chain":
        if args.n is not None:
            return w_chain_parent(WTypeSpec.equal(args.n), tol=tol)
        psi = V.basis[:, 0]
        n = shape.n
        amps = [psi[1 << (n - 1 - i)] for i in range(n)]
        if V.dim != 1 or abs(np.linalg.norm(amps) - 1) > 1e-9:
            raise FormatError("w-chain route needs a single-excitation pure state")
        return w_chain_parent(WTypeSpec.normalized(amps), tol=tol)
    if V is None:
        raise FormatError(f"route {route} needs a subspace file")
    if route == "three-qubit":
        if shape.dims != (2, 2, 2) or V.dim != 1:
            raise FormatError("three-qubit route needs a pure three-qubit state")
        return three_qubit_parent_of_state(V.basis[:, 0], tol=tol)
    if args.pattern is None:
        raise FormatError(f"route {route} needs --pattern")
    pattern = parse_pattern(args.pattern, shape)
    if route == "ff":
        h, W = ff_hamiltonian(V, pattern)
        rep = verify_ground_space(h, V, tol)
        if not rep.passed:
            raise Negative(f"frustration-free ground space has dimension {W.dim}: {rep.summary()}")
        return ConstructionResult(h, "ff", rep)
    if route == "perturb":
        h_w, W = ff_hamiltonian(V, pattern)
        h_u = load_hamiltonian(args.splitting) if args.splitting else find_splitting_term(V, W, pattern)
        return perturb_combine(h_w, h_u, V, tol=tol)
    if route == "thermal":
        cfg = PathConfig.geometric(1e-1, args.p)
        return thermal_parent(V, pattern, cfg, snap=not args.no_snap, tol=tol)
    if route == "compose":
        if not args.subpatterns:
            raise FormatError("compose route needs --subpatterns 'P1|P2|...'")
        subs = [parse_pattern(s, shape) for s in args.subpatterns.split("|")]
        return subsystem_compose(V, pattern, subs, tol=tol)
    raise FormatError(f"unknown route {route}")


def cmd_parent(args) -> int:
    tol = args.tol if args.tol is not None else default_tol(1e-8)
    V = shape = None
    if args.subspace:
        st = load_state(args.subspace)
        V, shape = st.subspace(), st.shape
    res = _parent(args, V, shape, tol)
    print(f"route {res.route}: {res.report.summary()}")
    if res.bound is not None:
        b = res.bound
        print(f"t* = {b.t_star:.6g} (lambda {b.lambda_min_pos_W:.4g}, mu {b.mu:.4g}, "
              f"omega {b.omega:.4g})")
    for note in res.notes:
        print(f"note: {note}")
    out = hamiltonian_to_json(res.hamiltonian)
    out["route"] = res.route
    out["report"] = {"ground_energy": res.report.ground_energy, "gap": res.report.gap,
                     "fidelity": res.report.overlap, "ground_dim": res.report.ground_dim,
                     "passed": res.report.passed}
    _emit(args, out)
    return EXIT_OK


def cmd_verify(args) -> int:
    h = load_hamiltonian(args.hamiltonian)
    st = load_state(args.subspace)
    if h.shape != st.shape:
        raise FormatError("Hamiltonian and subspace files describe different systems")
    tol = args.tol if args.tol is not None else default_tol(1e-8)
    rep = verify_ground_space(h, st.subspace(), tol)
    print(("PASS: " if rep.passed else "") + rep.summary())
    _emit(args, {"schema_version": SCHEMA_VERSION, "type": "verification", "passed": rep.passed,
                 "ground_energy": rep.ground_energy, "gap": rep.gap, "fidelity": rep.overlap,
                 "ground_dim": rep.ground_dim, "target_dim": rep.target_dim})
    return EXIT_OK if rep.passed else EXIT_NEGATIVE


def cmd_body2d(args) -> int:
    O1, O2 = load_hamiltonian(args.h1).assemble(), load_hamiltonian(args.h2).assemble()
    if O1.shape != O2.shape:
        raise FormatError("observables act on different spaces")
    body = sample_body(O1, O2, args.directions)
    print(f"sampled {args.directions} directions; hull area {body.area():.8f}")
    cat = nonexposed_catalog(O1, O2, args.probe_directions)
    print(f"non-exposed extreme points: {len(cat)}")
    for e in cat:
        print(f"  ({e.x:.8f}, {e.y:.8f})")
    _emit(args, body.to_csv())
    if args.catalog_out:
        with open(args.catalog_out, "w") as fh:
            fh.write(catalog_csv(cat))
    return EXIT_OK


NAMED_STATES = {
    "ghz": lambda: Subspace(demos.Q3, demos.ghz()),
    "rho-c": demos.rho_c_space,
    "psi1": lambda: Subspace(demos.Q4, demos.psi1()),
    "psi2": lambda: Subspace(demos.Q4, demos.psi2()),
    "psi2-prime": lambda: Subspace(demos.Q4, demos.psi2_prime()),
    "w3": lambda: Subspace(demos.Q3, demos.w_state(3)),
    "w4": lambda: Subspace(SystemShape.qubits(4), demos.w_state(4)),
    "w5": lambda: Subspace(SystemShape.qubits(5), demos.w_state(5)),
}


def cmd_state(args) -> int:
    V = NAMED_STATES[args.name]()
    st = StateFile.of_subspace(V)
    print(f"{args.name}: dims {list(V.shape.dims)}, dimension {V.dim}")
    _emit(args, st.to_json())
    return EXIT_OK


def cmd_demo(args) -> int:
    rep = demos.run_demo(args.name, args.seed)
    print(rep.text())
    if args.out:
        _emit(args, {"schema_version": SCHEMA_VERSION, "type": "demo", "name": rep.name,
                     "passed": rep.passed, "seconds": rep.seconds,
                     "checks": [{"name": c.name, "passed": c.passed, "gating": c.gating,
                                 "detail": c.detail} for c in rep.checks]})
    return EXIT_OK if rep.passed else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# parser

def _directions(text: str) -> int:
    n = int(text)
    if n < 8:
        raise argparse.ArgumentTypeError("need at least 8 directions")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="machine-readable output path")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1, help="BLAS threads (default 1)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="parentham",
                                description="Certify K-correlated spaces and build local parent "
                                            "Hamiltonians.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("rdm", parents=[common], help="marginals of a state")
    s.add_argument("state")
    s.add_argument("--pattern", required=True)
    s.set_defaults(func=cmd_rdm)

    s = sub.add_parser("correlated", parents=[common], help="leakage certificate")
    s.add_argument("subspace")
    s.add_argument("--pattern", required=True)
    s.add_argument("--tol", type=float)
    s.add_argument("--witness-out")
    s.set_defaults(func=cmd_correlated)

    s = sub.add_parser("parent", parents=[common], help="construct a parent Hamiltonian")
    s.add_argument("subspace", nargs="?")
    s.add_argument("--pattern")
    s.add_argument("--route", required=True,
                   choices=["ff", "perturb", "thermal", "three-qubit", "w-chain", "compose"])
    s.add_argument("--tol", type=float)
    s.add_argument("--p", type=float, default=1e-4, help="smallest p on the thermal path")
    s.add_argument("--no-snap", action="store_true", help="thermal route: keep the raw exponent")
    s.add_argument("--n", type=int, help="w-chain route: equal-amplitude W(n)")
    s.add_argument("--splitting", help="perturb route: H_U as a Hamiltonian file")
    s.add_argument("--subpatterns", help="compose route: patterns separated by '|'")
    s.set_defaults(func=cmd_parent)

    s = sub.add_parser("verify", parents=[common], help="check a ground space")
    s.add_argument("hamiltonian")
    s.add_argument("subspace")
    s.add_argument("--tol", type=float)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("body2d", parents=[common], help="two-observable shadow and its extreme points")
    s.add_argument("h1")
    s.add_argument("h2")
    s.add_argument("--directions", type=_directions, default=3600)
    s.add_argument("--probe-directions", type=_directions, default=100_000)
    s.add_argument("--catalog-out")
    s.set_defaults(func=cmd_body2d)

    s = sub.add_parser("state", parents=[common], help="write a named example state")
    s.add_argument("name", choices=sorted(NAMED_STATES))
    s.set_defaults(func=cmd_state)

    s = sub.add_parser("demo", parents=[common], help="run an example scenario")
    s.add_argument("name", choices=list(demos.DEMOS))
    s.set_defaults(func=cmd_demo)
    return p


def _thread_limit(n: int):
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:  # optional
        return contextlib.nullcontext()
    return threadpool_limits(limits=n)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        with _thread_limit(args.threads):
            return args.func(args)
    except (FormatError, PatternError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NotKCorrelated, Negative) as exc:
        print(f"not K-correlated: {exc}" if isinstance(exc, NotKCorrelated) else f"negative: {exc}")
        return EXIT_NEGATIVE
    except (MaxEntError, ConstructionError) as exc:
        print(f"did not converge: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except json.JSONDecodeError as exc:  # pragma: no cover - read_json converts these
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
