"""JSON file formats for states, subspaces, Hamiltonians and certificates.

Complex numbers are written as ``[re, im]`` pairs.  Every top-level object
carries ``schema_version``.  Pattern text is 1-based (``"1,2;2,3"``).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .operators import ShapeError, Subspace, SystemShape, check_density
from .patterns import LocalHamiltonian, MarginalVector, Pattern, PatternError, from_pauli

SCHEMA_VERSION = 1


class FormatError(ValueError):
    """Malformed input file; the message names the offending field."""


# ---------------------------------------------------------------------------
# complex arrays

def encode_complex(a) -> Any:
    a = np.asarray(a)
    if a.ndim == 0:
        z = complex(a)
        return [z.real, z.imag]
    return [encode_complex(x) for x in a]


def decode_complex(obj, where: str) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        raise FormatError(f"{where}: expected nested lists of [re, im] pairs") from None
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise FormatError(f"{where}: complex entries must be [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _field(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected a JSON object")
    if key not in obj:
        raise FormatError(f"{where}: missing field {key!r}")
    return obj[key]


def _shape(obj: dict, where: str) -> SystemShape:
    dims = _field(obj, "shape", where)
    try:
        return SystemShape(tuple(int(d) for d in dims))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{where}.shape: {exc}") from None


def _pattern(text: str, shape: SystemShape, where: str) -> Pattern:
    try:
        return Pattern.parse(str(text), shape)
    except (PatternError, ShapeError) as exc:
        raise FormatError(f"{where}.pattern: {exc}") from None


def parse_pattern(text: str, shape: SystemShape) -> Pattern:
    try:
        return Pattern.parse(str(text), shape)
    except (PatternError, ShapeError) as exc:
        raise FormatError(f"--pattern: {exc}") from None


# ---------------------------------------------------------------------------
# states

@dataclass
class StateFile:
    shape: SystemShape
    kind: str  # "pure", "density" or "subspace"
    data: np.ndarray

    def density(self) -> np.ndarray:
        if self.kind == "pure":
            return np.outer(self.data, self.data.conj())
        if self.kind == "density":
            return self.data
        return self.subspace().mixed_state()

    def subspace(self) -> Subspace:
        if self.kind == "pure":
            return Subspace(self.shape, self.data)
        if self.kind == "subspace":
            return Subspace.span(self.data, self.shape)
        w, v = np.linalg.eigh(self.data)
        return Subspace(self.shape, v[:, w > 1e-10 * w[-1]])

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "type": "state", "shape": list(self.shape.dims),
                "kind": self.kind, "data": encode_complex(self.data)}

    @classmethod
    def from_json(cls, obj: dict, where: str = "state") -> "StateFile":
        shape = _shape(obj, where)
        kind = _field(obj, "kind", where)
        data = decode_complex(_field(obj, "data", where), f"{where}.data")
        D = shape.D
        if kind == "pure":
            if data.shape != (D,):
                raise FormatError(f"{where}.data: pure state needs {D} amplitudes, got {data.shape}")
            nrm = np.linalg.norm(data)
            if nrm == 0:
                raise FormatError(f"{where}.data: zero vector")
            data = data / nrm
        elif kind == "density":
            if data.shape != (D, D):
                raise FormatError(f"{where}.data: density matrix must be {D}x{D}, got {data.shape}")
            try:
                check_density(data, 1e-8)
            except ValueError as exc:
                raise FormatError(f"{where}.data: {exc}") from None
        elif kind == "subspace":
            if data.ndim != 2 or data.shape[0] != D:
                raise FormatError(f"{where}.data: subspace basis must be {D}xr columns, got {data.shape}")
        else:
            raise FormatError(f"{where}.kind: expected pure, density or subspace, got {kind!r}")
        return cls(shape, kind, data)

    @classmethod
    def of_subspace(cls, V: Subspace) -> "StateFile":
        if V.dim == 1:
            return cls(V.shape, "pure", V.basis[:, 0])
        return cls(V.shape, "subspace", V.basis)


# ---------------------------------------------------------------------------
# Hamiltonians

def hamiltonian_to_json(h: LocalHamiltonian, pauli: bool | None = None) -> dict:
    """Pauli-string entries for qubit systems, explicit term matrices otherwise."""
    shape = h.shape
    if pauli is None:
        pauli = shape.all_qubits
    out: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "type": "hamiltonian",
                           "shape": list(shape.dims), "pattern": str(h.pattern)}
    if pauli:
        entries = h.pauli_terms(tol=0.0)
        ident = "I" * shape.n
        out["offset"] = sum(c for s, c in entries if s == ident)
        out["pauli"] = [{"string": s, "coefficient": c} for s, c in entries if s != ident]
    else:
        out["offset"] = h.offset
        out["terms"] = [{"subset": [i + 1 for i in s], "matrix": encode_complex(op)}
                        for s, op in h.terms]
    return out


def hamiltonian_from_json(obj: dict, where: str = "hamiltonian") -> LocalHamiltonian:
    shape = _shape(obj, where)
    pattern = _pattern(_field(obj, "pattern", where), shape, where)
    offset = float(obj.get("offset", 0.0))
    try:
        if "pauli" in obj:
            entries = []
            for k, e in enumerate(obj["pauli"]):
                entries.append((str(_field(e, "string", f"{where}.pauli[{k}]")),
                                float(_field(e, "coefficient", f"{where}.pauli[{k}]"))))
            return from_pauli(shape, pattern, entries, offset)
        terms = []
        for k, e in enumerate(_field(obj, "terms", where)):
            w = f"{where}.terms[{k}]"
            subset = tuple(int(i) - 1 for i in _field(e, "subset", w))
            terms.append((subset, decode_complex(_field(e, "matrix", w), f"{w}.matrix")))
        return LocalHamiltonian(pattern, terms, offset)
    except (PatternError, ShapeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{where}: {exc}") from None


# ---------------------------------------------------------------------------
# marginals and generic IO

def marginals_to_json(x: MarginalVector) -> dict:
    return {"schema_version": SCHEMA_VERSION, "type": "marginals",
            "shape": list(x.pattern.shape.dims), "pattern": str(x.pattern),
            "marginals": [{"subset": [i + 1 for i in s], "matrix": encode_complex(m)}
                          for s, m in zip(x.pattern.subsets, x.marginals)]}


def marginals_from_json(obj: dict, where: str = "marginals") -> MarginalVector:
    shape = _shape(obj, where)
    pattern = _pattern(_field(obj, "pattern", where), shape, where)
    mats = [decode_complex(_field(e, "matrix", f"{where}.marginals[{k}]"), f"{where}.marginals[{k}]")
            for k, e in enumerate(_field(obj, "marginals", where))]
    try:
        return MarginalVector(pattern, mats)
    except (PatternError, ShapeError) as exc:
        raise FormatError(f"{where}: {exc}") from None


def read_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def write_json(obj: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")


def load_state(path: str | Path) -> StateFile:
    return StateFile.from_json(read_json(path), str(path))


def load_hamiltonian(path: str | Path) -> LocalHamiltonian:
    return hamiltonian_from_json(read_json(path), str(path))
