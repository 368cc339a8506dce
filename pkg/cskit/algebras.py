"""Built-in Lie algebras with matrix realizations, and algebra documents.

Every built-in is defined by a fixed list of basis matrices; its structure
constants are the coordinates of the matrix commutators in that basis.
"""

import argparse
import logging
from dataclasses import dataclass
from functools import cache
from pathlib import Path

import numpy as np
import yaml
from numpy.typing import ArrayLike, NDArray

from cskit.errors import AlgebraDocumentError, ContractError
from cskit.lie_core import (
    LieAlgebra,
    centralizer_basis,
    centralizer_closure_residual,
    complex_structure_J,
    derived_dim,
    jacobi_residual,
    killing_form,
)
from cskit.output import effective_config, emit
from cskit.types import AlgebraDocument, BracketEntry

log = logging.getLogger(__name__)

BUILTINS = ("so3", "su2", "sl2", "so21", "so31", "h3", "se3", "se21")
SIMPLE = ("so3", "su2", "sl2", "so21", "so31")


def E(i: int, j: int, n: int) -> NDArray[np.float64]:
    """Matrix unit E_ij (1-based) of size n."""
    m = np.zeros((n, n))
    m[i - 1, j - 1] = 1.0
    return m


@dataclass(frozen=True, eq=False)
class MatrixBasis:
    """Basis of a matrix Lie algebra with coordinate projection."""

    labels: tuple[str, ...]
    mats: NDArray

    def __post_init__(self) -> None:
        mats = np.array(self.mats)
        mats.setflags(write=False)
        object.__setattr__(self, "mats", mats)
        flat = mats.reshape(len(self.labels), -1).T
        stacked = np.vstack([flat.real, flat.imag]) if np.iscomplexobj(mats) else flat
        object.__setattr__(self, "_pinv", np.linalg.pinv(stacked))

    @property
    def size(self) -> int:
        return self.mats.shape[1]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.mats)

    def matrix(self, xi: ArrayLike) -> NDArray:
        """Sum of xi_i times the i-th basis matrix."""
        return np.tensordot(np.asarray(xi, dtype=float), self.mats, axes=1)

    def coords(self, m: ArrayLike) -> NDArray[np.float64]:
        """Coordinates of an algebra matrix (least squares onto the basis)."""
        flat = np.asarray(m).ravel()
        stacked = np.concatenate([flat.real, flat.imag]) if self.is_complex else flat.real
        return self._pinv @ stacked

    def projection_residual(self, m: ArrayLike) -> float:
        return float(np.abs(self.matrix(self.coords(m)) - np.asarray(m)).max())


def from_matrices(basis: MatrixBasis, name: str) -> LieAlgebra:
    """Structure constants of a matrix Lie algebra."""
    n = len(basis.labels)
    c = np.zeros((n, n, n))
    for i in range(n):
        for j in range(i + 1, n):
            a, b = basis.mats[i], basis.mats[j]
            comm = a @ b - b @ a
            if basis.projection_residual(comm) > 1e-12:
                raise ContractError(f"{name}: [{basis.labels[i]}, {basis.labels[j]}] leaves the span")
            c[i, j] = basis.coords(comm)
            c[j, i] = -c[i, j]
    # exact small values come out of the pseudo-inverse with rounding noise
    c[np.abs(c) < 1e-14] = 0.0
    return LieAlgebra(basis.labels, c, name)


def _so3() -> MatrixBasis:
    return MatrixBasis(
        ("e1", "e2", "e3"),
        [E(3, 2, 3) - E(2, 3, 3), E(1, 3, 3) - E(3, 1, 3), E(2, 1, 3) - E(1, 2, 3)],
    )


# H(n) = n1 (E32 - E23) - n2 (E13 + E31) + n3 (E12 + E21), H(x)y = x cross_s y
HAT_H_BASIS = np.array(
    [
        E(3, 2, 3) - E(2, 3, 3),
        -(E(1, 3, 3) + E(3, 1, 3)),
        E(1, 2, 3) + E(2, 1, 3),
    ]
)


def _su2() -> MatrixBasis:
    x1 = np.array([[-1j, 0], [0, 1j]])
    x2 = np.array([[0, -1], [1, 0]], dtype=complex)
    x3 = np.array([[0, 1j], [1j, 0]])
    return MatrixBasis(("X1", "X2", "X3"), [x1, x2, x3])


def _sl2() -> MatrixBasis:
    r = np.sqrt(2) / 4
    return MatrixBasis(
        ("e1", "e2", "e3"),
        [r * (E(1, 2, 2) - E(2, 1, 2)), r * (E(1, 1, 2) - E(2, 2, 2)), r * (E(1, 2, 2) + E(2, 1, 2))],
    )


def _so21() -> MatrixBasis:
    r = np.sqrt(2) / 2
    return MatrixBasis(
        ("e1'", "e2'", "e3'"),
        [r * (E(2, 3, 3) - E(3, 2, 3)), r * (E(1, 3, 3) + E(3, 1, 3)), -r * (E(1, 2, 3) + E(2, 1, 3))],
    )


def _so31() -> MatrixBasis:
    return MatrixBasis(
        ("S1", "S2", "S3", "S4", "S5", "S6"),
        [
            E(1, 4, 4) + E(4, 1, 4),
            E(2, 4, 4) + E(4, 2, 4),
            E(3, 4, 4) + E(4, 3, 4),
            E(2, 3, 4) - E(3, 2, 4),
            E(3, 1, 4) - E(1, 3, 4),
            E(2, 1, 4) - E(1, 2, 4),
        ],
    )


def _h3() -> MatrixBasis:
    return MatrixBasis(("e1", "e2", "e3"), [E(1, 2, 3), E(2, 3, 3), E(1, 3, 3)])


def _rigid(rotations: NDArray) -> list[NDArray[np.float64]]:
    mats = []
    for r in rotations:
        m = np.zeros((4, 4))
        m[:3, :3] = r
        mats.append(m)
    return mats + [E(i, 4, 4) for i in (1, 2, 3)]


def _se3() -> MatrixBasis:
    return MatrixBasis(("w1", "w2", "w3", "v1", "v2", "v3"), _rigid(_so3().mats))


def _se21() -> MatrixBasis:
    return MatrixBasis(("n1", "n2", "n3", "v1", "v2", "v3"), _rigid(HAT_H_BASIS))


_FACTORIES = {
    "so3": _so3,
    "su2": _su2,
    "sl2": _sl2,
    "so21": _so21,
    "so31": _so31,
    "h3": _h3,
    "se3": _se3,
    "se21": _se21,
}


@cache
def matrix_basis(name: str) -> MatrixBasis:
    """Fixed basis matrices of a built-in algebra."""
    try:
        return _FACTORIES[name]()
    except KeyError:
        raise ContractError(f"unknown algebra {name!r}; expected one of {', '.join(BUILTINS)}") from None


@cache
def builtin(name: str) -> LieAlgebra:
    """Built-in Lie algebra by name."""
    L = from_matrices(matrix_basis(name), name)
    log.debug("built %s, Jacobi residual %.3g", name, jacobi_residual(L))
    return L


# === Documents ===


def from_document(doc: object, name: str = "", tol: float = 1e-10) -> LieAlgebra:
    """Build a LieAlgebra from a parsed document.

    The document lists only brackets with i < j; the rest follows by
    antisymmetry. The Jacobi identity is validated.

    Raises:
        AlgebraDocumentError: malformed document or Jacobi residual above tol
    """
    if not isinstance(doc, dict):
        raise AlgebraDocumentError("algebra document must be a mapping")
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise AlgebraDocumentError("'dim' must be a positive integer")
    labels = doc.get("labels") or [f"e{i + 1}" for i in range(dim)]
    if len(labels) != dim:
        raise AlgebraDocumentError(f"expected {dim} labels, got {len(labels)}")
    c = np.zeros((dim, dim, dim))
    for entry in doc.get("brackets", []):
        try:
            i, j, coeffs = int(entry["i"]), int(entry["j"]), entry["coeffs"]
        except (KeyError, TypeError, ValueError) as e:
            raise AlgebraDocumentError(f"bad bracket entry {entry!r}") from e
        if not isinstance(coeffs, dict):
            raise AlgebraDocumentError(f"bracket ({i}, {j}): coeffs must be a mapping, got {type(coeffs).__name__}")
        if not 0 <= i < j < dim:
            raise AlgebraDocumentError(f"bracket indices must satisfy 0 <= i < j < {dim}, got ({i}, {j})")
        for k, value in coeffs.items():
            try:
                k, value = int(k), float(value)
            except (TypeError, ValueError) as e:
                raise AlgebraDocumentError(f"bracket ({i}, {j}): bad coefficient {k!r}: {value!r}") from e
            if not 0 <= k < dim:
                raise AlgebraDocumentError(f"coefficient index {k} out of range")
            c[i, j, k] = value
            c[j, i, k] = -value
    L = LieAlgebra(tuple(str(label) for label in labels), c, name)
    residual = jacobi_residual(L)
    if residual > tol:
        raise AlgebraDocumentError(f"Jacobi identity fails (residual {residual:.3g})")
    return L


def load_algebra(path: Path) -> LieAlgebra:
    """Load an algebra document (JSON or YAML) from a file."""
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as e:
        raise AlgebraDocumentError(f"{path}: {e}") from e
    return from_document(doc, path.stem)


def to_document(L: LieAlgebra) -> AlgebraDocument:
    """Serialize the nonzero brackets with i < j."""
    brackets: list[BracketEntry] = []
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            coeffs = {str(k): float(v) for k, v in enumerate(L.c[i, j]) if v != 0}
            if coeffs:
                brackets.append({"i": i, "j": j, "coeffs": coeffs})
    return {"dim": L.dim, "labels": list(L.labels), "brackets": brackets}


def resolve_algebra(spec: str) -> LieAlgebra:
    """Built-in algebra by name, or an algebra document path."""
    if spec in BUILTINS:
        return builtin(spec)
    return load_algebra(Path(spec))


# === Commands ===


def centralizer_command(args: argparse.Namespace) -> None:
    """Handle centralizer subcommand."""
    cfg = effective_config(args)
    L = resolve_algebra(args.algebra)
    basis = centralizer_basis(L, cfg.tol("nullspace"))
    doc = {
        "algebra": L.name,
        "dim": len(basis),
        "basis": basis,
        "closure_residual": centralizer_closure_residual(L, cfg.tol("nullspace")),
    }
    if len(basis) == 2:
        doc["J"] = complex_structure_J(L, cfg.tol("complex_structure"))
    emit(doc, cfg.output_format)


def algebra_load_command(args: argparse.Namespace) -> None:
    """Handle algebra-load subcommand."""
    cfg = effective_config(args)
    L = load_algebra(Path(args.file))
    emit(
        {
            "algebra": L.name,
            "dim": L.dim,
            "labels": list(L.labels),
            "jacobi_residual": jacobi_residual(L),
            "derived_dim": derived_dim(L, cfg.tol("nullspace")),
            "killing_form": killing_form(L).m,
            "centralizer_dim": len(centralizer_basis(L, cfg.tol("nullspace"))),
        },
        cfg.output_format,
    )
