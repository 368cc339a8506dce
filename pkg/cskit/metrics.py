"""Cartan-Schouten metric families, signatures and the parallelism checker.

A metric on a Lie group is Cartan-Schouten when it is parallel for the
canonical connection nabla_x y = [x, y]/2 on left-invariant fields. The
constant families here live on the algebra (biinvariant metrics); the
Heisenberg family is a coordinate field on the (x, y, z) chart of H3.
"""

import argparse
import json
import logging
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from cskit.algebras import E, builtin
from cskit.errors import AlgebraDocumentError, ContractError, DegenerateError
from cskit.groups import cubic_coefficients, h3_left_frame
from cskit.lie_core import (
    NULLSPACE_RCOND,
    BilinearForm,
    LieAlgebra,
    ad_matrix,
    centralizer_basis,
    complex_structure_J,
    cotangent_algebra,
    killing_form,
    killing_orthonormal,
)
from cskit.output import effective_config, emit, fail
from cskit.types import MetricDocument, Signature

log = logging.getLogger(__name__)

# Parameters with |determinant| at or below this are degenerate
DEGENERACY_TOL = 1e-12
# K0(J., .) on so(3,1) equals this multiple of E14+E41+E25+E52-E36-E63
SO31_DISPLAY_FACTOR = 4.0

Frame = Callable[[NDArray[np.float64]], NDArray[np.float64]]


# === Parameter sets ===


@dataclass(frozen=True)
class H3MetricParams:
    """Coefficients of the Heisenberg Cartan-Schouten family."""

    a: float
    b: float
    c: float
    d: float
    e: float
    m: float

    def __post_init__(self) -> None:
        if abs(self.determinant) <= DEGENERACY_TOL:
            raise DegenerateError(f"degenerate H3 parameters (aem - ad^2 - b^2 m + 2bcd - c^2 e = {self.determinant:.3g})")

    @property
    def determinant(self) -> float:
        a, b, c, d, e, m = self.a, self.b, self.c, self.d, self.e, self.m
        return a * e * m - a * d * d - b * b * m + 2 * b * c * d - c * c * e

    def coframe_matrix(self) -> NDArray[np.float64]:
        """Constant matrix of the metric in the coframe (dx, dy, dz - y dx/2 - x dy/2)."""
        return np.array(
            [[self.m, self.d, self.c], [self.d, self.e, self.b], [self.c, self.b, self.a]], dtype=float
        )


@dataclass(frozen=True)
class OddCotangentParams:
    """mu = s K0 + t <,> on T*G for K(G) = R I."""

    s: float
    t: float

    def __post_init__(self) -> None:
        if self.t == 0:
            raise DegenerateError("degenerate cotangent metric: t must be nonzero")


@dataclass(frozen=True)
class EvenCotangentParams:
    """mu = s1 K0 + s2 K_J + t1 <,> + t2 <,>_J on T*G for K(G) = R I + R J."""

    s1: float
    s2: float
    t1: float
    t2: float

    def __post_init__(self) -> None:
        if self.t1 == 0 and self.t2 == 0:
            raise DegenerateError("degenerate cotangent metric: t1 and t2 cannot both vanish")


CotangentMetricParams = OddCotangentParams | EvenCotangentParams


# === Coordinate fields ===


@dataclass(frozen=True)
class CoordinateMetricField:
    """Symmetric matrix-valued function on a chart."""

    dim: int
    coefficients: Callable[[NDArray[np.float64]], NDArray[np.float64]]
    name: str = ""

    def __call__(self, p: ArrayLike) -> NDArray[np.float64]:
        p = np.asarray(p, dtype=float)
        if p.shape != (self.dim,):
            raise ContractError(f"chart point has shape {p.shape}, expected ({self.dim},)")
        m = np.asarray(self.coefficients(p), dtype=float)
        return (m + m.T) / 2

    def perturbed(
        self, i: int, j: int, delta: Callable[[NDArray[np.float64]], float]
    ) -> "CoordinateMetricField":
        """Field with delta(p) added to the (i, j) and (j, i) entries."""
        unit = np.zeros((self.dim, self.dim))
        unit[i, j] = unit[j, i] = 1.0
        base = self.coefficients
        return CoordinateMetricField(self.dim, lambda p: base(p) + delta(p) * unit, f"{self.name}+perturbation")


def h3_metric(params: H3MetricParams) -> CoordinateMetricField:
    """Heisenberg Cartan-Schouten metric in the (x, y, z) chart.

    Off-diagonal entries equal the coefficients of the symmetric products,
    e.g. mu(dx, dy) = a x y/4 - c x/2 - b y/2 + d.
    """
    a, b, c, d, e, m = params.a, params.b, params.c, params.d, params.e, params.m

    def coefficients(p: NDArray[np.float64]) -> NDArray[np.float64]:
        x, y = p[0], p[1]
        m12 = a * x * y / 4 - c * x / 2 - b * y / 2 + d
        m13 = -(a * y / 2 - c)
        m23 = -(a * x / 2 - b)
        return np.array(
            [
                [a * y * y / 4 - c * y + m, m12, m13],
                [m12, a * x * x / 4 - b * x + e, m23],
                [m13, m23, a],
            ]
        )

    return CoordinateMetricField(3, coefficients, "h3")


def exp_chart_field(L: LieAlgebra, B: BilinearForm | ArrayLike) -> tuple[CoordinateMetricField, Frame]:
    """Left-invariant extension of a constant form in the exponential chart.

    Only 3-dimensional algebras whose ad matrices satisfy A^3 = kappa A
    (so3, su2, sl2, so21) are supported. Returns the coordinate field and
    the left-invariant frame; the frame at xi is the inverse of the right
    Jacobian J_r(xi) = I - f2 A + g2 A^2 with A = ad(xi).
    """
    if L.dim != 3:
        raise ContractError(f"exponential chart field needs a 3-dimensional algebra, got {L.dim}")
    form = B.m if isinstance(B, BilinearForm) else np.asarray(B, dtype=float)

    def right_jacobian(xi: NDArray[np.float64]) -> NDArray[np.float64]:
        A = ad_matrix(L, xi)
        _, f2, g2 = cubic_coefficients(float(np.trace(A @ A)) / 2)
        return np.eye(3) - f2 * A + g2 * (A @ A)

    def coefficients(xi: NDArray[np.float64]) -> NDArray[np.float64]:
        jr = right_jacobian(xi)
        return jr.T @ form @ jr

    def frame(xi: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.linalg.inv(right_jacobian(xi))

    return CoordinateMetricField(3, coefficients, f"exp-chart {L.name}"), frame


def parallelism_residual(
    field: CoordinateMetricField,
    L: LieAlgebra,
    frame: Frame,
    points: Iterable[ArrayLike],
    h: float = 1e-5,
) -> float:
    """Worst violation of x+ mu(y+, z+) = (mu([x,y]+, z+) + mu(y+, [x,z]+))/2.

    Args:
        field: Metric coefficients in chart coordinates
        L: Lie algebra whose basis labels the frame
        frame: Chart point -> matrix whose columns are the left-invariant fields e_i+
        points: Chart points to test
        h: Central difference step along each frame vector

    Returns:
        Maximum over points and basis triples of the absolute residual
    """

    def frame_metric(q: NDArray[np.float64]) -> NDArray[np.float64]:
        F = frame(q)
        return F.T @ field(q) @ F

    worst = 0.0
    for p in points:
        p = np.asarray(p, dtype=float)
        F = frame(p)
        G = frame_metric(p)
        rhs = 0.5 * (np.einsum("ijl,lk->ijk", L.c, G) + np.einsum("ikl,jl->ijk", L.c, G))
        deriv = np.stack(
            [(frame_metric(p + h * F[:, i]) - frame_metric(p - h * F[:, i])) / (2 * h) for i in range(L.dim)]
        )
        worst = max(worst, float(np.abs(deriv - rhs).max()))
    return worst


def _monomials(degree: int) -> list[tuple[int, int, int]]:
    return [(i, j, k) for i, j, k in product(range(degree + 1), repeat=3) if i + j + k <= degree]


def h3_parallel_solution_dim(
    rng: np.random.Generator, degree: int = 2, n_points: int = 12, rcond: float = NULLSPACE_RCOND
) -> int:
    """Dimension of the parallel symmetric 2-tensors on H3 with polynomial coefficients.

    The parallelism equation is linear in the coefficients, so it is
    assembled exactly (analytic derivatives of monomials and of the frame)
    at random chart points and its nullspace is measured.
    """
    L = builtin("h3")
    monomials = _monomials(degree)
    pairs = [(r, s) for r in range(3) for s in range(r, 3)]
    # derivative of the frame matrix in x; the frame does not depend on y, z
    frame_dx = np.zeros((3, 3))
    frame_dx[2, 1] = 1.0
    points = rng.uniform(-1.0, 1.0, size=(n_points, 3))
    columns = []
    for (r, s), powers in product(pairs, monomials):
        unit = np.zeros((3, 3))
        unit[r, s] = unit[s, r] = 1.0
        alpha = np.array(powers)
        rows = []
        for p in points:
            value = float(np.prod(p**alpha))
            grad = np.array(
                [alpha[a] * float(np.prod(p ** (alpha - np.eye(3, dtype=int)[a]))) if alpha[a] else 0.0 for a in range(3)]
            )
            F = h3_left_frame(p)
            M = value * unit
            G = F.T @ M @ F
            rhs = 0.5 * (np.einsum("ijl,lk->ijk", L.c, G) + np.einsum("ikl,jl->ijk", L.c, G))
            deriv = []
            for i in range(3):
                v = F[:, i]
                dF = v[0] * frame_dx
                dM = float(grad @ v) * unit
                deriv.append(dF.T @ M @ F + F.T @ dM @ F + F.T @ M @ dF)
            rows.append((np.stack(deriv) - rhs).ravel())
        columns.append(np.concatenate(rows))
    null = linalg.null_space(np.column_stack(columns), rcond=rcond)
    log.debug("H3 parallel tensors of degree <= %d: dimension %d", degree, null.shape[1])
    return null.shape[1]


# === Constant biinvariant families ===


def so31_K_J() -> BilinearForm:
    """K_J(x, y) = K0(Jx, y) on so(3,1) with the computed complex structure."""
    L = builtin("so31")
    J = complex_structure_J(L)
    return BilinearForm(J.T @ killing_form(L).m, L.labels)


def so31_metric(k1: float, k2: float) -> BilinearForm:
    """k1 diag(1,1,1,-1,-1,-1) + k2 (E14+E41+E25+E52-E36-E63) in the basis S1..S6."""
    display = E(1, 4, 6) + E(4, 1, 6) + E(2, 5, 6) + E(5, 2, 6) - E(3, 6, 6) - E(6, 3, 6)
    B = BilinearForm(k1 * np.diag([1.0, 1.0, 1.0, -1.0, -1.0, -1.0]) + k2 * display, builtin("so31").labels)
    if B.is_degenerate():
        raise DegenerateError(f"degenerate so(3,1) metric for k1={k1}, k2={k2}")
    return B


def cotangent_metric(L: LieAlgebra, params: CotangentMetricParams, J: ArrayLike | None = None) -> BilinearForm:
    """Biinvariant metric on T*G in the basis (e_1..e_n, e_1*..e_n*).

    Odd case: [[s K0, t I], [t I, 0]]. Even case: top-left s1 K0 + s2 K_J,
    top-right t1 I + t2 J^T, bottom-left t1 I + t2 J.

    Raises:
        ContractError: odd parameters with a J, or for an algebra whose
            centralizer is two-dimensional
        NoComplexStructureError: even parameters on an algebra without J
        DegenerateError: resulting form is singular
    """
    n = L.dim
    K = killing_form(L).m
    eye = np.eye(n)
    if isinstance(params, OddCotangentParams):
        if J is not None:
            raise ContractError("the (s, t) family takes no complex structure")
        if len(centralizer_basis(L)) == 2:
            raise ContractError(f"{L.name or 'algebra'} has a complex structure; use (s1, s2, t1, t2)")
        top = params.s * K
        upper = lower = params.t * eye
    else:
        J = complex_structure_J(L) if J is None else np.asarray(J, dtype=float)
        if J.shape != (n, n):
            raise ContractError(f"complex structure has shape {J.shape}, expected ({n}, {n})")
        top = params.s1 * K + params.s2 * (J.T @ K)
        upper = params.t1 * eye + params.t2 * J.T
        lower = params.t1 * eye + params.t2 * J
    m = np.block([[top, upper], [lower, np.zeros((n, n))]])
    B = BilinearForm(m, cotangent_algebra(L).labels)
    if B.is_degenerate():
        raise DegenerateError(f"degenerate cotangent metric on {L.name or 'algebra'}")
    return B


def closed_form_eigenvalues(s: float, t: float, p: int, n: int) -> NDArray[np.float64]:
    """Eigenvalues of [[s I_{p,n}, t I], [t I, 0]], sorted ascending.

    With l1, l2 = (s -+ sqrt(s^2 + 4 t^2))/2 these are -l1 and -l2 with
    multiplicity p, and l1 and l2 with multiplicity n - p.
    """
    root = np.sqrt(s * s + 4 * t * t)
    l1, l2 = (s - root) / 2, (s + root) / 2
    values = [-l1] * p + [-l2] * p + [l1] * (n - p) + [l2] * (n - p)
    return np.sort(np.array(values))


# === Spectra ===


def eigenvalues(B: BilinearForm | ArrayLike) -> NDArray[np.float64]:
    """Eigenvalues of the symmetric matrix, ascending."""
    m = B.m if isinstance(B, BilinearForm) else np.asarray(B, dtype=float)
    return linalg.eigh(m, eigvals_only=True)


def signature(B: BilinearForm | ArrayLike, rtol: float = NULLSPACE_RCOND) -> Signature:
    """Counts of negative, positive and numerically zero eigenvalues."""
    w = eigenvalues(B)
    scale = float(np.abs(w).max()) if w.size else 0.0
    zero = np.abs(w) <= rtol * scale
    return Signature(int(np.sum((w < 0) & ~zero)), int(np.sum((w > 0) & ~zero)), int(np.sum(zero)))


def metric_document(B: BilinearForm) -> MetricDocument:
    labels = list(B.labels) or [f"e{i + 1}" for i in range(B.dim)]
    return {"basis": labels, "matrix": B.m.tolist()}


# === Commands ===

METRIC_GROUPS = ("t*so3", "t*su2", "t*sl2", "t*so21", "t*so31", "so31", "h3")
ASYMMETRY_TOL = 1e-12


def _required(args: argparse.Namespace, *names: str) -> list[float]:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        fail(f"{args.group} needs {', '.join(missing)}", 2)
    return [float(getattr(args, n)) for n in names]


def build_metric(args: argparse.Namespace) -> BilinearForm:
    """Metric selected by the metric subcommand's group and parameters."""
    if args.group == "h3":
        field = h3_metric(H3MetricParams(*_required(args, "a", "b", "c", "d", "e", "m")))
        point = np.array(args.at if args.at is not None else (0.0, 0.0, 0.0), dtype=float)
        return BilinearForm(field(point), ("dx", "dy", "dz"))
    if args.group == "so31":
        return so31_metric(*_required(args, "k1", "k2"))
    L = builtin(args.group.removeprefix("t*"))
    if args.basis == "sylvester":
        L = killing_orthonormal(L)[0]
    if L.name == "so31":
        return cotangent_metric(L, EvenCotangentParams(*_required(args, "s1", "s2", "t1", "t2")))
    return cotangent_metric(L, OddCotangentParams(*_required(args, "s", "t")))


def metric_command(args: argparse.Namespace) -> None:
    """Handle metric subcommand."""
    cfg = effective_config(args)
    B = build_metric(args)
    doc = {"group": args.group, **metric_document(B)}
    doc["signature"] = signature(B).as_dict()
    doc["eigenvalues"] = eigenvalues(B)
    emit(doc, cfg.output_format)


def read_matrix(source: str) -> NDArray[np.float64]:
    """Matrix from a JSON file or inline JSON: a nested list or {"matrix": ...}.

    Raises:
        AlgebraDocumentError: text is not JSON or holds no numeric matrix
        ContractError: matrix is not square and symmetric
    """
    path = Path(source)
    text = path.read_text() if path.is_file() else source
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise AlgebraDocumentError(f"invalid matrix JSON: {e}") from e
    if isinstance(data, dict):
        data = data.get("matrix")
    try:
        m = np.array(data, dtype=float)
    except (TypeError, ValueError) as e:
        raise AlgebraDocumentError(f"matrix entries must be numbers: {e}") from e
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.size == 0:
        raise ContractError(f"expected a non-empty square matrix, got shape {m.shape}")
    if np.abs(m - m.T).max() > ASYMMETRY_TOL * max(1.0, float(np.abs(m).max())):
        raise ContractError("matrix is not symmetric")
    return m


def signature_command(args: argparse.Namespace) -> None:
    """Handle signature subcommand."""
    cfg = effective_config(args)
    m = read_matrix(args.matrix)
    emit({**signature(m).as_dict(), "eigenvalues": eigenvalues(m)}, cfg.output_format)
