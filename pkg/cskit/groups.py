"""Matrix group elements and right-trivialized bundle products.

Each group carries the fixed algebra basis of cskit.algebras. The bundle
groups TG and T*G are realized as pairs (sigma, payload) with products
(s1 s2, x + Ad_s1 y) and (s1 s2, f + Ad*_s1 g).
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from cskit.algebras import MatrixBasis, builtin, matrix_basis
from cskit.errors import ChartOverflowError, ContractError, NumericalDriftError
from cskit.lie_core import LieAlgebra, cotangent_algebra, tangent_algebra
from cskit.types import GroupElementDocument, GroupId, Variant

log = logging.getLogger(__name__)

MEMBERSHIP_TOL = 1e-8
# rotation angles closer than this to pi are outside the logarithm chart
CHART_MARGIN = 1e-3

ALGEBRA_OF = {
    GroupId.SO3: "so3",
    GroupId.SU2: "su2",
    GroupId.SL2: "sl2",
    GroupId.SO21: "so21",
    GroupId.SO31: "so31",
    GroupId.H3: "h3",
    GroupId.SE3: "se3",
    GroupId.SE21: "se21",
}
SIZE_OF = {
    GroupId.SO3: 3,
    GroupId.SU2: 2,
    GroupId.SL2: 2,
    GroupId.SO21: 3,
    GroupId.SO31: 4,
    GroupId.H3: 3,
    GroupId.SE3: 4,
    GroupId.SE21: 4,
}
ETA21 = np.diag([1.0, -1.0, -1.0])
ETA31 = np.diag([1.0, 1.0, 1.0, -1.0])


def algebra_of(group: GroupId) -> LieAlgebra:
    return builtin(ALGEBRA_OF[group])


def basis_of(group: GroupId) -> MatrixBasis:
    return matrix_basis(ALGEBRA_OF[group])


@dataclass(frozen=True, eq=False)
class GroupElement:
    """Matrix representative tagged with its group."""

    group: GroupId
    m: NDArray

    def __post_init__(self) -> None:
        group = GroupId(self.group)
        dtype = complex if group is GroupId.SU2 else float
        m = np.array(self.m, dtype=dtype)
        n = SIZE_OF[group]
        if m.shape != (n, n):
            raise ContractError(f"{group} element must be {n}x{n}, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "m", m)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return gmul(self, other)

    def to_document(self) -> GroupElementDocument:
        if self.group is GroupId.SU2:
            rows = [[[float(v.real), float(v.imag)] for v in row] for row in self.m]
            return {"group": str(self.group), "matrix": rows}
        return {"group": str(self.group), "matrix": self.m.tolist()}

    @classmethod
    def from_document(cls, doc: GroupElementDocument) -> "GroupElement":
        group = GroupId(doc["group"])
        m = np.asarray(doc["matrix"], dtype=float)
        if group is GroupId.SU2:
            m = m[..., 0] + 1j * m[..., 1]
        return element(group, m)


def _orthogonality(m: NDArray, eta: NDArray) -> float:
    return max(float(np.abs(m.T @ eta @ m - eta).max()), abs(float(np.linalg.det(m)) - 1.0))


def membership_residual(g: GroupElement) -> float:
    """Distance of the matrix from its group's defining equations."""
    m = g.m
    match g.group:
        case GroupId.SO3:
            return _orthogonality(m, np.eye(3))
        case GroupId.SO21:
            return _orthogonality(m, ETA21)
        case GroupId.SO31:
            return _orthogonality(m, ETA31)
        case GroupId.SL2:
            return abs(float(np.linalg.det(m)) - 1.0)
        case GroupId.SU2:
            unitary = float(np.abs(m.conj().T @ m - np.eye(2)).max())
            return max(unitary, abs(np.linalg.det(m) - 1.0))
        case GroupId.H3:
            return max(float(np.abs(np.tril(m, -1)).max()), float(np.abs(np.diag(m) - 1.0).max()))
        case GroupId.SE3 | GroupId.SE21:
            eta = np.eye(3) if g.group is GroupId.SE3 else ETA21
            bottom = float(np.abs(m[3] - [0.0, 0.0, 0.0, 1.0]).max())
            return max(bottom, _orthogonality(m[:3, :3], eta))


def is_member(g: GroupElement, tol: float = MEMBERSHIP_TOL) -> bool:
    return membership_residual(g) <= tol


def element(group: GroupId, m: ArrayLike, tol: float = MEMBERSHIP_TOL) -> GroupElement:
    """Validated constructor."""
    g = GroupElement(group, m)
    residual = membership_residual(g)
    if residual > tol:
        raise ContractError(f"matrix is not in {g.group} (residual {residual:.3g})")
    return g


def identity(group: GroupId) -> GroupElement:
    return GroupElement(group, np.eye(SIZE_OF[GroupId(group)]))


def gmul(a: GroupElement, b: GroupElement, tol: float = MEMBERSHIP_TOL) -> GroupElement:
    """Matrix product; drift out of the group is an error, never repaired."""
    if a.group is not b.group:
        raise ContractError(f"cannot multiply {a.group} by {b.group}")
    g = GroupElement(a.group, a.m @ b.m)
    residual = membership_residual(g)
    if residual > tol:
        raise NumericalDriftError(f"numerical drift: {g.group} residual {residual:.3g}")
    return g


def ginv(a: GroupElement) -> GroupElement:
    return GroupElement(a.group, np.linalg.inv(a.m))


# === Exponential and logarithm ===


def cubic_coefficients(kappa: float) -> tuple[float, float, float]:
    """Series coefficients for 3x3 generators with X^3 = kappa X.

    Returns (f1, f2, g2) with exp(X) = I + f1 X + f2 X^2 and
    sum_k X^k/(k+1)! = I + f2 X + g2 X^2.
    """
    if kappa < 0:
        theta = np.sqrt(-kappa)
        f1 = float(np.sinc(theta / np.pi))
        f2 = 0.5 * float(np.sinc(theta / (2 * np.pi))) ** 2
        if theta > 1e-2:
            g2 = (theta - np.sin(theta)) / theta**3
        else:
            g2 = 1 / 6 - theta**2 / 120 + theta**4 / 5040 - theta**6 / 362880
        return f1, f2, float(g2)
    s = np.sqrt(kappa)
    if s < 1e-8:
        return 1.0 + kappa / 6, 0.5 + kappa / 24, 1 / 6 + kappa / 120
    f1 = np.sinh(s) / s
    f2 = 0.5 * (np.sinh(s / 2) / (s / 2)) ** 2
    if s > 1e-2:
        g2 = (np.sinh(s) - s) / s**3
    else:
        g2 = 1 / 6 + s**2 / 120 + s**4 / 5040 + s**6 / 362880
    return float(f1), float(f2), float(g2)


def generator_kappa(X: NDArray) -> float:
    """kappa = tr(X^2)/2, so that X^3 = kappa X for traceless 3x3 X with det X = 0."""
    return float(np.trace(X @ X)) / 2


def exp_cubic(X: NDArray) -> NDArray[np.float64]:
    """Closed-form exponential of an so(3) or so(2,1) matrix."""
    f1, f2, _ = cubic_coefficients(generator_kappa(X))
    return np.eye(3) + f1 * X + f2 * (X @ X)


def log_cubic(A: NDArray, A_inv: NDArray) -> NDArray[np.float64]:
    """Inverse of exp_cubic on its principal domain, X = (A - A^-1) / (2 f1).

    Raises:
        ChartOverflowError: rotation angle within CHART_MARGIN of pi, or A
            outside the image of the exponential
    """
    c = (float(np.trace(A)) - 1.0) / 2.0
    if c < -1.0 - 1e-12:
        raise ChartOverflowError("element is not in the image of the exponential")
    if c <= 1.0:
        theta = float(np.arccos(min(1.0, max(-1.0, c))))
        if theta > np.pi - CHART_MARGIN:
            raise ChartOverflowError(f"chart overflow: rotation angle {theta:.6f} too close to pi")
        f1 = float(np.sinc(theta / np.pi))
    else:
        s = float(np.arccosh(c))
        f1 = float(np.sinh(s) / s) if s > 1e-8 else 1.0
    return (A - A_inv) / (2.0 * f1)


def group_exp(group: GroupId, xi: ArrayLike) -> GroupElement:
    """exp of sum xi_i e_i in the group's fixed basis."""
    group = GroupId(group)
    X = basis_of(group).matrix(xi)
    if group in (GroupId.SO3, GroupId.SO21):
        return GroupElement(group, exp_cubic(X))
    return GroupElement(group, linalg.expm(X))


def group_log(g: GroupElement) -> NDArray[np.float64]:
    """Algebra coordinates of log g for SO(3) and SO(2,1)."""
    match g.group:
        case GroupId.SO3:
            X = log_cubic(g.m, g.m.T)
        case GroupId.SO21:
            X = log_cubic(g.m, ETA21 @ g.m.T @ ETA21)
        case _:
            raise ContractError(f"group_log supports SO3 and SO21, not {g.group}")
    return basis_of(g.group).coords(X)


# === Adjoint representations ===


def adjoint_rep(g: GroupElement) -> NDArray[np.float64]:
    """Matrix of Ad_g in the fixed algebra basis."""
    basis = basis_of(g.group)
    inv = np.linalg.inv(g.m)
    return np.column_stack([basis.coords(g.m @ e @ inv) for e in basis.mats])


def coadjoint_rep(g: GroupElement) -> NDArray[np.float64]:
    """Ad*_g = (Ad_{g^-1})^T in dual coordinates."""
    return adjoint_rep(ginv(g)).T


# === Bundle groups ===


@dataclass(frozen=True, eq=False)
class SemidirectElement:
    """(sigma, payload) in G x| g (adjoint) or G x| g* (coadjoint)."""

    sigma: GroupElement
    payload: NDArray[np.float64]
    variant: Variant = Variant.COADJOINT

    def __post_init__(self) -> None:
        payload = np.array(self.payload, dtype=float)
        n = algebra_of(self.sigma.group).dim
        if payload.shape != (n,):
            raise ContractError(f"payload has shape {payload.shape}, expected ({n},)")
        payload.setflags(write=False)
        object.__setattr__(self, "payload", payload)
        object.__setattr__(self, "variant", Variant(self.variant))

    @property
    def group(self) -> GroupId:
        return self.sigma.group

    def __matmul__(self, other: "SemidirectElement") -> "SemidirectElement":
        return semidirect_mul(self, other)

    def as_array(self) -> NDArray:
        """Flat view for residual comparisons."""
        return np.concatenate([self.sigma.m.ravel(), self.payload])


def _action(variant: Variant, g: GroupElement) -> NDArray[np.float64]:
    return adjoint_rep(g) if variant is Variant.ADJOINT else coadjoint_rep(g)


def semidirect_mul(a: SemidirectElement, b: SemidirectElement) -> SemidirectElement:
    """(s1, x)(s2, y) = (s1 s2, x + Ad_s1 y), coadjoint: (s1 s2, f + Ad*_s1 g)."""
    if a.variant is not b.variant:
        raise ContractError(f"cannot multiply {a.variant} by {b.variant} elements")
    sigma = gmul(a.sigma, b.sigma)
    return SemidirectElement(sigma, a.payload + _action(a.variant, a.sigma) @ b.payload, a.variant)


def semidirect_inv(a: SemidirectElement) -> SemidirectElement:
    """(s, x)^-1 = (s^-1, -Ad_{s^-1} x)."""
    sigma = ginv(a.sigma)
    return SemidirectElement(sigma, -_action(a.variant, sigma) @ a.payload, a.variant)


def semidirect_identity(group: GroupId, variant: Variant) -> SemidirectElement:
    group = GroupId(group)
    return SemidirectElement(identity(group), np.zeros(algebra_of(group).dim), variant)


def bundle_algebra(group: GroupId, variant: Variant) -> LieAlgebra:
    """Lie algebra of the bundle group, basis (e_i, then payload basis)."""
    L = algebra_of(GroupId(group))
    return tangent_algebra(L) if Variant(variant) is Variant.ADJOINT else cotangent_algebra(L)


def commutator_bracket(
    group: GroupId, variant: Variant, u: ArrayLike, v: ArrayLike, h: float = 1e-4
) -> NDArray[np.float64]:
    """Bracket of the bundle algebra read off group commutators.

    Uses the curves t -> (exp(t x), t f) and averages the commutators at
    +h and -h, which cancels the third-order term.
    """
    group = GroupId(group)
    n = algebra_of(group).dim
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)

    def curve(w: NDArray, t: float) -> SemidirectElement:
        return SemidirectElement(group_exp(group, t * w[:n]), t * w[n:], variant)

    total = np.zeros(2 * n)
    for t in (h, -h):
        a, b = curve(u, t), curve(v, t)
        c = a @ b @ semidirect_inv(a) @ semidirect_inv(b)
        total += np.concatenate([group_log(c.sigma), c.payload])
    return total / (2 * h * h)


# === Heisenberg group ===


@dataclass(frozen=True)
class HeisenbergPoint:
    """Global coordinates (x, y, z) of H3."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __mul__(self, other: "HeisenbergPoint") -> "HeisenbergPoint":
        return HeisenbergPoint(self.x + other.x, self.y + other.y, self.z + other.z + self.x * other.y)

    def inverse(self) -> "HeisenbergPoint":
        return HeisenbergPoint(-self.x, -self.y, -self.z + self.x * self.y)

    def as_array(self) -> NDArray[np.float64]:
        return np.array([self.x, self.y, self.z])

    def to_element(self) -> GroupElement:
        return GroupElement(GroupId.H3, [[1.0, self.x, self.z], [0.0, 1.0, self.y], [0.0, 0.0, 1.0]])

    @classmethod
    def from_element(cls, g: GroupElement) -> "HeisenbergPoint":
        if g.group is not GroupId.H3:
            raise ContractError(f"expected an H3 element, got {g.group}")
        return cls(float(g.m[0, 1]), float(g.m[1, 2]), float(g.m[0, 2]))


def h3_left_frame(p: ArrayLike) -> NDArray[np.float64]:
    """Columns e1+ = dx, e2+ = dy + x dz, e3+ = dz at the chart point p."""
    x = float(np.asarray(p, dtype=float)[0])
    return np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, x, 1.0]])
