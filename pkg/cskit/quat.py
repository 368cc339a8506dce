"""Quaternions, split quaternions and their dual extensions.

Quaternion products follow the Hamilton convention i*j = k. Split
quaternions have i^2 = -1, j^2 = k^2 = 1, ijk = 1 and the indefinite form
<Q, P> = q0 p0 + qx px - qy py - qz pz. Dual variants Q_r + e Q_d use e^2 = 0.
"""

import logging
import math
import re
from dataclasses import dataclass
from typing import Self, TypeVar

import numpy as np
from numpy.typing import ArrayLike, NDArray

from cskit.errors import ContractError, NonInvertibleError
from cskit.types import CausalType

log = logging.getLogger(__name__)

ZERO_NORM = 1e-300
UNIT_TOL = 1e-12


@dataclass(frozen=True)
class _QuaternionBase:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a: ArrayLike) -> Self:
        w, x, y, z = (float(v) for v in np.asarray(a, dtype=float))
        return cls(w, x, y, z)

    @classmethod
    def pure(cls, v: ArrayLike) -> Self:
        x, y, z = (float(c) for c in np.asarray(v, dtype=float))
        return cls(0.0, x, y, z)

    def as_array(self) -> NDArray[np.float64]:
        return np.array([self.w, self.x, self.y, self.z])

    @property
    def vec(self) -> NDArray[np.float64]:
        return np.array([self.x, self.y, self.z])

    def _product(self, other: Self) -> Self:
        raise NotImplementedError

    def pairing(self, other: Self) -> float:
        raise NotImplementedError

    def __mul__(self, other: "Self | float") -> Self:
        if isinstance(other, (int, float)):
            return type(self)(self.w * other, self.x * other, self.y * other, self.z * other)
        if type(other) is not type(self):
            return NotImplemented
        return self._product(other)

    def __rmul__(self, other: float) -> Self:
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def __truediv__(self, s: float) -> Self:
        return self * (1.0 / s)

    def __add__(self, other: Self) -> Self:
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: Self) -> Self:
        return self + (-other)

    def __neg__(self) -> Self:
        return type(self)(-self.w, -self.x, -self.y, -self.z)

    def conj(self) -> Self:
        return type(self)(self.w, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.pairing(self)

    def inverse(self) -> Self:
        n = self.norm2()
        if abs(n) <= ZERO_NORM:
            raise NonInvertibleError(f"non-invertible: {self} has zero norm")
        return self.conj() / n

    def is_unit(self, tol: float = UNIT_TOL) -> bool:
        return abs(self.norm2() - 1.0) <= tol

    def __str__(self) -> str:
        return format_quaternion(self)


@dataclass(frozen=True)
class Quaternion(_QuaternionBase):
    """Hamilton quaternion w + x i + y j + z k."""

    def _product(self, other: "Quaternion") -> "Quaternion":
        return qmul(self, other)

    def pairing(self, other: "Quaternion") -> float:
        return self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z


@dataclass(frozen=True)
class SplitQuaternion(_QuaternionBase):
    """Split quaternion w + x i + y j + z k with i^2 = -1, j^2 = k^2 = 1."""

    def _product(self, other: "SplitQuaternion") -> "SplitQuaternion":
        return smul(self, other)

    def pairing(self, other: "SplitQuaternion") -> float:
        return self.w * other.w + self.x * other.x - self.y * other.y - self.z * other.z

    def causal_type(self) -> CausalType:
        """Causal character of the vector part."""
        return causal_type(self.vec)


# === Quaternions ===


def qmul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product p0 q0 - p.q + p0 q + q0 p + p x q."""
    return Quaternion(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + q.w * p.x + p.y * q.z - p.z * q.y,
        p.w * q.y + q.w * p.y + p.z * q.x - p.x * q.z,
        p.w * q.z + q.w * p.z + p.x * q.y - p.y * q.x,
    )


def qconj(q: Quaternion) -> Quaternion:
    return q.conj()


def qnorm2(q: Quaternion) -> float:
    return q.norm2()


def qinv(q: Quaternion) -> Quaternion:
    return q.inverse()


def quat_exp(v: ArrayLike) -> Quaternion:
    """exp of the pure quaternion v: cos|v| + sin|v| v/|v|."""
    v = np.asarray(v, dtype=float)
    theta = float(np.linalg.norm(v))
    s = float(np.sinc(theta / np.pi))
    return Quaternion(math.cos(theta), *(s * v))


def quat_angle_axis(q: Quaternion) -> tuple[float, NDArray[np.float64]]:
    """Rotation angle in [0, 2pi) and unit axis of a unit quaternion.

    The identity returns angle 0 with the z axis.
    """
    if not q.is_unit():
        raise ContractError("angle-axis needs a unit quaternion")
    s = float(np.linalg.norm(q.vec))
    if s == 0.0:
        return 0.0, np.array([0.0, 0.0, 1.0])
    return 2.0 * math.atan2(s, q.w), q.vec / s


# === Split quaternions ===


def smul(q: SplitQuaternion, p: SplitQuaternion) -> SplitQuaternion:
    """Split product q p, component formula with the Minkowski cross product."""
    cx, cy, cz = minkowski_cross(q.vec, p.vec)
    return SplitQuaternion(
        q.w * p.w - (p.x * q.x - p.y * q.y - p.z * q.z),
        q.w * p.x + p.w * q.x + cx,
        q.w * p.y + p.w * q.y + cy,
        q.w * p.z + p.w * q.z + cz,
    )


def minkowski_cross(q: ArrayLike, p: ArrayLike) -> NDArray[np.float64]:
    """q x_s p = (qz py - qy pz) i + (qz px - qx pz) j + (qx py - qy px) k."""
    qx, qy, qz = np.asarray(q, dtype=float)
    px, py, pz = np.asarray(p, dtype=float)
    return np.array([qz * py - qy * pz, qz * px - qx * pz, qx * py - qy * px])


def lorentz_dot(a: ArrayLike, b: ArrayLike) -> float:
    """<a, b> = ax bx - ay by - az bz on vector parts."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(a[0] * b[0] - a[1] * b[1] - a[2] * b[2])


def _lightlike_tol(v: NDArray[np.float64]) -> float:
    return 1e-12 * max(1.0, float(v @ v))


def causal_type(v: ArrayLike) -> CausalType:
    """Timelike (<v,v> > 0), spacelike (< 0) or lightlike (zero within tolerance).

    The zero vector is reported as lightlike.
    """
    v = np.asarray(v, dtype=float)
    n = lorentz_dot(v, v)
    if abs(n) < _lightlike_tol(v):
        return CausalType.LIGHTLIKE
    return CausalType.TIMELIKE if n > 0 else CausalType.SPACELIKE


def _exp_coefficients(n: float) -> tuple[float, float]:
    """(C, S) with exp(v) = C + S v for <v, v> = n; continuous through n = 0."""
    if n >= 0:
        theta = math.sqrt(n)
        return math.cos(theta), float(np.sinc(theta / np.pi))
    gamma = math.sqrt(-n)
    return math.cosh(gamma), math.sinh(gamma) / gamma


def split_exp(v: SplitQuaternion | ArrayLike) -> SplitQuaternion:
    """Exponential of a pure split quaternion; the result is unit.

    Timelike v gives cos(theta) + sin(theta) u, spacelike v gives
    cosh(gamma) + sinh(gamma) u, lightlike v gives 1 + v (v^2 = 0).
    """
    if isinstance(v, SplitQuaternion):
        if v.w != 0.0:
            raise ContractError("split_exp needs a pure split quaternion")
        v = v.vec
    v = np.asarray(v, dtype=float)
    c, s = _exp_coefficients(lorentz_dot(v, v))
    return SplitQuaternion(c, *(s * v))


def split_log(q: SplitQuaternion) -> NDArray[np.float64]:
    """Vector part v with split_exp(v) = q, for unit q in the image of exp."""
    if abs(q.norm2() - 1.0) > 1e-10:
        raise ContractError("split_log needs a unit split quaternion")
    vec = q.vec
    n = lorentz_dot(vec, vec)
    if n > 0:
        s = math.sqrt(n)
        return math.atan2(s, q.w) / s * vec
    if q.w < 0:
        raise ContractError(f"{q} is not the exponential of a pure split quaternion")
    if n == 0:
        return vec
    s = math.sqrt(-n)
    return math.asinh(s) / s * vec


# === Dual numbers and dual quaternions ===


@dataclass(frozen=True)
class DualNumber:
    """a + e b with e^2 = 0."""

    re: float
    du: float = 0.0

    def __mul__(self, other: "DualNumber") -> "DualNumber":
        return DualNumber(self.re * other.re, self.re * other.du + self.du * other.re)

    def __add__(self, other: "DualNumber") -> "DualNumber":
        return DualNumber(self.re + other.re, self.du + other.du)

    def isclose(self, other: "DualNumber", tol: float = UNIT_TOL) -> bool:
        return abs(self.re - other.re) <= tol and abs(self.du - other.du) <= tol


@dataclass(frozen=True)
class _DualBase:
    real: _QuaternionBase
    dual: _QuaternionBase

    def __post_init__(self) -> None:
        if type(self.real) is not type(self.dual):
            raise ContractError("real and dual parts must be the same algebra")

    def __mul__(self, other: Self) -> Self:
        return dmul(self, other)

    def conj(self) -> Self:
        return dconj(self)

    def inverse(self) -> Self:
        return dinv(self)

    def norm2(self) -> DualNumber:
        return dnorm2(self)

    def is_unit(self, tol: float = UNIT_TOL) -> bool:
        return self.norm2().isclose(DualNumber(1.0, 0.0), tol)

    def as_array(self) -> NDArray[np.float64]:
        return np.concatenate([self.real.as_array(), self.dual.as_array()])

    def __str__(self) -> str:
        return format_quaternion(self)


@dataclass(frozen=True)
class DualQuaternion(_DualBase):
    """Q_r + e Q_d over the Hamilton quaternions."""

    real: Quaternion
    dual: Quaternion = Quaternion()


@dataclass(frozen=True)
class DualSplitQuaternion(_DualBase):
    """Q_r + e Q_d over the split quaternions."""

    real: SplitQuaternion
    dual: SplitQuaternion = SplitQuaternion()


def dmul(a: _DualBase, b: _DualBase) -> _DualBase:
    """(A_r + e A_d)(B_r + e B_d) = A_r B_r + e (A_r B_d + A_d B_r)."""
    if type(a) is not type(b):
        raise ContractError(f"cannot multiply {type(a).__name__} by {type(b).__name__}")
    return type(a)(a.real * b.real, a.real * b.dual + a.dual * b.real)


def dconj(a: _DualBase) -> _DualBase:
    """Quaternionic conjugate of both parts, Q_r* + e Q_d*."""
    return type(a)(a.real.conj(), a.dual.conj())


def dnorm2(a: _DualBase) -> DualNumber:
    """Squared magnitude ||Q_r||^2 + 2e <Q_r, Q_d> with the algebra's pairing."""
    return DualNumber(a.real.pairing(a.real), 2.0 * a.real.pairing(a.dual))


def dinv(a: _DualBase) -> _DualBase:
    """Q_r^-1 - e (Q_r^-1 Q_d Q_r^-1)."""
    r = a.real.inverse()
    return type(a)(r, -(r * a.dual * r))


def _check_unit(q: _QuaternionBase) -> None:
    if abs(q.norm2() - 1.0) > UNIT_TOL:
        raise ContractError(f"{q} is not a unit element (norm2 = {q.norm2()!r})")


def unit_dq_from_pose(q: Quaternion, u: ArrayLike) -> DualQuaternion:
    """Unit dual quaternion Q + e (u Q) for rotation Q and translation u."""
    _check_unit(q)
    return DualQuaternion(q, Quaternion.pure(u) * q)


def unit_dsq_from_pose(q: SplitQuaternion, u: ArrayLike) -> DualSplitQuaternion:
    """Unit dual split quaternion Q + e (u Q)."""
    _check_unit(q)
    return DualSplitQuaternion(q, SplitQuaternion.pure(u) * q)


# === Text format ===

Q = TypeVar("Q", bound=_QuaternionBase)
D = TypeVar("D", bound=_DualBase)

_DUAL_RE = re.compile(r"^(?P<real>.+) \+ e\((?P<dual>.+)\)$")
_UNITS = ("", "i", "j", "k")


def format_quaternion(q: _QuaternionBase | _DualBase) -> str:
    """"w + x i + y j + z k", or "Qr + e(Qd)" for dual variants."""
    if isinstance(q, _DualBase):
        return f"{format_quaternion(q.real)} + e({format_quaternion(q.dual)})"
    parts = [f"{v:.17g}" + (f" {unit}" if unit else "") for v, unit in zip(q.as_array(), _UNITS)]
    return " + ".join(parts)


def parse_quaternion(text: str, cls: type[Q] = Quaternion) -> Q:
    """Parse the "w + x i + y j + z k" format."""
    parts = text.strip().split(" + ")
    if len(parts) != 4:
        raise ValueError(f"expected 'w + x i + y j + z k', got {text!r}")
    values = []
    for part, unit in zip(parts, _UNITS):
        number, _, suffix = part.strip().partition(" ")
        if suffix != unit:
            raise ValueError(f"expected unit {unit or 'none'!r} in {part!r}")
        values.append(float(number))
    return cls(*values)


def parse_dual(text: str, cls: type[D] = DualQuaternion) -> D:
    """Parse the "Qr + e(Qd)" format."""
    match = _DUAL_RE.match(text.strip())
    if not match:
        raise ValueError(f"expected 'Qr + e(Qd)', got {text!r}")
    part = SplitQuaternion if cls is DualSplitQuaternion else Quaternion
    return cls(parse_quaternion(match["real"], part), parse_quaternion(match["dual"], part))
