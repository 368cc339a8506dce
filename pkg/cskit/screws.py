"""Twists, screw motions and geodesics on SE(3) and SE(2,1).

Twists are coordinate 6-vectors (omega, v) in the se3 / se21 bases: the
rotation part goes through hat_F (euclidean) or hat_H (minkowski), the
translation part is taken verbatim.
"""

import argparse
import csv
import io
import logging
import sys
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from cskit.algebras import builtin
from cskit.errors import ContractError
from cskit.groups import (
    ETA21,
    GroupElement,
    basis_of,
    cubic_coefficients,
    generator_kappa,
    gmul,
    identity,
    log_cubic,
)
from cskit.isomaps import hat_F, hat_F_inverse, hat_H, hat_H_inverse, rigid_metric
from cskit.lie_core import BilinearForm, LieAlgebra
from cskit.metrics import OddCotangentParams, cotangent_metric, signature
from cskit.output import effective_config, emit, fail
from cskit.types import GroupId, ObstructionReport, Space

log = logging.getLogger(__name__)

PURE_TRANSLATION_ANGLE = 1e-10
# t bounded away from zero in obstruction grids
GRID_T_MIN = 1e-6

_HAT = {Space.EUCLIDEAN: (hat_F, hat_F_inverse), Space.MINKOWSKI: (hat_H, hat_H_inverse)}
_GROUP = {Space.EUCLIDEAN: GroupId.SE3, Space.MINKOWSKI: GroupId.SE21}
_BASE_ALGEBRA = {Space.EUCLIDEAN: "so3", Space.MINKOWSKI: "so21"}


def space_of(group: GroupId) -> Space:
    match group:
        case GroupId.SE3:
            return Space.EUCLIDEAN
        case GroupId.SE21:
            return Space.MINKOWSKI
    raise ContractError(f"{group} is not a rigid-motion group")


@dataclass(frozen=True)
class Twist:
    """Element of se(3) or se(2,1)."""

    omega: tuple[float, float, float]
    v: tuple[float, float, float]
    space: Space = Space.EUCLIDEAN

    def __post_init__(self) -> None:
        object.__setattr__(self, "omega", tuple(float(c) for c in self.omega))
        object.__setattr__(self, "v", tuple(float(c) for c in self.v))
        object.__setattr__(self, "space", Space(self.space))
        if len(self.omega) != 3 or len(self.v) != 3:
            raise ContractError("twist parts must be 3-vectors")

    @classmethod
    def from_array(cls, a: ArrayLike, space: Space = Space.EUCLIDEAN) -> "Twist":
        a = np.asarray(a, dtype=float)
        if a.shape != (6,):
            raise ContractError(f"twist coordinates have shape {a.shape}, expected (6,)")
        return cls(tuple(a[:3]), tuple(a[3:]), space)

    def as_array(self) -> NDArray[np.float64]:
        return np.array(self.omega + self.v)

    @property
    def group(self) -> GroupId:
        return _GROUP[self.space]

    def matrix(self) -> NDArray[np.float64]:
        """4x4 generator [[hat(omega), v], [0, 0]]."""
        hat, _ = _HAT[self.space]
        m = np.zeros((4, 4))
        m[:3, :3] = hat(self.omega)
        m[:3, 3] = self.v
        return m


@dataclass(frozen=True)
class ScrewParams:
    """Screw motion: rotate by angle about the axis, translate pitch * angle along it.

    For pure translations the axis direction is the translation direction
    and distance its length.
    """

    axis_point: NDArray[np.float64]
    axis_dir: NDArray[np.float64]
    angle: float
    pitch: float
    pure_translation: bool = False
    distance: float = 0.0

    def __post_init__(self) -> None:
        direction = np.asarray(self.axis_dir, dtype=float)
        if not self.pure_translation and abs(np.linalg.norm(direction) - 1.0) > 1e-12:
            raise ContractError("screw axis direction must be a unit vector")
        object.__setattr__(self, "axis_point", np.asarray(self.axis_point, dtype=float))
        object.__setattr__(self, "axis_dir", direction)

    def to_twist(self) -> Twist:
        """Twist whose time-one exponential is this screw motion."""
        if self.pure_translation:
            return Twist((0.0, 0.0, 0.0), tuple(self.distance * self.axis_dir))
        omega = self.angle * self.axis_dir
        v = self.angle * (-np.cross(self.axis_dir, self.axis_point) + self.pitch * self.axis_dir)
        return Twist(tuple(omega), tuple(v))


def _rigid_parts(rotation: NDArray, translation: NDArray, group: GroupId) -> GroupElement:
    m = np.eye(4)
    m[:3, :3] = rotation
    m[:3, 3] = translation
    return GroupElement(group, m)


def twist_exp(xi: Twist, t: float = 1.0) -> GroupElement:
    """exp(t xi) in closed form.

    With A = t hat(omega) and A^3 = kappa A the rotation block is
    I + f1 A + f2 A^2 and the translation is (I + f2 A + g2 A^2) t v.
    """
    hat, _ = _HAT[xi.space]
    A = t * hat(xi.omega)
    f1, f2, g2 = cubic_coefficients(generator_kappa(A))
    A2 = A @ A
    rotation = np.eye(3) + f1 * A + f2 * A2
    V = np.eye(3) + f2 * A + g2 * A2
    return _rigid_parts(rotation, V @ (t * np.asarray(xi.v)), xi.group)


def _rotation_inverse(rotation: NDArray, space: Space) -> NDArray:
    return rotation.T if space is Space.EUCLIDEAN else ETA21 @ rotation.T @ ETA21


def twist_log(g: GroupElement) -> Twist:
    """Inverse of twist_exp(., 1) on the principal domain.

    Raises:
        ChartOverflowError: rotation angle too close to pi
    """
    space = space_of(g.group)
    _, hat_inverse = _HAT[space]
    rotation, translation = g.m[:3, :3], g.m[:3, 3]
    X = log_cubic(rotation, _rotation_inverse(rotation, space))
    _, f2, g2 = cubic_coefficients(generator_kappa(X))
    V = np.eye(3) + f2 * X + g2 * (X @ X)
    return Twist(tuple(hat_inverse(X)), tuple(np.linalg.solve(V, translation)), space)


def _axis_from_rotation(rotation: NDArray, theta: float) -> NDArray[np.float64]:
    vee = hat_F_inverse(rotation - rotation.T)
    if theta <= np.pi / 2:
        return vee / np.linalg.norm(vee)
    # near pi the antisymmetric part vanishes; use the symmetric part instead
    c = np.cos(theta)
    outer = ((rotation + rotation.T) / 2 - c * np.eye(3)) / (1 - c)
    k = int(np.argmax(np.diag(outer)))
    axis = outer[:, k] / np.sqrt(outer[k, k])
    axis /= np.linalg.norm(axis)
    if np.linalg.norm(vee) > 1e-12:
        return axis if axis @ vee >= 0 else -axis
    first = axis[np.flatnonzero(np.abs(axis) > 1e-12)[0]]
    return axis if first > 0 else -axis


def screw_decompose(g: GroupElement) -> ScrewParams:
    """Screw parameters of an SE(3) element; angle in [0, pi]."""
    if g.group is not GroupId.SE3:
        raise ContractError(f"screw decomposition needs an SE3 element, got {g.group}")
    rotation, translation = g.m[:3, :3], g.m[:3, 3]
    sine = np.linalg.norm(hat_F_inverse(rotation - rotation.T)) / 2
    theta = float(np.arctan2(sine, (np.trace(rotation) - 1.0) / 2.0))
    if theta < PURE_TRANSLATION_ANGLE:
        dist = float(np.linalg.norm(translation))
        direction = translation / dist if dist > 0 else np.array([0.0, 0.0, 1.0])
        return ScrewParams(np.zeros(3), direction, 0.0, 0.0, pure_translation=True, distance=dist)
    axis = _axis_from_rotation(rotation, theta)
    W = hat_F(theta * axis)
    _, f2, g2 = cubic_coefficients(-theta * theta)
    v = np.linalg.solve(np.eye(3) + f2 * W + g2 * (W @ W), translation) / theta
    log.debug("screw angle %.6f, axis %s", theta, axis)
    return ScrewParams(np.cross(axis, v), axis, theta, float(axis @ v))


def geodesic_sample(g0: GroupElement, xi: Twist, ts: Iterable[float]) -> list[GroupElement]:
    """Points exp(t xi) g0 of the geodesic through g0 with direction xi."""
    return [gmul(twist_exp(xi, t), g0) for t in ts]


# === Geodesic equation in the exponential chart ===


class RigidChart:
    """Chart c = (log of the rotation block, translation) on SE(3) or SE(2,1)."""

    def __init__(self, space: Space) -> None:
        self.space = Space(space)
        self.group = _GROUP[self.space]
        self.basis = basis_of(self.group)
        self._hat, self._hat_inverse = _HAT[self.space]

    def point(self, c: NDArray[np.float64]) -> NDArray[np.float64]:
        """Matrix of the chart point c."""
        rotation = twist_exp(Twist(tuple(c[:3]), (0.0, 0.0, 0.0), self.space)).m[:3, :3]
        m = np.eye(4)
        m[:3, :3] = rotation
        m[:3, 3] = c[3:]
        return m

    def coords(self, m: NDArray[np.float64]) -> NDArray[np.float64]:
        rotation = m[:3, :3]
        X = log_cubic(rotation, _rotation_inverse(rotation, self.space))
        return np.concatenate([self._hat_inverse(X), m[:3, 3]])

    def right_jacobian(self, c: NDArray[np.float64], h: float) -> NDArray[np.float64]:
        """Columns: right-trivialized twist of each coordinate direction."""
        inv = np.linalg.inv(self.point(c))
        cols = []
        for j in range(6):
            step = np.zeros(6)
            step[j] = h
            diff = (self.point(c + step) - self.point(c - step)) @ inv / (2 * h)
            cols.append(self.basis.coords(diff))
        return np.column_stack(cols)


def geodesic_residual(
    space: Space,
    metric: BilinearForm | ArrayLike,
    g0: GroupElement,
    xi: Twist,
    ts: Sequence[float] = (-0.5, -0.25, 0.0, 0.25, 0.5),
    h: float = 1e-4,
    dt: float = 1e-3,
) -> float:
    """Worst |gamma'' + Gamma(gamma', gamma')| along t -> exp(t xi) g0.

    The bundle-algebra metric (T*so3 / T*so21 basis) is transported to the
    twist algebra through T / T', extended right-invariantly and expressed
    in the chart; Christoffel symbols come from central differences of the
    chart metric with step h, curve derivatives from central differences
    in t with step dt.

    Raises:
        ChartOverflowError: a sampled point leaves the chart
    """
    space = Space(space)
    chart = RigidChart(space)
    M = rigid_metric(space, metric).m

    def chart_metric(c: NDArray[np.float64]) -> NDArray[np.float64]:
        J = chart.right_jacobian(c, h)
        return J.T @ M @ J

    worst = 0.0
    for t in ts:
        c_prev, c, c_next = (chart.coords(gmul(twist_exp(xi, s), g0).m) for s in (t - dt, t, t + dt))
        velocity = (c_next - c_prev) / (2 * dt)
        accel = (c_next - 2 * c + c_prev) / (dt * dt)
        G = chart_metric(c)
        dG = np.zeros((6, 6, 6))
        for l in range(6):
            step = np.zeros(6)
            step[l] = h
            dG[l] = (chart_metric(c + step) - chart_metric(c - step)) / (2 * h)
        # first kind: Gamma_lij = (d_i G_lj + d_j G_li - d_l G_ij) / 2
        first = 0.5 * (np.transpose(dG, (1, 0, 2)) + np.transpose(dG, (1, 2, 0)) - dG)
        christoffel = np.linalg.solve(G, first.reshape(6, 36)).reshape(6, 6, 6)
        residual = accel + np.einsum("kij,i,j->k", christoffel, velocity, velocity)
        worst = max(worst, float(np.abs(residual).max()))
    return worst


# === Riemannian obstruction ===


def default_grid(n: int = 10) -> list[tuple[float, float]]:
    """n x n grid over s in [-5, 5], t in [0.1, 5]."""
    return [(float(s), float(t)) for s in np.linspace(-5, 5, n) for t in np.linspace(0.1, 5, n)]


def riemannian_obstruction_scan(space: Space, grid: Sequence[Sequence[float]]) -> ObstructionReport:
    """Signature of every Cartan-Schouten metric of the (s, t) family over the grid.

    The base algebras so3 and so21 have a one-dimensional centralizer, so
    only the odd family applies. |t| must be at least GRID_T_MIN.
    """
    space = Space(space)
    if not grid:
        raise ContractError("parameter grid is empty")
    L: LieAlgebra = builtin(_BASE_ALGEBRA[space])
    points, signatures = [], []
    for point in grid:
        point = tuple(float(v) for v in point)
        if len(point) != 2:
            raise ContractError(f"grid point {point} must be an (s, t) pair")
        if abs(point[1]) < GRID_T_MIN:
            raise ContractError(f"grid point {point}: |t| must be at least {GRID_T_MIN}")
        B = rigid_metric(space, cotangent_metric(L, OddCotangentParams(*point)))
        points.append(point)
        signatures.append(signature(B))
    report = ObstructionReport(str(space), points, signatures)
    log.debug("%s obstruction scan: %d points, min negative index %d", space, len(points), report.min_neg)
    return report


# === Trajectory export ===


def trajectory_header() -> list[str]:
    return ["t"] + [f"m{i}{j}" for i in range(4) for j in range(4)]


def generate_trajectory_csv(ts: Sequence[float], elements: Sequence[GroupElement]) -> str:
    """CSV with header t,m00,...,m33 and one row-major 4x4 matrix per line."""
    output = io.StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(trajectory_header())
    for t, g in zip(ts, elements, strict=True):
        writer.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in g.m.ravel()])
    return output.getvalue()


def write_trajectory_csv(path: Path, ts: Sequence[float], elements: Sequence[GroupElement]) -> None:
    path.write_text(generate_trajectory_csv(ts, elements))


# === Commands ===

SPACES = {"se3": Space.EUCLIDEAN, "se21": Space.MINKOWSKI}


def screw_document(sp: ScrewParams) -> dict:
    return {
        "axis_point": sp.axis_point,
        "axis_dir": sp.axis_dir,
        "angle": sp.angle,
        "pitch": sp.pitch,
        "pure_translation": sp.pure_translation,
        "distance": sp.distance,
    }


def geodesic_command(args: argparse.Namespace) -> None:
    """Handle geodesic subcommand."""
    cfg = effective_config(args)
    if args.steps < 2:
        fail("--steps must be at least 2", 2)
    space = SPACES[args.space]
    xi = Twist(tuple(args.omega), tuple(args.v), space)
    ts = [float(t) for t in np.linspace(args.t0, args.t1, args.steps)]
    elements = geodesic_sample(identity(xi.group), xi, ts)

    if not args.out:
        sys.stdout.write(generate_trajectory_csv(ts, elements))
        return

    write_trajectory_csv(Path(args.out), ts, elements)
    doc: dict = {"space": args.space, "points": len(ts), "out": args.out}
    if space is Space.EUCLIDEAN:
        doc["screw"] = screw_document(screw_decompose(elements[-1]))
    emit(doc, cfg.output_format)
