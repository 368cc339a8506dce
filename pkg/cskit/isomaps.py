"""Covering maps and isomorphisms between quaternionic and matrix groups.

Covers: psi (H -> 2x2 complex), rot3 (unit H -> SO(3)), pi_cover (unit dual
quaternions -> SE(3)), omega (split H -> 2x2 real), rot21 (unit split
H -> SO(2,1)), pi_split_cover (unit dual split quaternions -> SE(2,1)).

Isomorphisms of bundle groups: T (T*SO(3) -> SE(3)), T' (T*SO(2,1) ->
SE(2,1)), phibar (unit dual quaternions -> T*SU(2)), p_iso (unit dual
split quaternions -> TSL(2,R)) and Phi (TG -> T*G through a biinvariant
form). Every map has an explicit inverse.
"""

import argparse
import logging
import sys
from collections.abc import Callable
from dataclasses import dataclass, replace
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from cskit.algebras import HAT_H_BASIS, MatrixBasis, from_matrices, matrix_basis
from cskit.errors import ContractError, DegenerateError
from cskit.groups import (
    GroupElement,
    SemidirectElement,
    adjoint_rep,
    algebra_of,
    basis_of,
    coadjoint_rep,
    element,
    gmul,
    group_exp,
    membership_residual,
    semidirect_mul,
)
from cskit.lie_core import (
    BilinearForm,
    LieAlgebra,
    ad_invariance_residual,
    cotangent_algebra,
    killing_form,
    lie_hom_residual,
    tangent_algebra,
)
from cskit.output import effective_config, emit
from cskit.quat import (
    DualQuaternion,
    DualSplitQuaternion,
    Quaternion,
    SplitQuaternion,
    split_exp,
    unit_dq_from_pose,
    unit_dsq_from_pose,
)
from cskit.types import GroupId, Space, Variant

log = logging.getLogger(__name__)

INVARIANCE_TOL = 1e-10
UNIT_TOL = 1e-12

# psi images of 1, i, j, k
PSI_UNITS = np.array(
    [
        [[1, 0], [0, 1]],
        [[-1j, 0], [0, 1j]],
        [[0, -1], [1, 0]],
        [[0, 1j], [1j, 0]],
    ],
    dtype=complex,
)
# omega images of 1, i, j, k
OMEGA_UNITS = np.array(
    [
        [[1.0, 0.0], [0.0, 1.0]],
        [[0.0, 1.0], [-1.0, 0.0]],
        [[0.0, 1.0], [1.0, 0.0]],
        [[1.0, 0.0], [0.0, -1.0]],
    ]
)

_S5 = np.sqrt(5.0)
# f(E1), f(E2), f(E3) for E1 = E12+E21, E2 = -(E13+E31), E3 = E32-E23
F_ISO_IMAGES = np.array(
    [
        [[_S5 / 4, -0.5], [1 / 8, -_S5 / 4]],
        [[0.0, -1.0], [-0.25, 0.0]],
        [[0.25, -_S5 / 2], [_S5 / 8, -0.25]],
    ]
)
F_ISO_DOMAIN = MatrixBasis(("E1", "E2", "E3"), HAT_H_BASIS[::-1])


def _require_unit(q: Quaternion | SplitQuaternion | DualQuaternion | DualSplitQuaternion) -> None:
    if not q.is_unit(UNIT_TOL):
        raise ContractError(f"{q} is not a unit element")


# === Hat maps ===


def hat_F(u: ArrayLike) -> NDArray[np.float64]:
    """Matrix of y -> u x y."""
    x, y, z = np.asarray(u, dtype=float)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def hat_F_inverse(m: ArrayLike) -> NDArray[np.float64]:
    m = np.asarray(m, dtype=float)
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def hat_H(n: ArrayLike) -> NDArray[np.float64]:
    """Matrix of y -> n x_s y: n1 (E32-E23) - n2 (E13+E31) + n3 (E12+E21)."""
    return np.tensordot(np.asarray(n, dtype=float), HAT_H_BASIS, axes=1)


def hat_H_inverse(m: ArrayLike) -> NDArray[np.float64]:
    m = np.asarray(m, dtype=float)
    return np.array([m[2, 1], -m[0, 2], m[0, 1]])


# === Quaternion covers ===


def psi(q: Quaternion, units: NDArray = PSI_UNITS) -> NDArray[np.complex128]:
    """Linear extension of 1, i, j, k -> X0, X1, X2, X3."""
    return np.tensordot(q.as_array(), units, axes=1)


def psi_inverse(m: ArrayLike) -> Quaternion:
    m = np.asarray(m, dtype=complex)
    return Quaternion(float(m[0, 0].real), float(-m[0, 0].imag), float(m[1, 0].real), float(m[1, 0].imag))


def su2_element(q: Quaternion) -> GroupElement:
    """psi(Q) as an SU(2) element; Q must be unit."""
    _require_unit(q)
    return element(GroupId.SU2, psi(q))


def rot3(q: Quaternion) -> GroupElement:
    """Rotation u -> Q u Q^-1 of a unit quaternion."""
    _require_unit(q)
    w, x, y, z = q.as_array()
    m = np.array(
        [
            [w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z],
        ]
    )
    return GroupElement(GroupId.SO3, m)


def _rigid(rotation: NDArray, translation: NDArray, group: GroupId) -> GroupElement:
    m = np.eye(4)
    m[:3, :3] = rotation
    m[:3, 3] = translation
    return GroupElement(group, m)


def translation_of(q: DualQuaternion | DualSplitQuaternion) -> NDArray[np.float64]:
    """u with Q_d = u Q_r, i.e. the vector part of Q_d Q_r^-1.

    Raises:
        ContractError: the scalar part of Q_d Q_r^-1 does not vanish
    """
    u = q.dual * q.real.inverse()
    if abs(u.w) > INVARIANCE_TOL:
        raise ContractError(f"dual part is not u Q_r for a vector u (scalar part {u.w:.3g})")
    return u.vec


def pi_cover(q: DualQuaternion) -> GroupElement:
    """Q + e (u Q) -> (R_Q, u) in SE(3)."""
    _require_unit(q)
    return _rigid(rot3(q.real).m, translation_of(q), GroupId.SE3)


def pi_cover_lift(g: GroupElement) -> DualQuaternion:
    """One of the two preimages of an SE(3) element under pi_cover."""
    q = _quaternion_from_rotation(g.m[:3, :3])
    return unit_dq_from_pose(q, g.m[:3, 3])


def _quaternion_from_rotation(r: NDArray) -> Quaternion:
    # Pick the largest diagonal combination for a stable square root.
    t = np.trace(r)
    cands = [1 + t, 1 + r[0, 0] - r[1, 1] - r[2, 2], 1 - r[0, 0] + r[1, 1] - r[2, 2], 1 - r[0, 0] - r[1, 1] + r[2, 2]]
    k = int(np.argmax(cands))
    s = 2.0 * np.sqrt(cands[k])
    if k == 0:
        q = (s / 4, (r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s, (r[1, 0] - r[0, 1]) / s)
    elif k == 1:
        q = ((r[2, 1] - r[1, 2]) / s, s / 4, (r[0, 1] + r[1, 0]) / s, (r[0, 2] + r[2, 0]) / s)
    elif k == 2:
        q = ((r[0, 2] - r[2, 0]) / s, (r[0, 1] + r[1, 0]) / s, s / 4, (r[1, 2] + r[2, 1]) / s)
    else:
        q = ((r[1, 0] - r[0, 1]) / s, (r[0, 2] + r[2, 0]) / s, (r[1, 2] + r[2, 1]) / s, s / 4)
    a = np.array(q)
    return Quaternion.from_array(a / np.linalg.norm(a))


def omega(q: SplitQuaternion) -> NDArray[np.float64]:
    """[[w+z, x+y], [y-x, w-z]]; det omega(Q) = <Q, Q>."""
    return np.tensordot(q.as_array(), OMEGA_UNITS, axes=1)


def omega_inverse(m: ArrayLike) -> SplitQuaternion:
    m = np.asarray(m, dtype=float)
    return SplitQuaternion(
        (m[0, 0] + m[1, 1]) / 2, (m[0, 1] - m[1, 0]) / 2, (m[0, 1] + m[1, 0]) / 2, (m[0, 0] - m[1, 1]) / 2
    )


def sl2_element(q: SplitQuaternion) -> GroupElement:
    _require_unit(q)
    return element(GroupId.SL2, omega(q))


def rot21(q: SplitQuaternion) -> GroupElement:
    """Matrix of v -> Q v Q^-1 on pure split quaternions, basis (i, j, k)."""
    _require_unit(q)
    inv = q.inverse()
    cols = [(q * SplitQuaternion.pure(e) * inv).vec for e in np.eye(3)]
    return GroupElement(GroupId.SO21, np.column_stack(cols))


def pi_split_cover(q: DualSplitQuaternion) -> GroupElement:
    """Q + e (u Q) -> (rot21(Q), u) in SE(2,1)."""
    _require_unit(q)
    return _rigid(rot21(q.real).m, translation_of(q), GroupId.SE21)


# === Lie algebra isomorphism so(2,1) -> sl(2,R) ===


def f_iso(x: ArrayLike) -> NDArray[np.float64]:
    """Image in sl(2,R) of x1 E1 + x2 E2 + x3 E3 in so(2,1)."""
    return np.tensordot(np.asarray(x, dtype=float), F_ISO_IMAGES, axes=1)


def f_iso_inverse(m: ArrayLike) -> NDArray[np.float64]:
    """Coordinates (x1, x2, x3) of the so(2,1) preimage of an sl(2,R) matrix."""
    images = F_ISO_IMAGES.reshape(3, -1).T
    coeffs, *_ = np.linalg.lstsq(images, np.asarray(m, dtype=float).ravel(), rcond=None)
    return coeffs


def f_iso_algebras() -> tuple[LieAlgebra, LieAlgebra, NDArray[np.float64]]:
    """(so(2,1) on E1..E3, sl(2,R) in its fixed basis, matrix of f between them)."""
    source = from_matrices(F_ISO_DOMAIN, "so21")
    target_basis = matrix_basis("sl2")
    M = np.column_stack([target_basis.coords(f) for f in F_ISO_IMAGES])
    return source, algebra_of(GroupId.SL2), M


# === Theta: algebra to dual through a bilinear form ===


def _form_matrix(B: BilinearForm | ArrayLike) -> NDArray[np.float64]:
    return B.m if isinstance(B, BilinearForm) else np.asarray(B, dtype=float)


def theta_flat(B: BilinearForm | ArrayLike, x: ArrayLike) -> NDArray[np.float64]:
    """Theta(x) = B(x, .) in dual coordinates."""
    return _form_matrix(B) @ np.asarray(x, dtype=float)


def theta_sharp(B: BilinearForm | ArrayLike, f: ArrayLike) -> NDArray[np.float64]:
    """Inverse of theta_flat.

    Raises:
        DegenerateError: B is degenerate
    """
    m = _form_matrix(B)
    if BilinearForm(m).is_degenerate():
        raise DegenerateError("cannot invert Theta: form is degenerate")
    return np.linalg.solve(m, np.asarray(f, dtype=float))


def theta_equivariance_residual(B: BilinearForm | ArrayLike, g: GroupElement, x: ArrayLike) -> float:
    """|Theta(Ad_g x) - Ad*_g Theta(x)|_max."""
    x = np.asarray(x, dtype=float)
    lhs = theta_flat(B, adjoint_rep(g) @ x)
    rhs = coadjoint_rep(g) @ theta_flat(B, x)
    return float(np.abs(lhs - rhs).max())


def _biinvariant(L: LieAlgebra, B: BilinearForm | ArrayLike | None) -> NDArray[np.float64]:
    m = killing_form(L).m if B is None else _form_matrix(B)
    if BilinearForm(m).is_degenerate():
        raise DegenerateError(f"form on {L.name or 'algebra'} is degenerate")
    residual = ad_invariance_residual(L, m)
    if residual > INVARIANCE_TOL * max(1.0, float(np.abs(m).max())):
        raise ContractError(f"form on {L.name or 'algebra'} is not ad-invariant (residual {residual:.3g})")
    return m


# === Bundle isomorphisms onto rigid motions ===

_RIGID = {
    GroupId.SO3: (GroupId.SE3, hat_F_inverse),
    GroupId.SO21: (GroupId.SE21, hat_H_inverse),
}


def hat_coordinates(group: GroupId) -> NDArray[np.float64]:
    """Matrix taking algebra coordinates to hat_F (SO3) or hat_H (SO21) vectors."""
    _, inverse = _RIGID[group]
    return np.column_stack([inverse(e) for e in basis_of(group).mats])


def _to_rigid(a: SemidirectElement, group: GroupId, B: BilinearForm | ArrayLike | None) -> GroupElement:
    if a.group is not group or a.variant is not Variant.COADJOINT:
        raise ContractError(f"expected a coadjoint bundle element over {group}, got {a.variant} over {a.group}")
    target, _ = _RIGID[group]
    m = _biinvariant(algebra_of(group), B)
    # S (resp. U) is conjugation in hat coordinates, which reduces to sigma itself
    P = hat_coordinates(group)
    rotation = P @ adjoint_rep(a.sigma) @ np.linalg.inv(P)
    return _rigid(rotation, P @ np.linalg.solve(m, a.payload), target)


def _from_rigid(g: GroupElement, group: GroupId, B: BilinearForm | ArrayLike | None) -> SemidirectElement:
    target, _ = _RIGID[group]
    if g.group is not target:
        raise ContractError(f"expected an {target} element, got {g.group}")
    m = _biinvariant(algebra_of(group), B)
    P = hat_coordinates(group)
    sigma = GroupElement(group, g.m[:3, :3])
    return SemidirectElement(sigma, m @ np.linalg.solve(P, g.m[:3, 3]), Variant.COADJOINT)


def T_iso(a: SemidirectElement, B: BilinearForm | ArrayLike | None = None) -> GroupElement:
    """T(sigma, f) = (S(sigma), F^-1(Theta^-1(f))) from T*SO(3) to SE(3).

    B defaults to the Killing form of so(3).
    """
    return _to_rigid(a, GroupId.SO3, B)


def T_iso_inverse(g: GroupElement, B: BilinearForm | ArrayLike | None = None) -> SemidirectElement:
    return _from_rigid(g, GroupId.SO3, B)


def Tprime_iso(a: SemidirectElement, B: BilinearForm | ArrayLike | None = None) -> GroupElement:
    """T'(sigma, f) = (U(sigma), H^-1(Theta^-1(f))) from T*SO(2,1) to SE(2,1)."""
    return _to_rigid(a, GroupId.SO21, B)


def Tprime_iso_inverse(g: GroupElement, B: BilinearForm | ArrayLike | None = None) -> SemidirectElement:
    return _from_rigid(g, GroupId.SO21, B)


def rigid_metric(space: Space, bundle_metric: BilinearForm | ArrayLike, B: BilinearForm | ArrayLike | None = None) -> BilinearForm:
    """Pull a metric on T*so(3) (T*so(2,1)) to twist coordinates of se(3) (se(2,1)).

    The differential of T (T') at the identity sends (x, f) to the twist
    (P x, P B^-1 f), P the hat coordinates of the algebra basis.
    """
    group, target = (GroupId.SO3, GroupId.SE3) if Space(space) is Space.EUCLIDEAN else (GroupId.SO21, GroupId.SE21)
    m = _biinvariant(algebra_of(group), B)
    P = hat_coordinates(group)
    Pinv = np.linalg.inv(P)
    zero = np.zeros((3, 3))
    # twist -> bundle coordinates
    D = np.block([[Pinv, zero], [zero, m @ Pinv]])
    M = _form_matrix(bundle_metric)
    if M.shape != (6, 6):
        raise ContractError(f"bundle metric must be 6x6, got {M.shape}")
    return BilinearForm(D.T @ M @ D, algebra_of(target).labels)


# === Quaternionic bundle isomorphisms ===


def trace_form(scale: float = 1.0) -> BilinearForm:
    """scale * Trace(MN) on su(2) in the basis X1, X2, X3 (equal to -2 scale I)."""
    mats = matrix_basis("su2").mats
    m = np.array([[np.trace(a @ b).real for b in mats] for a in mats])
    return BilinearForm(scale * m, algebra_of(GroupId.SU2).labels)


def phibar(q: DualQuaternion, scale: float = 1.0) -> SemidirectElement:
    """Q + e (u Q) -> (psi(Q), Theta(psi(u))) in T*SU(2)."""
    _require_unit(q)
    sigma = su2_element(q.real)
    return SemidirectElement(sigma, theta_flat(trace_form(scale), translation_of(q)), Variant.COADJOINT)


def phibar_inverse(a: SemidirectElement, scale: float = 1.0) -> DualQuaternion:
    if a.group is not GroupId.SU2 or a.variant is not Variant.COADJOINT:
        raise ContractError("phibar_inverse needs a coadjoint element over SU2")
    return unit_dq_from_pose(psi_inverse(a.sigma.m), theta_sharp(trace_form(scale), a.payload))


def phi_adjoint(q: DualQuaternion) -> SemidirectElement:
    """Q + e (u Q) -> (psi(Q), psi(u)) in TSU(2)."""
    _require_unit(q)
    return SemidirectElement(su2_element(q.real), translation_of(q), Variant.ADJOINT)


def phi_adjoint_inverse(a: SemidirectElement) -> DualQuaternion:
    return unit_dq_from_pose(psi_inverse(a.sigma.m), a.payload)


def p_iso(q: DualSplitQuaternion) -> SemidirectElement:
    """Q + e (u Q) -> (omega(Q), omega(u)) in SL(2,R) x|_Ad sl(2,R)."""
    _require_unit(q)
    u = SplitQuaternion.pure(translation_of(q))
    return SemidirectElement(sl2_element(q.real), basis_of(GroupId.SL2).coords(omega(u)), Variant.ADJOINT)


def p_iso_inverse(a: SemidirectElement) -> DualSplitQuaternion:
    if a.group is not GroupId.SL2 or a.variant is not Variant.ADJOINT:
        raise ContractError("p_iso_inverse needs an adjoint element over SL2")
    u = omega_inverse(basis_of(GroupId.SL2).matrix(a.payload))
    return unit_dsq_from_pose(omega_inverse(a.sigma.m), u.vec)


# === TG -> T*G ===


def Phi_TG_to_TstarG(
    a: SemidirectElement, B: BilinearForm | ArrayLike | None = None, check: bool = True
) -> SemidirectElement:
    """(sigma, x) -> (sigma, Theta(x)) for a biinvariant form B.

    With check=False the form is used as given, which is how the
    obstruction on groups without biinvariant metrics is exhibited.
    """
    if a.variant is not Variant.ADJOINT:
        raise ContractError("Phi maps adjoint (TG) elements")
    L = algebra_of(a.group)
    m = _biinvariant(L, B) if check else _form_matrix(B if B is not None else killing_form(L))
    return SemidirectElement(a.sigma, theta_flat(m, a.payload), Variant.COADJOINT)


def Phi_inverse(a: SemidirectElement, B: BilinearForm | ArrayLike | None = None) -> SemidirectElement:
    if a.variant is not Variant.COADJOINT:
        raise ContractError("Phi_inverse maps coadjoint (T*G) elements")
    m = _biinvariant(algebra_of(a.group), B)
    return SemidirectElement(a.sigma, theta_sharp(m, a.payload), Variant.ADJOINT)


def phi_algebra_residual(L: LieAlgebra, B: BilinearForm | ArrayLike) -> float:
    """Lie homomorphism residual of I + Theta from the tangent to the cotangent algebra."""
    n = L.dim
    m = _form_matrix(B)
    M = np.block([[np.eye(n), np.zeros((n, n))], [np.zeros((n, n)), m]])
    return lie_hom_residual(tangent_algebra(L), cotangent_algebra(L), M)


# === Homomorphism harness ===


def _flatten(x: Any) -> NDArray:
    if isinstance(x, GroupElement):
        return x.m.ravel()
    if isinstance(x, SemidirectElement):
        return x.as_array()
    return np.asarray(x).ravel()


def _codomain_mul(a: Any, b: Any) -> Any:
    if isinstance(a, SemidirectElement):
        return semidirect_mul(a, b)
    if isinstance(a, GroupElement):
        return GroupElement(a.group, a.m @ b.m)
    return np.asarray(a) @ np.asarray(b)


@dataclass(frozen=True)
class MapDescriptor:
    """A map between groups with a sampler for its domain."""

    name: str
    domain: str
    codomain: str
    evaluate: Callable[[Any], Any]
    sample: Callable[[np.random.Generator], Any]
    multiply: Callable[[Any, Any], Any] = lambda a, b: a * b

    def __call__(self, x: Any) -> Any:
        return self.evaluate(x)


def hom_residual(desc: MapDescriptor, trials: int, seed: int) -> float:
    """max over sampled pairs of |f(ab) - f(a) f(b)|_max / max(1, |f(a) f(b)|_max).

    Each trial draws from its own child of SeedSequence(seed), so the
    result does not depend on evaluation order.
    """
    if trials < 1:
        raise ContractError("trials must be at least 1")
    worst = 0.0
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        a, b = desc.sample(rng), desc.sample(rng)
        lhs = _flatten(desc(desc.multiply(a, b)))
        rhs = _flatten(_codomain_mul(desc(a), desc(b)))
        worst = max(worst, float(np.abs(lhs - rhs).max()) / max(1.0, float(np.abs(rhs).max())))
    log.debug("%s: homomorphism residual %.3g over %d trials", desc.name, worst, trials)
    return worst


def landing_residual(desc: MapDescriptor, trials: int, seed: int) -> float:
    """Worst membership residual of images that are group elements."""
    worst = 0.0
    for child in np.random.SeedSequence(seed).spawn(trials):
        image = desc(desc.sample(np.random.default_rng(child)))
        if isinstance(image, SemidirectElement):
            image = image.sigma
        if isinstance(image, GroupElement):
            worst = max(worst, membership_residual(image))
    return worst


# --- samplers ---


def random_unit_quaternion(rng: np.random.Generator) -> Quaternion:
    a = rng.standard_normal(4)
    return Quaternion.from_array(a / np.linalg.norm(a))


def random_unit_split(rng: np.random.Generator, scale: float = 0.5) -> SplitQuaternion:
    return split_exp(scale * rng.standard_normal(3)) * split_exp(scale * rng.standard_normal(3))


def random_unit_dq(rng: np.random.Generator) -> DualQuaternion:
    return unit_dq_from_pose(random_unit_quaternion(rng), rng.standard_normal(3))


def random_unit_dsq(rng: np.random.Generator) -> DualSplitQuaternion:
    return unit_dsq_from_pose(random_unit_split(rng), rng.standard_normal(3))


def random_element(group: GroupId, rng: np.random.Generator, scale: float = 1.0) -> GroupElement:
    return group_exp(group, scale * rng.standard_normal(algebra_of(group).dim))


def random_bundle(
    group: GroupId, variant: Variant, rng: np.random.Generator, scale: float = 1.0
) -> SemidirectElement:
    n = algebra_of(group).dim
    return SemidirectElement(random_element(group, rng, scale), rng.standard_normal(n), variant)


def _build_maps() -> dict[str, MapDescriptor]:
    so21_scale = 0.5
    maps = [
        MapDescriptor(
            "identity-so3", "SO3", "SO3", lambda g: g, lambda r: random_element(GroupId.SO3, r), gmul
        ),
        MapDescriptor("psi", "unit H", "SU2", psi, random_unit_quaternion),
        MapDescriptor("rot3", "unit H", "SO3", rot3, random_unit_quaternion),
        MapDescriptor("pi_cover", "unit dual H", "SE3", pi_cover, random_unit_dq),
        MapDescriptor("omega", "unit split H", "SL2", omega, random_unit_split),
        MapDescriptor("rot21", "unit split H", "SO21", rot21, random_unit_split),
        MapDescriptor("pi_split_cover", "unit dual split H", "SE21", pi_split_cover, random_unit_dsq),
        MapDescriptor("phibar", "unit dual H", "T*SU2", phibar, random_unit_dq),
        MapDescriptor("phi_adjoint", "unit dual H", "TSU2", phi_adjoint, random_unit_dq),
        MapDescriptor("p_iso", "unit dual split H", "TSL2", p_iso, random_unit_dsq),
        MapDescriptor(
            "T",
            "T*SO3",
            "SE3",
            T_iso,
            lambda r: random_bundle(GroupId.SO3, Variant.COADJOINT, r),
            semidirect_mul,
        ),
        MapDescriptor(
            "Tprime",
            "T*SO21",
            "SE21",
            Tprime_iso,
            lambda r: random_bundle(GroupId.SO21, Variant.COADJOINT, r, so21_scale),
            semidirect_mul,
        ),
        MapDescriptor(
            "Phi",
            "TSO3",
            "T*SO3",
            Phi_TG_to_TstarG,
            lambda r: random_bundle(GroupId.SO3, Variant.ADJOINT, r),
            semidirect_mul,
        ),
    ]
    return {m.name: m for m in maps}


MAPS = _build_maps()


def corrupted_psi() -> MapDescriptor:
    """psi with the sign of X2 flipped; not a homomorphism."""
    units = PSI_UNITS.copy()
    units[2] = -units[2]
    return MapDescriptor("psi-corrupted", "unit H", "2x2 complex", lambda q: psi(q, units), random_unit_quaternion)


def h3_phi(B: BilinearForm | ArrayLike) -> MapDescriptor:
    """Phi over H3 with an arbitrary (necessarily non-biinvariant) form."""
    return MapDescriptor(
        "Phi-h3",
        "TH3",
        "T*H3",
        lambda a: Phi_TG_to_TstarG(a, B, check=False),
        lambda r: random_bundle(GroupId.H3, Variant.ADJOINT, r),
        semidirect_mul,
    )


def cover_kernel(desc: MapDescriptor, x: Any, tol: float = INVARIANCE_TOL) -> bool:
    """True when x maps to the identity of the codomain."""
    image = _flatten(desc(x))
    n = int(round(np.sqrt(image.size)))
    return bool(np.abs(image - np.eye(n).ravel()).max() <= tol)


def iso_verify_command(args: argparse.Namespace) -> None:
    """Handle iso-verify subcommand."""
    cfg = effective_config(args)
    desc = MAPS[args.map]
    if args.map == "phibar":
        desc = replace(desc, evaluate=lambda q: phibar(q, cfg.trace_form_scale))
    residual = hom_residual(desc, cfg.trials, cfg.seed)
    landing = landing_residual(desc, cfg.trials, cfg.seed)
    passed = residual <= cfg.tol("homomorphism") and landing <= cfg.tol("membership")
    emit(
        {
            "map": desc.name,
            "domain": desc.domain,
            "codomain": desc.codomain,
            "seed": cfg.seed,
            "trials": cfg.trials,
            "residual": residual,
            "landing_residual": landing,
            "tolerance": cfg.tol("homomorphism"),
            "passed": passed,
        },
        cfg.output_format,
    )
    if not passed:
        sys.exit(1)
