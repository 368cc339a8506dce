"""Structure-constant Lie algebra kernel.

A LieAlgebra stores c[i, j, k], the coefficient of e_k in [e_i, e_j].
Vectors are coordinate arrays in the algebra basis, covectors are arrays in
the dual basis e_1*, ..., e_n*, and endomorphisms are plain n x n arrays
acting on coordinate columns.
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from cskit.errors import ContractError, DegenerateError, NoComplexStructureError

log = logging.getLogger(__name__)

# Singular values below NULLSPACE_RCOND * sigma_max count as zero.
NULLSPACE_RCOND = 1e-10


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Finite-dimensional real Lie algebra over a labeled basis."""

    labels: tuple[str, ...]
    c: NDArray[np.float64]
    name: str = ""

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        c = np.array(self.c, dtype=float)
        n = len(labels)
        if n == 0:
            raise ContractError("Lie algebra must have positive dimension")
        if c.shape != (n, n, n):
            raise ContractError(f"structure constants must have shape {(n, n, n)}, got {c.shape}")
        scale = max(1.0, float(np.abs(c).max()))
        if np.abs(c + c.transpose(1, 0, 2)).max() > 1e-12 * scale:
            raise ContractError("structure constants are not antisymmetric")
        c.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "c", c)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def basis(self, i: int) -> NDArray[np.float64]:
        """Coordinate vector of e_i."""
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ContractError(f"{self.name or 'algebra'} has no basis vector {label!r}") from None

    def __repr__(self) -> str:
        return f"LieAlgebra({self.name or '?'}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class BilinearForm:
    """Symmetric bilinear form; the constructor symmetrizes its matrix."""

    m: NDArray[np.float64]
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        m = np.array(self.m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ContractError(f"bilinear form needs a square matrix, got shape {m.shape}")
        m = (m + m.T) / 2
        m.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self) -> int:
        return self.m.shape[0]

    def __call__(self, x: ArrayLike, y: ArrayLike) -> float:
        return float(np.asarray(x) @ self.m @ np.asarray(y))

    def is_degenerate(self, rtol: float = NULLSPACE_RCOND) -> bool:
        s = linalg.svdvals(self.m)
        return bool(s[0] == 0 or s[-1] <= rtol * s[0])


def _vector(L: LieAlgebra, x: ArrayLike, what: str = "vector") -> NDArray[np.float64]:
    v = np.asarray(x, dtype=float)
    if v.shape != (L.dim,):
        raise ContractError(f"{what} has shape {v.shape}, expected ({L.dim},)")
    return v


def _form(L: LieAlgebra, B: BilinearForm | ArrayLike) -> NDArray[np.float64]:
    m = B.m if isinstance(B, BilinearForm) else np.asarray(B, dtype=float)
    if m.shape != (L.dim, L.dim):
        raise ContractError(f"form has shape {m.shape}, expected ({L.dim}, {L.dim})")
    return m


def rank(m: ArrayLike, rcond: float = NULLSPACE_RCOND) -> int:
    """Numerical rank with a threshold relative to the largest singular value."""
    s = linalg.svdvals(np.atleast_2d(np.asarray(m, dtype=float)))
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rcond * s[0]))


def bracket(L: LieAlgebra, x: ArrayLike, y: ArrayLike) -> NDArray[np.float64]:
    """[x, y] in basis coordinates."""
    return np.einsum("i,j,ijk->k", _vector(L, x, "x"), _vector(L, y, "y"), L.c)


def ad_matrix(L: LieAlgebra, x: ArrayLike) -> NDArray[np.float64]:
    """Matrix of y -> [x, y]."""
    return np.einsum("i,ijk->kj", _vector(L, x, "x"), L.c)


def ad_matrices(L: LieAlgebra) -> NDArray[np.float64]:
    """Stack of ad(e_i), shape (n, n, n)."""
    return np.transpose(L.c, (0, 2, 1))


def coad_matrix(L: LieAlgebra, x: ArrayLike) -> NDArray[np.float64]:
    """Matrix of f -> ad*_x f = -f o ad_x in dual coordinates."""
    return -ad_matrix(L, x).T


def coad(L: LieAlgebra, x: ArrayLike, f: ArrayLike) -> NDArray[np.float64]:
    """Infinitesimal coadjoint action, (ad*_x f)(y) = -f([x, y])."""
    return coad_matrix(L, x) @ _vector(L, f, "covector")


def killing_form(L: LieAlgebra) -> BilinearForm:
    """K0(x, y) = trace(ad_x o ad_y)."""
    ads = ad_matrices(L)
    return BilinearForm(np.einsum("iab,jba->ij", ads, ads), L.labels)


def jacobi_residual(L: LieAlgebra) -> float:
    """Largest entry of the cyclic sum [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]."""
    c = L.c
    t = (
        np.einsum("ijl,lkm->ijkm", c, c)
        + np.einsum("jkl,lim->ijkm", c, c)
        + np.einsum("kil,ljm->ijkm", c, c)
    )
    return float(np.abs(t).max())


def ad_invariance_residual(L: LieAlgebra, B: BilinearForm | ArrayLike) -> float:
    """max over basis triples of |B([e_i,e_j],e_k) + B(e_j,[e_i,e_k])|."""
    m = _form(L, B)
    t = np.einsum("ija,ak->ijk", L.c, m) + np.einsum("ja,ika->ijk", m, L.c)
    return float(np.abs(t).max())


def centralizer_residual(L: LieAlgebra, A: ArrayLike) -> float:
    """max over basis pairs of |A[e_i,e_j] - [A e_i, e_j]|."""
    a = np.asarray(A, dtype=float)
    lhs = np.einsum("ka,ija->ijk", a, L.c)
    rhs = np.einsum("ai,ajk->ijk", a, L.c)
    return float(np.abs(lhs - rhs).max())


def derived_dim(L: LieAlgebra, rcond: float = NULLSPACE_RCOND) -> int:
    """Dimension of [G, G]."""
    return rank(L.c.reshape(L.dim * L.dim, L.dim), rcond)


def centralizer_basis(L: LieAlgebra, rcond: float = NULLSPACE_RCOND) -> list[NDArray[np.float64]]:
    """Basis of K(G) = {A : A o ad_y = ad_y o A for all y}.

    Solves A ad(e_i) - ad(e_i) A = 0 stacked over i as one n^3 x n^2
    system on the row-major entries of A.

    Args:
        L: Lie algebra
        rcond: Relative singular value threshold for the nullspace

    Returns:
        Orthonormal (Frobenius) basis of K(G); always contains a multiple of the identity in its span
    """
    n = L.dim
    eye = np.eye(n)
    system = np.vstack([np.kron(eye, ad.T) - np.kron(ad, eye) for ad in ad_matrices(L)])
    null = linalg.null_space(system, rcond=rcond)
    log.debug("centralizer of %s has dimension %d", L.name or "algebra", null.shape[1])
    return [col.reshape(n, n) for col in null.T]


def centralizer_closure_residual(L: LieAlgebra, rcond: float = NULLSPACE_RCOND) -> float:
    """How far products of centralizer elements fall outside K(G)."""
    basis = centralizer_basis(L, rcond)
    span = np.column_stack([b.ravel() for b in basis])
    worst = 0.0
    for a in basis:
        for b in basis:
            prod = (a @ b).ravel()
            coeffs, *_ = linalg.lstsq(span, prod)
            worst = max(worst, float(np.abs(span @ coeffs - prod).max()))
    return worst


def complex_structure_J(L: LieAlgebra, tol: float = 1e-10) -> NDArray[np.float64]:
    """Complex structure J spanning K(G) together with the identity.

    Takes the centralizer element farthest from the identity line, removes
    its trace part and normalizes so that J^2 = -I. The sign is fixed by
    making the first nonzero entry (row-major) positive.

    Raises:
        NoComplexStructureError: dim K(G) != 2, or the traceless part does
            not square to a negative multiple of the identity
    """
    basis = centralizer_basis(L)
    if len(basis) != 2:
        raise NoComplexStructureError(
            f"no complex structure: dim K(G) = {len(basis)} for {L.name or 'algebra'}"
        )
    n = L.dim
    eye = np.eye(n)
    traceless = [b - np.trace(b) / n * eye for b in basis]
    b0 = max(traceless, key=lambda m: float(np.linalg.norm(m)))
    sq = b0 @ b0
    scale = -np.trace(sq) / n
    if scale <= 0 or np.abs(sq + scale * eye).max() > tol * max(1.0, scale):
        raise NoComplexStructureError("centralizer not of complex type")
    J = b0 / np.sqrt(scale)
    flat = J.ravel()
    first = flat[np.flatnonzero(np.abs(flat) > tol)[0]]
    if first < 0:
        J = -J
    return J


def _structure_from_blocks(n: int) -> NDArray[np.float64]:
    return np.zeros((2 * n, 2 * n, 2 * n))


def cotangent_algebra(L: LieAlgebra) -> LieAlgebra:
    """Lie algebra of T*G on the basis (e_1..e_n, e_1*..e_n*).

    Bracket [(x, f), (y, g)] = ([x, y], ad*_x g - ad*_y f).
    """
    n = L.dim
    c = _structure_from_blocks(n)
    c[:n, :n, :n] = L.c
    # [e_i, e_j*] has e_k* coefficient -c[i, k, j]
    mixed = -np.transpose(L.c, (0, 2, 1))
    c[:n, n:, n:] = mixed
    c[n:, :n, n:] = -np.transpose(mixed, (1, 0, 2))
    labels = L.labels + tuple(f"{label}*" for label in L.labels)
    return LieAlgebra(labels, c, f"T*{L.name}" if L.name else "")


def tangent_algebra(L: LieAlgebra) -> LieAlgebra:
    """Lie algebra of TG on the basis (e_1..e_n, ebar_1..ebar_n).

    Bracket [(x1, y1), (x2, y2)] = ([x1, x2], [x1, y2] - [x2, y1]).
    """
    n = L.dim
    c = _structure_from_blocks(n)
    c[:n, :n, :n] = L.c
    c[:n, n:, n:] = L.c
    c[n:, :n, n:] = -np.transpose(L.c, (1, 0, 2))
    labels = L.labels + tuple(f"{label}bar" for label in L.labels)
    return LieAlgebra(labels, c, f"T{L.name}" if L.name else "")


def change_basis(L: LieAlgebra, P: ArrayLike, labels: tuple[str, ...] | None = None) -> LieAlgebra:
    """Re-express L in the basis f_a = sum_i P[i, a] e_i."""
    p = np.asarray(P, dtype=float)
    if p.shape != (L.dim, L.dim):
        raise ContractError(f"basis change has shape {p.shape}, expected ({L.dim}, {L.dim})")
    if rank(p) < L.dim:
        raise DegenerateError("basis change is singular")
    c = np.einsum("ia,jb,ijl,kl->abk", p, p, L.c, linalg.inv(p))
    c = (c - c.transpose(1, 0, 2)) / 2
    return LieAlgebra(labels or tuple(f"f{a + 1}" for a in range(L.dim)), c, L.name)


def killing_orthonormal(L: LieAlgebra) -> tuple[LieAlgebra, NDArray[np.float64], int]:
    """Sylvester basis in which the Killing form is diag(-1,..,-1, 1,..,1).

    Returns:
        (L in the new basis, change-of-basis matrix P, number p of negative directions)

    Raises:
        DegenerateError: Killing form is degenerate (L not semisimple)
    """
    K = killing_form(L).m
    w, V = linalg.eigh(K)
    if rank(K) < L.dim:
        raise DegenerateError(f"Killing form of {L.name or 'algebra'} is degenerate")
    order = np.argsort(w, kind="stable")
    w, V = w[order], V[:, order]
    P = V / np.sqrt(np.abs(w))
    p = int(np.sum(w < 0))
    return change_basis(L, P), P, p


def invariant_forms(L: LieAlgebra, rcond: float = NULLSPACE_RCOND) -> list[BilinearForm]:
    """Basis of all ad-invariant symmetric bilinear forms on L."""
    n = L.dim
    iu = np.triu_indices(n)
    columns = []
    for i, j in zip(*iu):
        s = np.zeros((n, n))
        s[i, j] = s[j, i] = 1.0
        t = np.einsum("ija,ak->ijk", L.c, s) + np.einsum("ja,ika->ijk", s, L.c)
        columns.append(t.ravel())
    null = linalg.null_space(np.column_stack(columns), rcond=rcond)
    forms = []
    for vec in null.T:
        m = np.zeros((n, n))
        m[iu] = vec
        forms.append(BilinearForm(m + np.triu(m, 1).T, L.labels))
    return forms


def max_invariant_det(L: LieAlgebra, rng: np.random.Generator, samples: int = 200) -> float:
    """Largest |det| over random unit combinations of the invariant forms.

    Zero (to rounding) means every ad-invariant form is degenerate, i.e.
    the group carries no biinvariant metric.
    """
    forms = invariant_forms(L)
    if not forms:
        return 0.0
    stack = np.stack([f.m for f in forms])
    worst = 0.0
    for _ in range(samples):
        coeffs = rng.standard_normal(len(forms))
        coeffs /= np.linalg.norm(coeffs)
        worst = max(worst, abs(float(np.linalg.det(np.tensordot(coeffs, stack, axes=1)))))
    return worst


def lie_hom_residual(L1: LieAlgebra, L2: LieAlgebra, M: ArrayLike) -> float:
    """max over basis pairs of |M[e_i, e_j] - [M e_i, M e_j]|."""
    m = np.asarray(M, dtype=float)
    if m.shape != (L2.dim, L1.dim):
        raise ContractError(f"map has shape {m.shape}, expected ({L2.dim}, {L1.dim})")
    lhs = np.einsum("ka,ija->ijk", m, L1.c)
    rhs = np.einsum("ai,bj,abk->ijk", m, m, L2.c)
    return float(np.abs(lhs - rhs).max())
