"""Property suites behind `cskit check`.

Every check draws from its own generator derived from (seed, check name),
so results do not depend on which suites run or in what order.
"""

import argparse
import logging
import sys
import zlib
from collections.abc import Callable

import numpy as np
from scipy.linalg import expm

from cskit.algebras import BUILTINS, SIMPLE, builtin
from cskit.config import Config
from cskit.groups import (
    CHART_MARGIN,
    HeisenbergPoint,
    adjoint_rep,
    algebra_of,
    bundle_algebra,
    commutator_bracket,
    gmul,
    group_exp,
    h3_left_frame,
    membership_residual,
)
from cskit.isomaps import (
    MAPS,
    T_iso_inverse,
    Tprime_iso_inverse,
    corrupted_psi,
    f_iso_algebras,
    h3_phi,
    hom_residual,
    omega,
    p_iso_inverse,
    phibar_inverse,
    pi_cover,
    random_bundle,
    random_unit_dq,
    random_unit_dsq,
    random_unit_quaternion,
    random_unit_split,
    rot3,
    rot21,
    su2_element,
)
from cskit.lie_core import (
    ad_invariance_residual,
    ad_matrix,
    bracket,
    centralizer_basis,
    centralizer_closure_residual,
    centralizer_residual,
    complex_structure_J,
    cotangent_algebra,
    derived_dim,
    invariant_forms,
    jacobi_residual,
    killing_form,
    killing_orthonormal,
    lie_hom_residual,
    max_invariant_det,
    tangent_algebra,
)
from cskit.metrics import (
    SO31_DISPLAY_FACTOR,
    EvenCotangentParams,
    H3MetricParams,
    OddCotangentParams,
    cotangent_metric,
    eigenvalues,
    exp_chart_field,
    h3_metric,
    h3_parallel_solution_dim,
    parallelism_residual,
    signature,
    so31_K_J,
    so31_metric,
    closed_form_eigenvalues,
)
from cskit.output import effective_config, emit
from cskit.quat import (
    DualQuaternion,
    DualSplitQuaternion,
    Quaternion,
    SplitQuaternion,
    dinv,
    split_exp,
)
from cskit.screws import (
    Twist,
    default_grid,
    geodesic_residual,
    geodesic_sample,
    riemannian_obstruction_scan,
    screw_decompose,
    twist_exp,
)
from cskit.types import CheckResult, GroupId, Signature, Space, SuiteReport, Variant

log = logging.getLogger(__name__)

SUITE_NAMES = ("algebra", "quat", "covers", "metrics", "screws")


def check_rng(seed: int, name: str) -> np.random.Generator:
    """Generator for one named check."""
    return np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(name.encode())]))


class _Collector:
    """Accumulates CheckResults for one suite."""

    def __init__(self, suite: str, cfg: Config) -> None:
        self.suite = suite
        self.cfg = cfg
        self.results: list[CheckResult] = []

    def rng(self, name: str) -> np.random.Generator:
        return check_rng(self.cfg.seed, f"{self.suite}/{name}")

    def below(self, name: str, value: float, tol: float | str, detail: str = "") -> None:
        limit = self.cfg.tol(tol) if isinstance(tol, str) else tol
        self.results.append(CheckResult(self.suite, name, float(value), limit, bool(value <= limit), detail))

    def above(self, name: str, value: float, threshold: float) -> None:
        """Negative control: passes when the value exceeds the threshold."""
        self.results.append(
            CheckResult(self.suite, name, float(value), threshold, bool(value > threshold), "must exceed")
        )

    def equal(self, name: str, observed: object, expected: object) -> None:
        ok = observed == expected
        self.results.append(
            CheckResult(self.suite, name, 0.0 if ok else 1.0, 0.0, ok, f"observed {observed}, expected {expected}")
        )


# === algebra ===


def algebra_suite(cfg: Config) -> list[CheckResult]:
    c = _Collector("algebra", cfg)
    derived = [builtin(n) for n in BUILTINS]
    derived += [f(builtin(n)) for n in SIMPLE for f in (cotangent_algebra, tangent_algebra)]
    c.below("jacobi", max(jacobi_residual(L) for L in derived), "jacobi")
    c.below("killing ad-invariance", max(ad_invariance_residual(L, killing_form(L)) for L in derived), "ad_invariance")

    so31 = builtin("so31")
    expected = 4 * np.diag([1.0, 1.0, 1.0, -1.0, -1.0, -1.0])
    c.below("so31 killing matrix", np.abs(killing_form(so31).m - expected).max(), "jacobi")
    c.below("sl2 killing matrix", np.abs(killing_form(builtin("sl2")).m - np.diag([-1.0, 1.0, 1.0])).max(), "jacobi")

    for name in SIMPLE:
        L = builtin(name)
        basis = centralizer_basis(L, cfg.tol("nullspace"))
        c.equal(f"dim K({name})", len(basis), 2 if name == "so31" else 1)
        c.below(f"K({name}) members", max(centralizer_residual(L, A) for A in basis), "centralizer")
        c.below(f"K({name}) closed under products", centralizer_closure_residual(L), "centralizer")
        c.equal(f"derived dim T*{name}", derived_dim(cotangent_algebra(L)), 2 * L.dim)
    c.equal("derived dim h3", derived_dim(builtin("h3")), 1)

    J = complex_structure_J(so31, cfg.tol("complex_structure"))
    c.below("J^2 = -I", np.abs(J @ J + np.eye(6)).max(), "complex_structure")
    c.below("J commutes with brackets", centralizer_residual(so31, J), "complex_structure")
    K = killing_form(so31).m
    c.below("K0(Jx, y) symmetric", np.abs(J.T @ K - K @ J).max(), "complex_structure")
    display = so31_metric(0.0, 1.0).m
    c.below("K_J matches the display", np.abs(so31_K_J().m - SO31_DISPLAY_FACTOR * display).max(), "complex_structure")

    c.equal("invariant forms on so31", len(invariant_forms(so31)), 2)
    c.below("no biinvariant metric on h3", max_invariant_det(builtin("h3"), c.rng("h3 forms")), 1e-12)
    return c.results


# === quat ===


def _random_quats(rng: np.random.Generator, cls: type) -> tuple:
    return tuple(cls.from_array(rng.standard_normal(4)) for _ in range(3))


def quat_suite(cfg: Config) -> list[CheckResult]:
    c = _Collector("quat", cfg)
    n = cfg.trials
    for cls in (Quaternion, SplitQuaternion):
        rng = c.rng(f"{cls.__name__} identities")
        assoc = norm = anti = 0.0
        for _ in range(n):
            p, q, r = _random_quats(rng, cls)
            assoc = max(assoc, np.abs(((p * q) * r).as_array() - (p * (q * r)).as_array()).max())
            scale = 1.0 + np.abs(p.as_array()).sum() ** 2 * np.abs(q.as_array()).sum() ** 2
            norm = max(norm, abs((p * q).norm2() - p.norm2() * q.norm2()) / scale)
            anti = max(anti, np.abs((p * q).conj().as_array() - (q.conj() * p.conj()).as_array()).max())
        c.below(f"{cls.__name__} associativity", assoc, "norm")
        c.below(f"{cls.__name__} norm multiplicativity", norm, "norm")
        c.below(f"{cls.__name__} conjugation reverses products", anti, "norm")

    for cls, part in ((DualQuaternion, Quaternion), (DualSplitQuaternion, SplitQuaternion)):
        rng = c.rng(f"{cls.__name__} identities")
        assoc = norm = 0.0
        for _ in range(n):
            a, b, d = (cls(part.from_array(rng.standard_normal(4)), part.from_array(rng.standard_normal(4))) for _ in range(3))
            assoc = max(assoc, np.abs(((a * b) * d).as_array() - (a * (b * d)).as_array()).max())
            lhs, rhs = (a * b).norm2(), a.norm2() * b.norm2()
            scale = 1.0 + np.abs(a.as_array()).sum() ** 2 * np.abs(b.as_array()).sum() ** 2
            norm = max(norm, abs(lhs.re - rhs.re) / scale, abs(lhs.du - rhs.du) / scale)
        c.below(f"{cls.__name__} associativity", assoc, "norm")
        c.below(f"{cls.__name__} dual norm multiplicativity", norm, "norm")

    rng = c.rng("split exp")
    unit = square = 0.0
    vectors = [0.5 * rng.standard_normal(3) for _ in range(n)] + [np.array([1.0, 1.0, 0.0]), np.array([0.0, 0.6, 0.8])]
    for v in vectors:
        unit = max(unit, abs(split_exp(v).norm2() - 1.0))
        pure = SplitQuaternion.pure(v)
        sq = pure * pure
        square = max(square, abs(sq.w + pure.pairing(pure)), np.abs(sq.vec).max())
    c.below("split_exp is unit", unit, "unit")
    c.below("v^2 = -<v, v>", square, "norm")

    rng = c.rng("unit dual")
    preserved = 0.0
    for _ in range(n):
        a, b = random_unit_dq(rng), random_unit_dq(rng)
        for x in (a * b, dinv(a)):
            nn = x.norm2()
            preserved = max(preserved, abs(nn.re - 1.0), abs(nn.du))
        a2, b2 = random_unit_dsq(rng), random_unit_dsq(rng)
        for x in (a2 * b2, dinv(a2)):
            nn = x.norm2()
            preserved = max(preserved, abs(nn.re - 1.0), abs(nn.du))
    c.below("unit predicate preserved", preserved, "unit")
    return c.results


# === covers (and group-level laws) ===


def covers_suite(cfg: Config) -> list[CheckResult]:
    c = _Collector("covers", cfg)
    n = cfg.trials

    rng = c.rng("rot3")
    ortho = ad = kernel = 0.0
    for _ in range(n):
        q = random_unit_quaternion(rng)
        R = rot3(q).m
        ortho = max(ortho, np.abs(R.T @ R - np.eye(3)).max())
        ad = max(ad, np.abs(adjoint_rep(su2_element(q)) - R).max())
        kernel = max(kernel, np.abs(rot3(-q).m - R).max())
    c.below("rot3 orthogonality", ortho, "cover")
    c.below("Ad psi(Q) = rot3(Q)", ad, "cover")
    c.below("rot3(-Q) = rot3(Q)", kernel, "cover")

    rng = c.rng("omega")
    det = 0.0
    for _ in range(n):
        q = SplitQuaternion.from_array(rng.standard_normal(4))
        det = max(det, abs(q.norm2() - np.linalg.det(omega(q))))
    c.below("det omega(Q) = <Q, Q>", det, "cover")

    minus = DualQuaternion(Quaternion(-1.0))
    c.below("pi_cover(-1) = identity", np.abs(pi_cover(minus).m - np.eye(4)).max(), "homomorphism")
    c.below("rot21(-1) = identity", np.abs(rot21(SplitQuaternion(-1.0)).m - np.eye(3)).max(), "homomorphism")

    source, target, M = f_iso_algebras()
    c.below("f preserves brackets", lie_hom_residual(source, target, M), "cover")
    c.equal("f invertible", bool(abs(np.linalg.det(M)) > 1e-12), True)

    for name, desc in MAPS.items():
        c.below(f"hom {name}", hom_residual(desc, n, cfg.seed), "homomorphism")
    c.above("corrupted psi is not a homomorphism", hom_residual(corrupted_psi(), n, cfg.seed), 1e-1)
    c.above("Phi fails on h3", hom_residual(h3_phi(np.eye(3)), n, cfg.seed), 1e-3)

    rng = c.rng("inverses")
    rt = 0.0
    for _ in range(n):
        dq, dsq = random_unit_dq(rng), random_unit_dsq(rng)
        rt = max(rt, np.abs(phibar_inverse(MAPS["phibar"](dq)).as_array() - dq.as_array()).max())
        rt = max(rt, np.abs(p_iso_inverse(MAPS["p_iso"](dsq)).as_array() - dsq.as_array()).max())
        a = random_bundle(GroupId.SO3, Variant.COADJOINT, rng)
        rt = max(rt, np.abs(T_iso_inverse(MAPS["T"](a)).as_array() - a.as_array()).max())
        b = random_bundle(GroupId.SO21, Variant.COADJOINT, rng, 0.5)
        rt = max(rt, np.abs(Tprime_iso_inverse(MAPS["Tprime"](b)).as_array() - b.as_array()).max())
    c.below("inverses round-trip", rt, "homomorphism")

    rng = c.rng("groups")
    chain = 0.0
    for group in (GroupId.SO3, GroupId.SU2, GroupId.SE3):
        dim = algebra_of(group).dim
        g = group_exp(group, np.zeros(dim))
        for _ in range(100):
            g = gmul(g, group_exp(group, 0.3 * rng.standard_normal(dim)))
        chain = max(chain, membership_residual(g))
    c.below("membership through 100 products", chain, "membership")

    flow = compat = 0.0
    for group in (GroupId.SO3, GroupId.SO21, GroupId.SL2, GroupId.SO31, GroupId.H3):
        L = algebra_of(group)
        for _ in range(max(1, n // 20)):
            xi = 0.3 * rng.standard_normal(L.dim)
            s, t = rng.uniform(-1, 1, size=2)
            lhs = group_exp(group, (s + t) * xi).m
            rhs = group_exp(group, s * xi).m @ group_exp(group, t * xi).m
            flow = max(flow, np.abs(lhs - rhs).max())
            compat = max(compat, np.abs(adjoint_rep(group_exp(group, xi)) - expm(ad_matrix(L, xi))).max())
    c.below("exp((s+t)x) = exp(sx) exp(tx)", flow, "homomorphism")
    c.below("Ad(exp x) = exp(ad x)", compat, "homomorphism")

    fd = 0.0
    for group in (GroupId.SO3, GroupId.SO21):
        L = bundle_algebra(group, Variant.COADJOINT)
        for _ in range(max(1, n // 40)):
            u, v = rng.standard_normal(L.dim), rng.standard_normal(L.dim)
            fd = max(fd, np.abs(commutator_bracket(group, Variant.COADJOINT, u, v) - bracket(L, u, v)).max())
    c.below("T*G group commutators match the bracket", fd, 1e-6)

    p, q = HeisenbergPoint(1, 2, 3), HeisenbergPoint(4, 5, 6)
    c.equal("H3 product", (p * q).as_array().tolist(), [5.0, 7.0, 14.0])
    return c.results


# === metrics ===


def random_h3_params(rng: np.random.Generator) -> H3MetricParams:
    while True:
        values = rng.uniform(-2.0, 2.0, size=6)
        a, b, cc, d, e, m = values
        if abs(a * e * m - a * d * d - b * b * m + 2 * b * cc * d - cc * cc * e) > 1e-2:
            return H3MetricParams(*values)


def _random_t(rng: np.random.Generator, low: float = 0.1, high: float = 5.0) -> float:
    return float(rng.choice([-1.0, 1.0]) * rng.uniform(low, high))


def metrics_suite(cfg: Config) -> list[CheckResult]:
    c = _Collector("metrics", cfg)
    n = max(1, cfg.trials // 4)

    rng = c.rng("odd family")
    bad_sig = 0
    eig = inv = 0.0
    for name in ("so3", "su2", "sl2", "so21"):
        Ls, _, p = killing_orthonormal(builtin(name))
        for _ in range(n):
            s, t = float(rng.uniform(-5, 5)), _random_t(rng)
            B = cotangent_metric(Ls, OddCotangentParams(s, t))
            bad_sig += signature(B) != Signature(3, 3, 0)
            eig = max(eig, np.abs(eigenvalues(B) - closed_form_eigenvalues(s, t, p, 3)).max())
            native = builtin(name)
            inv = max(inv, ad_invariance_residual(cotangent_algebra(native), cotangent_metric(native, OddCotangentParams(s, t))))
    c.equal("odd signatures (3, 3)", bad_sig, 0)
    c.below("odd eigenvalues", eig, "eigenvalue")

    rng = c.rng("even family")
    so31 = builtin("so31")
    bad_even = 0
    for _ in range(n):
        s1, s2 = rng.uniform(-5, 5, size=2)
        t1, t2 = _random_t(rng), _random_t(rng)
        B = cotangent_metric(so31, EvenCotangentParams(s1, s2, t1, t2))
        bad_even += signature(B) != Signature(6, 6, 0)
        inv = max(inv, ad_invariance_residual(cotangent_algebra(so31), B) / max(1.0, float(np.abs(B.m).max())))
        k1, k2 = rng.uniform(-5, 5, size=2)
        inv = max(inv, ad_invariance_residual(so31, so31_metric(k1, k2)))
    c.equal("even signatures (6, 6)", bad_even, 0)
    c.below("cotangent metrics ad-invariant", inv, "ad_invariance")

    rng = c.rng("h3 parallelism")
    worst = 0.0
    for _ in range(max(1, n // 2)):
        field = h3_metric(random_h3_params(rng))
        worst = max(worst, parallelism_residual(field, builtin("h3"), h3_left_frame, rng.uniform(-1, 1, size=(100, 3))))
    c.below("h3 family is parallel", worst, "parallelism")
    params = H3MetricParams(1.0, 0.0, 0.5, 0.0, 1.0, 1.0)
    field = h3_metric(params)
    doubled = field.perturbed(0, 1, lambda q: field(q)[0, 1])
    c.above("doubled dxdy coefficient", parallelism_residual(doubled, builtin("h3"), h3_left_frame, rng.uniform(-1, 1, size=(100, 3))), 1e-3)
    c.equal("parallel tensors on h3", h3_parallel_solution_dim(c.rng("h3 nullspace")), 6)

    so3 = builtin("so3")
    chart, frame = exp_chart_field(so3, killing_form(so3))
    c.below("biinvariant form in the exp chart", parallelism_residual(chart, so3, frame, rng.uniform(-1, 1, size=(20, 3))), "parallelism")
    return c.results


# === screws ===


def _random_twist(rng: np.random.Generator, space: Space, scale: float) -> Twist:
    w = rng.standard_normal(3)
    w *= scale * rng.uniform(0.2, 1.0) / np.linalg.norm(w)
    return Twist(tuple(w), tuple(rng.uniform(-1, 1, size=3)), space)


def screws_suite(cfg: Config) -> list[CheckResult]:
    c = _Collector("screws", cfg)

    rng = c.rng("screw round-trip")
    rt = 0.0
    for _ in range(cfg.trials):
        g = twist_exp(Twist(tuple(rng.uniform(-1, 1, size=3) * 2.5), tuple(rng.standard_normal(3))))
        sp = screw_decompose(g)
        if np.pi - sp.angle < CHART_MARGIN:
            continue
        rt = max(rt, np.abs(twist_exp(sp.to_twist()).m - g.m).max())
    c.below("twist_exp(screw_decompose(g)) = g", rt, "homomorphism")

    n_screws = min(20, max(2, cfg.trials // 10))
    n_metrics = min(5, max(1, cfg.trials // 40))
    for space, base, scale in ((Space.EUCLIDEAN, "so3", 1.0), (Space.MINKOWSKI, "so21", 0.5)):
        rng = c.rng(f"geodesics {space}")
        L = builtin(base)
        worst = 0.0
        worst_perturbed = 0.0
        for _ in range(n_metrics):
            M = cotangent_metric(L, OddCotangentParams(float(rng.uniform(-2, 2)), _random_t(rng, 0.5, 2.0))).m
            bad = M.copy()
            bad[0, 0] += 1.0
            for _ in range(n_screws):
                xi = _random_twist(rng, space, scale)
                g0 = twist_exp(_random_twist(rng, space, scale), 0.5)
                worst = max(worst, geodesic_residual(space, M, g0, xi))
            worst_perturbed = max(worst_perturbed, geodesic_residual(space, bad, g0, xi))
        c.below(f"screws are geodesics ({space})", worst, "geodesic")
        c.above(f"perturbed metric breaks geodesics ({space})", worst_perturbed, cfg.tol("geodesic"))

        report = riemannian_obstruction_scan(space, default_grid())
        c.equal(f"no Riemannian member ({space})", report.min_neg, 3)

    rng = c.rng("flow")
    xi = _random_twist(rng, Space.EUCLIDEAN, 1.0)
    g0 = twist_exp(_random_twist(rng, Space.EUCLIDEAN, 1.0))
    s, t = 0.3, 0.7
    (gamma_t,) = geodesic_sample(g0, xi, [t])
    (gamma_st,) = geodesic_sample(g0, xi, [s + t])
    c.below("gamma(s+t) = exp(s xi) gamma(t)", np.abs(gamma_st.m - (twist_exp(xi, s).m @ gamma_t.m)).max(), "homomorphism")
    return c.results


SUITES: dict[str, Callable[[Config], list[CheckResult]]] = {
    "algebra": algebra_suite,
    "quat": quat_suite,
    "covers": covers_suite,
    "metrics": metrics_suite,
    "screws": screws_suite,
}


def run_suite(name: str, cfg: Config) -> SuiteReport:
    """Run one suite, or all of them in fixed order for "all"."""
    names = SUITE_NAMES if name == "all" else (name,)
    report = SuiteReport(cfg.seed, cfg.trials)
    for suite in names:
        log.debug("running suite %s", suite)
        report.results.extend(SUITES[suite](cfg))
    return report


def report_document(report: SuiteReport) -> dict:
    return {
        "seed": report.seed,
        "trials": report.trials,
        "passed": report.passed,
        "results": [
            {
                "suite": r.suite,
                "name": r.name,
                "value": r.value,
                "tolerance": r.tolerance,
                "passed": r.passed,
                "detail": r.detail,
            }
            for r in report.results
        ],
    }


def format_report(report: SuiteReport) -> str:
    lines = [f"seed: {report.seed}", f"trials: {report.trials}"]
    for r in report.results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{status} {r.suite}: {r.name} = {r.value:.12g} (tol {r.tolerance:.3g})"
        lines.append(f"{line} {r.detail}" if r.detail else line)
    failed = sum(not r.passed for r in report.results)
    lines.append(f"{len(report.results) - failed} passed, {failed} failed")
    return "\n".join(lines)


def check_command(args: argparse.Namespace) -> None:
    """Handle check subcommand."""
    cfg = effective_config(args)
    report = run_suite(args.suite, cfg)
    if cfg.output_format == "text":
        print(format_report(report))
    else:
        emit(report_document(report), cfg.output_format)
    if not report.passed:
        sys.exit(1)
