"""Tests for screws module."""

import numpy as np
import pytest
from scipy.linalg import expm

from cskit.algebras import builtin
from cskit.errors import ChartOverflowError, ContractError
from cskit.groups import basis_of, identity, is_member
from cskit.metrics import OddCotangentParams, cotangent_metric
from cskit.screws import (
    ScrewParams,
    Twist,
    default_grid,
    generate_trajectory_csv,
    geodesic_residual,
    geodesic_sample,
    riemannian_obstruction_scan,
    screw_decompose,
    space_of,
    trajectory_header,
    twist_exp,
    twist_log,
    write_trajectory_csv,
)
from cskit.types import GroupId, Space

XI = Twist((0.3, -0.2, 0.5), (0.4, 0.1, -0.6))


class TestTwist:
    """Tests for Twist and twist_exp."""

    def test_coordinates(self):
        """as_array lists omega then v."""
        np.testing.assert_array_equal(XI.as_array(), [0.3, -0.2, 0.5, 0.4, 0.1, -0.6])
        assert Twist.from_array(XI.as_array()) == XI

    def test_bad_shape(self):
        """Coordinate vectors have six entries."""
        with pytest.raises(ContractError, match="expected \\(6,\\)"):
            Twist.from_array(np.zeros(5))

    @pytest.mark.parametrize("space", list(Space))
    def test_matrix_is_basis_matrix(self, space):
        """The 4x4 generator uses the rigid-motion algebra basis."""
        xi = Twist(XI.omega, XI.v, space)
        np.testing.assert_allclose(xi.matrix(), basis_of(xi.group).matrix(xi.as_array()), atol=1e-15)

    @pytest.mark.parametrize("space", list(Space))
    @pytest.mark.parametrize("t", [0.0, 1e-9, 0.7, 2.0])
    def test_exp_matches_expm(self, space, t):
        """Closed form agrees with scipy's expm."""
        xi = Twist(XI.omega, XI.v, space)
        np.testing.assert_allclose(twist_exp(xi, t).m, expm(t * xi.matrix()), atol=1e-12)

    @pytest.mark.parametrize("space", list(Space))
    def test_exp_is_member(self, space):
        """exp lands in SE(3) or SE(2,1)."""
        assert is_member(twist_exp(Twist((1.0, 0.5, -2.0), (1.0, 2.0, 3.0), space)))

    @pytest.mark.parametrize("space", list(Space))
    def test_log_inverts_exp(self, space):
        """twist_log(twist_exp(xi)) = xi for small rotations."""
        xi = Twist(XI.omega, XI.v, space)
        np.testing.assert_allclose(twist_log(twist_exp(xi)).as_array(), xi.as_array(), atol=1e-12)

    def test_log_near_pi(self):
        """Half turns leave the chart."""
        with pytest.raises(ChartOverflowError):
            twist_log(twist_exp(Twist((0.0, 0.0, np.pi - 1e-6), (0.0, 0.0, 0.0))))

    def test_space_of(self):
        """Only rigid-motion groups have a space."""
        assert space_of(GroupId.SE21) is Space.MINKOWSKI
        with pytest.raises(ContractError, match="not a rigid-motion group"):
            space_of(GroupId.SO3)


class TestScrewDecompose:
    """Tests for screw_decompose."""

    def test_recovers_screw(self):
        """Axis, angle and pitch come back from the motion."""
        sp = ScrewParams(np.array([1.0, 2.0, 0.0]), np.array([0.0, 0.0, 1.0]), 1.2, 0.4)
        out = screw_decompose(twist_exp(sp.to_twist()))
        assert out.angle == pytest.approx(1.2)
        assert out.pitch == pytest.approx(0.4)
        np.testing.assert_allclose(out.axis_dir, [0.0, 0.0, 1.0], atol=1e-12)
        np.testing.assert_allclose(out.axis_point, [1.0, 2.0, 0.0], atol=1e-12)

    def test_pure_translation(self):
        """Zero rotation gives a pure translation."""
        out = screw_decompose(twist_exp(Twist((0.0, 0.0, 0.0), (3.0, 0.0, 4.0))))
        assert out.pure_translation
        assert out.distance == pytest.approx(5.0)
        np.testing.assert_allclose(out.axis_dir, [0.6, 0.0, 0.8])

    def test_identity(self):
        """The identity is a zero translation."""
        out = screw_decompose(identity(GroupId.SE3))
        assert out.pure_translation
        assert out.distance == 0.0

    def test_near_half_turn(self):
        """Angles close to pi use the symmetric part for the axis."""
        axis = np.array([1.0, 2.0, 2.0]) / 3.0
        sp = ScrewParams(np.zeros(3), axis, np.pi - 1e-7, 0.0)
        out = screw_decompose(twist_exp(sp.to_twist()))
        assert out.angle == pytest.approx(np.pi - 1e-7, abs=1e-9)
        np.testing.assert_allclose(out.axis_dir, axis, atol=1e-6)

    @pytest.mark.parametrize("seed", range(5))
    def test_round_trip(self, seed):
        """twist_exp(screw_decompose(g).to_twist()) = g."""
        rng = np.random.default_rng(seed)
        g = twist_exp(Twist(tuple(rng.uniform(-1, 1, size=3)), tuple(rng.standard_normal(3))))
        np.testing.assert_allclose(twist_exp(screw_decompose(g).to_twist()).m, g.m, atol=1e-10)

    def test_needs_se3(self):
        """SE(2,1) elements have no screw decomposition."""
        with pytest.raises(ContractError, match="needs an SE3 element"):
            screw_decompose(identity(GroupId.SE21))

    def test_axis_must_be_unit(self):
        """Screw axes are unit vectors."""
        with pytest.raises(ContractError, match="unit vector"):
            ScrewParams(np.zeros(3), np.array([0.0, 0.0, 2.0]), 1.0, 0.0)


class TestGeodesics:
    """Tests for geodesic_sample and geodesic_residual."""

    def test_sample_starts_at_g0(self):
        """gamma(0) = g0."""
        g0 = twist_exp(Twist((0.1, 0.2, -0.1), (0.5, 0.0, 0.2)))
        (first, second) = geodesic_sample(g0, XI, [0.0, 1.0])
        np.testing.assert_allclose(first.m, g0.m, atol=1e-15)
        np.testing.assert_allclose(second.m, twist_exp(XI).m @ g0.m, atol=1e-12)

    def test_flow_property(self):
        """gamma(s + t) = exp(s xi) gamma(t)."""
        g0 = identity(GroupId.SE3)
        (gamma_t, gamma_st) = geodesic_sample(g0, XI, [0.7, 1.0])
        np.testing.assert_allclose(gamma_st.m, twist_exp(XI, 0.3).m @ gamma_t.m, atol=1e-12)

    @pytest.mark.parametrize(
        "space, base, scale",
        [(Space.EUCLIDEAN, "so3", 1.0), (Space.MINKOWSKI, "so21", 0.5)],
    )
    def test_screws_are_geodesics(self, space, base, scale):
        """Cartan-Schouten metrics have the screw motions as geodesics."""
        M = cotangent_metric(builtin(base), OddCotangentParams(0.7, 1.2)).m
        xi = Twist(tuple(scale * np.array(XI.omega)), XI.v, space)
        g0 = twist_exp(Twist((0.1, 0.2, -0.1), (0.5, 0.0, 0.2), space), 0.5)
        assert geodesic_residual(space, M, g0, xi) < 1e-4

    def test_perturbed_metric(self):
        """Changing one coefficient breaks the geodesic equation."""
        M = np.array(cotangent_metric(builtin("so3"), OddCotangentParams(0.7, 1.2)).m)
        M[0, 0] += 1.0
        g0 = twist_exp(Twist((0.1, 0.2, -0.1), (0.5, 0.0, 0.2)), 0.5)
        assert geodesic_residual(Space.EUCLIDEAN, M, g0, XI) > 1e-4


class TestObstruction:
    """Tests for riemannian_obstruction_scan."""

    @pytest.mark.parametrize("space", list(Space))
    def test_no_riemannian_member(self, space):
        """Every member of the family has three negative directions."""
        report = riemannian_obstruction_scan(space, default_grid(4))
        assert len(report.grid) == 16
        assert report.min_neg == 3
        assert not report.has_riemannian

    def test_document(self):
        """Documents list one signature per grid point."""
        doc = riemannian_obstruction_scan(Space.EUCLIDEAN, [(1.0, 1.0), (-2.0, 0.5)]).to_document()
        assert doc["grid"] == [[1.0, 1.0], [-2.0, 0.5]]
        assert doc["signatures"] == [{"neg": 3, "pos": 3, "zero": 0}] * 2

    @pytest.mark.parametrize(
        "grid, message",
        [
            ([], "empty"),
            ([(1.0, 0.0)], "\\|t\\| must be at least"),
            ([(1.0, 2.0, 3.0)], "must be an \\(s, t\\) pair"),
            ([(1.0, 0.0, 1.0, 0.5)], "must be an \\(s, t\\) pair"),
        ],
    )
    def test_bad_grid(self, grid, message):
        """Grids hold (s, t) pairs with t away from zero."""
        with pytest.raises(ContractError, match=message):
            riemannian_obstruction_scan(Space.EUCLIDEAN, grid)


class TestTrajectoryCsv:
    """Tests for trajectory CSV output."""

    def test_header(self):
        """t then the sixteen matrix entries."""
        header = trajectory_header()
        assert header[:3] == ["t", "m00", "m01"]
        assert header[-1] == "m33"
        assert len(header) == 17

    def test_rows(self):
        """One line per sample, full precision."""
        ts = [0.0, 0.1, 1 / 3]
        text = generate_trajectory_csv(ts, geodesic_sample(identity(GroupId.SE3), XI, ts))
        lines = text.splitlines()
        assert len(lines) == 4
        assert lines[1].split(",")[:2] == ["0", "1"]
        assert float(lines[3].split(",")[0]) == 1 / 3

    def test_length_mismatch(self):
        """Times and elements must pair up."""
        with pytest.raises(ValueError):
            generate_trajectory_csv([0.0, 1.0], [identity(GroupId.SE3)])

    def test_write(self, tmp_path):
        """write_trajectory_csv writes the generated text."""
        path = tmp_path / "traj.csv"
        ts = [0.0, 0.5]
        elements = geodesic_sample(identity(GroupId.SE21), Twist((0.2, 0.0, 0.0), (1.0, 0.0, 0.0), Space.MINKOWSKI), ts)
        write_trajectory_csv(path, ts, elements)
        assert path.read_text() == generate_trajectory_csv(ts, elements)
