"""Tests for metrics module."""

import json

import numpy as np
import pytest

from cskit.algebras import E, builtin
from cskit.errors import AlgebraDocumentError, ContractError, DegenerateError, NoComplexStructureError
from cskit.groups import h3_left_frame
from cskit.lie_core import killing_form, killing_orthonormal
from cskit.metrics import (
    EvenCotangentParams,
    H3MetricParams,
    OddCotangentParams,
    cotangent_metric,
    eigenvalues,
    exp_chart_field,
    h3_metric,
    h3_parallel_solution_dim,
    metric_document,
    parallelism_residual,
    read_matrix,
    signature,
    so31_K_J,
    so31_metric,
    closed_form_eigenvalues,
)
from cskit.types import Signature

DISPLAY = E(1, 4, 6) + E(4, 1, 6) + E(2, 5, 6) + E(5, 2, 6) - E(3, 6, 6) - E(6, 3, 6)
H3_PARAMS = H3MetricParams(a=1.0, b=0.5, c=-0.25, d=0.3, e=2.0, m=1.5)


class TestH3Family:
    """Tests for the Heisenberg metric family."""

    def test_degenerate_parameters(self):
        """Zero determinant is rejected."""
        with pytest.raises(DegenerateError, match="degenerate H3 parameters"):
            H3MetricParams(a=0.0, b=0.0, c=0.0, d=0.0, e=1.0, m=1.0)

    def test_determinant(self):
        """aem - ad^2 - b^2 m + 2bcd - c^2 e."""
        p = H3MetricParams(a=1.0, b=0.0, c=0.0, d=0.0, e=2.0, m=3.0)
        assert p.determinant == 6.0

    def test_origin_matches_coframe(self):
        """At the origin the coordinate matrix is the coframe matrix."""
        np.testing.assert_allclose(h3_metric(H3_PARAMS)([0.0, 0.0, 0.0]), H3_PARAMS.coframe_matrix())

    def test_symmetric(self):
        """Coordinate matrices are symmetric everywhere."""
        m = h3_metric(H3_PARAMS)([0.7, -1.2, 3.0])
        np.testing.assert_array_equal(m, m.T)

    def test_point_shape(self):
        """Chart points must have three coordinates."""
        with pytest.raises(ContractError, match="chart point"):
            h3_metric(H3_PARAMS)([0.0, 0.0])

    def test_parallel(self, rng):
        """The family is parallel for the canonical connection."""
        points = rng.uniform(-1, 1, size=(20, 3))
        assert parallelism_residual(h3_metric(H3_PARAMS), builtin("h3"), h3_left_frame, points) < 1e-6

    def test_perturbation_detected(self, rng):
        """Adding x dx dy breaks parallelism."""
        field = h3_metric(H3_PARAMS).perturbed(0, 1, lambda q: q[0])
        points = rng.uniform(-1, 1, size=(20, 3))
        assert parallelism_residual(field, builtin("h3"), h3_left_frame, points) > 1e-3

    def test_solution_space(self, rng):
        """Parallel symmetric tensors on H3 form a six-dimensional space."""
        assert h3_parallel_solution_dim(rng) == 6


class TestExpChart:
    """Tests for exp_chart_field."""

    def test_killing_form_parallel(self, rng):
        """Biinvariant forms are parallel in the exponential chart."""
        so3 = builtin("so3")
        field, frame = exp_chart_field(so3, killing_form(so3))
        assert parallelism_residual(field, so3, frame, rng.uniform(-1, 1, size=(10, 3))) < 1e-6

    def test_non_invariant_form(self, rng):
        """A form that is not ad-invariant fails the check."""
        so3 = builtin("so3")
        field, frame = exp_chart_field(so3, np.diag([1.0, 2.0, 3.0]))
        assert parallelism_residual(field, so3, frame, rng.uniform(-1, 1, size=(5, 3))) > 0.1

    def test_needs_three_dimensions(self):
        """Only 3-dimensional algebras are supported."""
        with pytest.raises(ContractError, match="3-dimensional"):
            exp_chart_field(builtin("so31"), np.eye(6))


class TestSo31:
    """Tests for the so(3,1) biinvariant family."""

    def test_K_J(self):
        """K0(J., .) = 4 (E14+E41+E25+E52-E36-E63)."""
        np.testing.assert_allclose(so31_K_J().m, 4 * DISPLAY, atol=1e-10)

    def test_metric_matrix(self):
        """k1 diag(1,1,1,-1,-1,-1) + k2 display."""
        B = so31_metric(2.0, 0.5)
        np.testing.assert_allclose(B.m, 2.0 * np.diag([1.0, 1.0, 1.0, -1.0, -1.0, -1.0]) + 0.5 * DISPLAY)
        assert B.labels == builtin("so31").labels

    def test_neutral_signature(self):
        """Nondegenerate members have signature (3, 3)."""
        assert signature(so31_metric(1.0, 0.7)) == Signature(3, 3, 0)

    def test_degenerate(self):
        """k1 = k2 = 0 is degenerate."""
        with pytest.raises(DegenerateError, match="degenerate so\\(3,1\\) metric"):
            so31_metric(0.0, 0.0)


class TestCotangentMetric:
    """Tests for cotangent_metric."""

    def test_zero_t(self):
        """t = 0 is degenerate."""
        with pytest.raises(DegenerateError, match="t must be nonzero"):
            OddCotangentParams(1.0, 0.0)

    def test_even_zero_t(self):
        """t1 = t2 = 0 is degenerate."""
        with pytest.raises(DegenerateError, match="cannot both vanish"):
            EvenCotangentParams(1.0, 1.0, 0.0, 0.0)

    def test_odd_block_form(self):
        """[[s K0, t I], [t I, 0]]."""
        B = cotangent_metric(builtin("so3"), OddCotangentParams(1.0, 2.0))
        np.testing.assert_allclose(B.m[:3, :3], -2 * np.eye(3), atol=1e-12)
        np.testing.assert_allclose(B.m[:3, 3:], 2 * np.eye(3))
        np.testing.assert_allclose(B.m[3:, 3:], 0.0)

    @pytest.mark.parametrize("name", ["so3", "su2", "sl2", "so21"])
    def test_neutral_signature(self, name):
        """Cotangent metrics have signature (n, n)."""
        B = cotangent_metric(builtin(name), OddCotangentParams(0.8, -1.3))
        assert signature(B) == Signature(3, 3, 0)

    @pytest.mark.parametrize("name", ["so3", "sl2", "so21"])
    def test_eigenvalues_in_sylvester_basis(self, name):
        """Spectrum matches the closed form with l1, l2 = (s -+ sqrt(s^2 + 4t^2))/2."""
        L, _, p = killing_orthonormal(builtin(name))
        s, t = 1.5, -0.4
        B = cotangent_metric(L, OddCotangentParams(s, t))
        np.testing.assert_allclose(eigenvalues(B), closed_form_eigenvalues(s, t, p, 3), atol=1e-10)

    def test_golden_ratio(self):
        """s = t = 1 on so(3) gives (-1 +- sqrt 5)/2."""
        values = closed_form_eigenvalues(1.0, 1.0, 3, 3)
        root5 = np.sqrt(5.0)
        np.testing.assert_allclose(values, [-(1 + root5) / 2] * 3 + [(root5 - 1) / 2] * 3)

    def test_odd_rejected_on_so31(self):
        """so(3,1) needs the four-parameter family."""
        with pytest.raises(ContractError, match="complex structure"):
            cotangent_metric(builtin("so31"), OddCotangentParams(1.0, 1.0))

    def test_even_rejected_without_J(self):
        """so(3) carries no complex structure."""
        with pytest.raises(NoComplexStructureError):
            cotangent_metric(builtin("so3"), EvenCotangentParams(1.0, 0.0, 1.0, 0.0))

    def test_even_so31(self):
        """Four-parameter metrics on T*so(3,1) have signature (6, 6)."""
        B = cotangent_metric(builtin("so31"), EvenCotangentParams(0.3, -0.2, 1.0, 0.5))
        assert B.dim == 12
        assert signature(B) == Signature(6, 6, 0)
        np.testing.assert_array_equal(B.m, B.m.T)

    def test_J_shape_checked(self):
        """An explicit J must match the algebra."""
        with pytest.raises(ContractError, match="complex structure has shape"):
            cotangent_metric(builtin("so31"), EvenCotangentParams(1.0, 0.0, 1.0, 0.0), J=np.eye(3))

    def test_document(self):
        """Documents carry basis labels and the matrix."""
        doc = metric_document(cotangent_metric(builtin("so3"), OddCotangentParams(1.0, 1.0)))
        assert doc["basis"] == ["e1", "e2", "e3", "e1*", "e2*", "e3*"]
        assert len(doc["matrix"]) == 6


class TestSignature:
    """Tests for signature and read_matrix."""

    def test_counts_zero(self):
        """Numerically zero eigenvalues are counted separately."""
        assert signature(np.diag([2.0, -1.0, 1e-14])) == Signature(1, 1, 1)

    def test_zero_matrix(self):
        """All eigenvalues of the zero matrix are zero."""
        assert signature(np.zeros((2, 2))) == Signature(0, 0, 2)

    def test_inline_json(self):
        """Inline nested lists parse."""
        np.testing.assert_array_equal(read_matrix("[[1, 0], [0, -1]]"), np.diag([1.0, -1.0]))

    def test_file_with_matrix_key(self, tmp_path):
        """Files may hold {"matrix": ...}."""
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"matrix": [[0, 1], [1, 0]]}))
        assert signature(read_matrix(str(path))) == Signature(1, 1, 0)

    @pytest.mark.parametrize(
        "text, error, message",
        [
            ("[[1, 0]", AlgebraDocumentError, "invalid matrix JSON"),
            ('[["a", 0], [0, 1]]', AlgebraDocumentError, "must be numbers"),
            ("[[1, 0, 0], [0, 1, 0]]", ContractError, "square"),
            ("[[1, 2], [0, 1]]", ContractError, "not symmetric"),
            ("[]", ContractError, "square"),
        ],
    )
    def test_bad_input(self, text, error, message):
        """Malformed matrices are rejected."""
        with pytest.raises(error, match=message):
            read_matrix(text)
