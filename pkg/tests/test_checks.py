"""Tests for checks module."""

from unittest.mock import patch

import numpy as np
import pytest

from cskit import checks
from cskit.config import Config
from cskit.types import CheckResult, SuiteReport


def _report(*passed: bool) -> SuiteReport:
    report = SuiteReport(seed=5, trials=10)
    report.results = [CheckResult("quat", f"check {i}", 1e-14, 1e-12, ok) for i, ok in enumerate(passed)]
    return report


class TestCheckRng:
    """Tests for check_rng."""

    def test_deterministic(self):
        """Same seed and name give the same stream."""
        a = checks.check_rng(3, "quat/split exp").random(4)
        b = checks.check_rng(3, "quat/split exp").random(4)
        np.testing.assert_array_equal(a, b)

    def test_names_are_independent(self):
        """Different check names draw different streams."""
        a = checks.check_rng(3, "covers/rot3").random(4)
        b = checks.check_rng(3, "covers/omega").random(4)
        assert not np.array_equal(a, b)


class TestCollector:
    """Tests for the result collector."""

    def test_below_uses_named_tolerance(self):
        """String tolerances are looked up in the config."""
        c = checks._Collector("metrics", Config(tolerances={"geodesic": 1e-3}))
        c.below("g", 5e-4, "geodesic")
        c.below("h", 2e-3, "geodesic")
        assert [r.passed for r in c.results] == [True, False]
        assert c.results[0].tolerance == 1e-3

    def test_above_is_negative_control(self):
        """above passes only when the value exceeds the threshold."""
        c = checks._Collector("covers", Config())
        c.above("broken", 0.5, 0.1)
        c.above("not broken", 1e-16, 0.1)
        assert [r.passed for r in c.results] == [True, False]

    def test_equal(self):
        """equal records the observed and expected values."""
        c = checks._Collector("algebra", Config())
        c.equal("dim", 3, 2)
        assert not c.results[0].passed
        assert c.results[0].detail == "observed 3, expected 2"


class TestSuites:
    """Tests for the property suites."""

    def test_algebra_suite(self):
        """Every algebra check passes with the default tolerances."""
        results = checks.algebra_suite(Config(trials=5))
        failed = [r.name for r in results if not r.passed]
        assert failed == []
        assert {r.suite for r in results} == {"algebra"}

    def test_quat_suite(self):
        """Every quaternion check passes."""
        results = checks.quat_suite(Config(seed=1, trials=10))
        assert [r.name for r in results if not r.passed] == []

    def test_seed_reproducible(self):
        """The same seed gives the same values."""
        first = [r.value for r in checks.quat_suite(Config(seed=4, trials=5))]
        second = [r.value for r in checks.quat_suite(Config(seed=4, trials=5))]
        assert first == second


class TestRunSuite:
    """Tests for run_suite."""

    def test_all_runs_in_fixed_order(self):
        """'all' runs every suite in SUITE_NAMES order."""
        calls = []

        def fake(name):
            def suite(cfg):
                calls.append(name)
                return [CheckResult(name, "ok", 0.0, 1.0, True)]

            return suite

        with patch.dict(checks.SUITES, {name: fake(name) for name in checks.SUITE_NAMES}):
            report = checks.run_suite("all", Config(seed=2, trials=3))
        assert calls == list(checks.SUITE_NAMES)
        assert [r.suite for r in report.results] == list(checks.SUITE_NAMES)
        assert (report.seed, report.trials, report.passed) == (2, 3, True)

    def test_single_suite(self):
        """A named suite runs alone."""
        with patch.dict(checks.SUITES, {"quat": lambda cfg: []}):
            report = checks.run_suite("quat", Config())
        assert report.results == []
        assert report.passed

    def test_all_passes_at_default_trials(self):
        """Every suite passes at seed 42 with the default trial count."""
        report = checks.run_suite("all", Config(seed=42))
        assert report.trials == 200
        assert [r.name for r in report.results if not r.passed] == []
        assert report.passed


class TestReports:
    """Tests for report_document and format_report."""

    def test_document(self):
        """Documents carry the seed and one entry per check."""
        doc = checks.report_document(_report(True, False))
        assert doc["seed"] == 5
        assert doc["trials"] == 10
        assert doc["passed"] is False
        assert [r["passed"] for r in doc["results"]] == [True, False]
        assert set(doc["results"][0]) == {"suite", "name", "value", "tolerance", "passed", "detail"}

    def test_format(self):
        """Text reports list PASS/FAIL lines and a summary."""
        lines = checks.format_report(_report(True, False)).splitlines()
        assert lines[:2] == ["seed: 5", "trials: 10"]
        assert lines[2].startswith("PASS quat: check 0 = 1e-14")
        assert lines[3].startswith("FAIL quat: check 1")
        assert lines[-1] == "1 passed, 1 failed"

    @pytest.mark.parametrize("passed", [(), (True,), (True, True)])
    def test_empty_and_passing(self, passed):
        """Reports with no failures pass."""
        assert _report(*passed).passed
