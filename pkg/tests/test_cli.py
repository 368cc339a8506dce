"""Tests for the cskit command line."""

import json
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from cskit import __version__
from cskit.cli import build_parser, exit_code, main
from cskit.errors import (
    AlgebraDocumentError,
    ChartOverflowError,
    ConfigError,
    ContractError,
    DegenerateError,
    NoComplexStructureError,
    NumericalDriftError,
)

ROOT5 = np.sqrt(5.0)


def run(argv, capsys):
    """Run main and return (exit code, stdout, stderr)."""
    try:
        main(argv)
        code = 0
    except SystemExit as e:
        code = e.code if isinstance(e.code, int) else 1
    out, err = capsys.readouterr()
    return code, out, err


class TestParser:
    """Tests for argument parsing."""

    def test_no_command(self, capsys):
        """Missing subcommand prints help and exits 2."""
        code, out, _ = run([], capsys)
        assert code == 2
        assert "usage: cskit" in out

    def test_version(self, capsys):
        """--version prints the package version."""
        code, out, _ = run(["--version"], capsys)
        assert code == 0
        assert __version__ in out

    def test_unknown_group(self, capsys):
        """argparse rejects unknown metric families with exit 2."""
        code, _, err = run(["metric", "t*so4"], capsys)
        assert code == 2
        assert "invalid choice" in err

    def test_geodesic_v_not_abbreviation(self):
        """--v belongs to geodesic, not a prefix of --version or --verbose."""
        args = build_parser().parse_args(["geodesic", "se3", "--v", "0", "0", "1"])
        assert args.v == [0.0, 0.0, 1.0]
        assert args.verbose is False

    def test_subcommands(self):
        """Every subcommand is registered."""
        parser = build_parser()
        for argv in (
            ["metric", "so31"],
            ["signature", "[[1]]"],
            ["centralizer", "so3"],
            ["iso-verify", "psi"],
            ["geodesic", "se3"],
            ["check", "all"],
            ["algebra-load", "x.yaml"],
        ):
            assert callable(parser.parse_args(argv).func)


class TestExitCodes:
    """Tests for exit_code mapping."""

    @pytest.mark.parametrize(
        "error, code",
        [
            (ConfigError("x"), 2),
            (AlgebraDocumentError("x"), 4),
            (FileNotFoundError("x"), 4),
            (ContractError("x"), 3),
            (DegenerateError("x"), 3),
            (NoComplexStructureError("x"), 3),
            (ChartOverflowError("x"), 3),
            (NumericalDriftError("x"), 3),
            (RuntimeError("x"), None),
        ],
    )
    def test_mapping(self, error, code):
        """Library errors map to fixed exit codes."""
        assert exit_code(error) == code

    def test_unexpected_errors_propagate(self, capsys):
        """Errors outside the hierarchy are not swallowed."""
        with patch("cskit.metrics.build_metric", side_effect=RuntimeError("boom")):
            with pytest.raises(RuntimeError, match="boom"):
                main(["metric", "so31", "--k1", "1", "--k2", "0"])


class TestMetricCommand:
    """Tests for metric subcommand."""

    def test_sylvester_golden_ratio(self, capsys):
        """s = t = 1 on T*so(3) in the Sylvester basis."""
        code, out, _ = run(["metric", "t*so3", "--s", "1", "--t", "1", "--basis", "sylvester"], capsys)
        assert code == 0
        doc = json.loads(out)
        expected = [-(1 + ROOT5) / 2] * 3 + [(ROOT5 - 1) / 2] * 3
        np.testing.assert_allclose(doc["eigenvalues"], expected, atol=1e-12)
        assert doc["signature"] == {"neg": 3, "pos": 3, "zero": 0}

    def test_native_basis(self, capsys):
        """Native so(3) basis has K0 = -2 I in the top-left block."""
        code, out, _ = run(["metric", "t*so3", "--s", "1", "--t", "1"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["basis"][:3] == ["e1", "e2", "e3"]
        assert doc["matrix"][0][0] == pytest.approx(-2.0)

    def test_degenerate(self, capsys):
        """t = 0 exits 3."""
        code, out, err = run(["metric", "t*sl2", "--s", "0", "--t", "0"], capsys)
        assert code == 3
        assert out == ""
        assert err.startswith("Error: degenerate")

    def test_missing_parameter(self, capsys):
        """Missing family parameters exit 2."""
        code, _, err = run(["metric", "t*so3", "--s", "1"], capsys)
        assert code == 2
        assert "--t" in err

    def test_so31_even_family(self, capsys):
        """T*so(3,1) takes (s1, s2, t1, t2)."""
        argv = ["metric", "t*so31", "--s1", "1", "--s2", "0.5", "--t1", "1", "--t2", "-1"]
        code, out, _ = run(argv, capsys)
        assert code == 0
        doc = json.loads(out)
        assert len(doc["matrix"]) == 12
        assert doc["signature"] == {"neg": 6, "pos": 6, "zero": 0}

    def test_h3_at_point(self, capsys):
        """h3 metrics are evaluated at --at."""
        argv = ["metric", "h3", "--a", "1", "--b", "0", "--c", "0", "--d", "0", "--e", "1", "--m", "1"]
        code, out, _ = run([*argv, "--at", "2", "0", "0"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["basis"] == ["dx", "dy", "dz"]
        # mu(dy, dy) = a x^2/4 - b x + e
        assert doc["matrix"][1][1] == pytest.approx(2.0)

    def test_text_format(self, capsys):
        """--format text prints key: value lines."""
        code, out, _ = run(["--format", "text", "metric", "so31", "--k1", "1", "--k2", "0"], capsys)
        assert code == 0
        assert "group: so31" in out.splitlines()
        assert "signature: neg=3 pos=3 zero=0" in out.splitlines()


class TestSignatureCommand:
    """Tests for signature subcommand."""

    def test_inline(self, capsys):
        """Inline JSON matrices are accepted."""
        code, out, _ = run(["signature", "[[0, 1], [1, 0]]"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert (doc["neg"], doc["pos"], doc["zero"]) == (1, 1, 0)
        np.testing.assert_allclose(doc["eigenvalues"], [-1.0, 1.0])

    def test_csv_format(self, capsys):
        """--format csv prints key,value rows."""
        code, out, _ = run(["--format", "csv", "signature", "[[2, 0], [0, -3]]"], capsys)
        assert code == 0
        assert out.splitlines() == ["neg,1", "pos,1", "zero,0", "eigenvalues,-3,2"]

    def test_bad_json(self, capsys):
        """Unparseable input exits 4."""
        code, _, err = run(["signature", "[[0, 1]"], capsys)
        assert code == 4
        assert "invalid matrix JSON" in err

    def test_asymmetric(self, capsys):
        """Asymmetric matrices exit 3."""
        code, _, _ = run(["signature", "[[0, 1], [0, 0]]"], capsys)
        assert code == 3


class TestCentralizerCommand:
    """Tests for centralizer subcommand."""

    def test_so31(self, capsys):
        """so(3,1) has a two-dimensional centralizer with J."""
        code, out, _ = run(["centralizer", "so31"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["dim"] == 2
        J = np.array(doc["J"])
        np.testing.assert_allclose(J @ J, -np.eye(6), atol=1e-10)

    def test_h3(self, capsys):
        """h3 has a three-dimensional centralizer and no J."""
        code, out, _ = run(["centralizer", "h3"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["dim"] == 3
        assert "J" not in doc

    def test_missing_document(self, capsys):
        """Unknown names are read as paths; missing files exit 4."""
        code, _, err = run(["centralizer", "no-such-algebra.yaml"], capsys)
        assert code == 4
        assert err.startswith("Error:")


class TestAlgebraLoadCommand:
    """Tests for algebra-load subcommand."""

    def test_heisenberg(self, tmp_path, capsys):
        """A valid document reports its invariants."""
        path = tmp_path / "heis.yaml"
        path.write_text("dim: 3\nlabels: [x, y, z]\nbrackets:\n  - {i: 0, j: 1, coeffs: {'2': 1.0}}\n")
        code, out, _ = run(["algebra-load", str(path)], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["algebra"] == "heis"
        assert doc["labels"] == ["x", "y", "z"]
        assert doc["derived_dim"] == 1
        assert doc["centralizer_dim"] == 3

    def test_jacobi_violation(self, tmp_path, capsys):
        """Documents failing the Jacobi identity exit 4."""
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "dim": 3,
                    "brackets": [
                        {"i": 0, "j": 1, "coeffs": {"0": 1}},
                        {"i": 1, "j": 2, "coeffs": {"1": 1}},
                        {"i": 0, "j": 2, "coeffs": {"2": 1}},
                    ],
                }
            )
        )
        code, _, err = run(["algebra-load", str(path)], capsys)
        assert code == 4
        assert "Jacobi" in err


class TestIsoVerifyCommand:
    """Tests for iso-verify subcommand."""

    def test_pi_cover(self, capsys):
        """pi_cover passes with a fixed seed."""
        code, out, _ = run(["iso-verify", "pi_cover", "--trials", "10", "--seed", "3"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        assert doc["seed"] == 3
        assert doc["codomain"] == "SE3"

    def test_failure_exits_1(self, capsys):
        """A residual above tolerance exits 1."""
        with patch("cskit.isomaps.hom_residual", return_value=1.0):
            code, out, _ = run(["iso-verify", "psi", "--trials", "2"], capsys)
        assert code == 1
        assert json.loads(out)["passed"] is False

    def test_trace_form_scale(self, capsys):
        """phibar uses the configured trace form scale."""
        (Path.cwd() / "cskit.toml").write_text("[isomaps]\ntrace_form_scale = 0.5\n")
        code, out, _ = run(["iso-verify", "phibar", "--trials", "5"], capsys)
        assert code == 0
        assert json.loads(out)["passed"] is True


class TestGeodesicCommand:
    """Tests for geodesic subcommand."""

    def test_stdout_csv(self, capsys):
        """Without --out the CSV goes to stdout."""
        code, out, _ = run(["geodesic", "se3", "--omega", "0", "0", "1", "--v", "0", "0", "1", "--steps", "3"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("t,m00,")
        assert len(lines) == 4

    def test_out_file_with_screw(self, tmp_path, capsys):
        """--out writes the file and reports the final screw."""
        path = tmp_path / "traj.csv"
        argv = ["geodesic", "se3", "--omega", "0", "0", "1", "--v", "0", "0", "0.5", "--steps", "5", "-o", str(path)]
        code, out, _ = run(argv, capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["points"] == 5
        assert doc["screw"]["angle"] == pytest.approx(1.0)
        assert doc["screw"]["pitch"] == pytest.approx(0.5)
        assert len(path.read_text().splitlines()) == 6

    def test_minkowski_has_no_screw(self, tmp_path, capsys):
        """SE(2,1) output carries no screw decomposition."""
        path = tmp_path / "traj.csv"
        code, out, _ = run(["geodesic", "se21", "--omega", "0.3", "0", "0", "--steps", "2", "-o", str(path)], capsys)
        assert code == 0
        assert "screw" not in json.loads(out)

    def test_too_few_steps(self, capsys):
        """--steps below 2 exits 2."""
        code, _, err = run(["geodesic", "se3", "--steps", "1"], capsys)
        assert code == 2
        assert "--steps" in err

    def test_unwritable_output(self, tmp_path, capsys):
        """I/O failures exit 4."""
        with patch("cskit.screws.write_trajectory_csv", side_effect=PermissionError("denied")):
            code, _, err = run(["geodesic", "se3", "-o", str(tmp_path / "x.csv")], capsys)
        assert code == 4
        assert "denied" in err


class TestCheckCommand:
    """Tests for check subcommand."""

    def test_algebra_suite_passes(self, capsys):
        """The algebra suite passes and reports in text."""
        code, out, _ = run(["--format", "text", "check", "algebra", "--trials", "3"], capsys)
        assert code == 0
        assert out.splitlines()[0] == "seed: 0"
        assert out.splitlines()[-1].endswith(" 0 failed")

    def test_impossible_tolerance_fails(self, capsys):
        """A tolerance no finite-difference check can meet exits 1."""
        code, out, _ = run(["check", "metrics", "--trials", "4", "--tol", "parallelism=1e-30"], capsys)
        assert code == 1
        doc = json.loads(out)
        assert doc["passed"] is False
        failed = [r["name"] for r in doc["results"] if not r["passed"]]
        assert "h3 family is parallel" in failed

    def test_all_suites_pass(self, capsys):
        """check all exits 0 at seed 42 with the default trial count."""
        code, out, _ = run(["check", "all", "--seed", "42"], capsys)
        doc = json.loads(out)
        assert [r["name"] for r in doc["results"] if not r["passed"]] == []
        assert (code, doc["passed"], doc["trials"]) == (0, True, 200)

    @pytest.mark.parametrize("spec", ["bogus=1", "parallelism"])
    def test_bad_tolerance(self, spec, capsys):
        """Bad --tol values exit 2."""
        code, _, err = run(["check", "quat", "--tol", spec], capsys)
        assert code == 2
        assert err.startswith("Error:")

    def test_project_seed(self, project_dir, monkeypatch, capsys):
        """Seed and trials come from cskit.toml."""
        monkeypatch.chdir(project_dir)
        with patch("cskit.checks.run_suite") as run_suite:
            run_suite.return_value.passed = True
            run_suite.return_value.seed = 7
            run_suite.return_value.trials = 20
            run_suite.return_value.results = []
            code, _, _ = run(["check", "quat"], capsys)
        assert code == 0
        cfg = run_suite.call_args.args[1]
        assert (cfg.seed, cfg.trials) == (7, 20)
