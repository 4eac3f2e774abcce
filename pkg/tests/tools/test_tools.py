"""Tests for the command tools behind the CLI."""

import json
from pathlib import Path

import numpy as np
import pytest

from compvar.core.exceptions import ValidationError
from compvar.core.models import ConservationReport, DensityReport, ResidualReport, VerificationReport
from compvar.dynamics.pwmap import PiecewiseMap
from compvar.tools.check import CheckTool
from compvar.tools.density import DensityTool, write_density
from compvar.tools.noether import NoetherTool
from compvar.tools.worked_example import WorkedExampleTool, composition_differences
from compvar.utils.problem_file import load_problem_file
from compvar.variational.problem import Problem
from compvar.variational.quadrature import QuadratureSpec


class TestBaseTool:
    """Behaviour shared by every tool."""

    def test_execute_without_problem(self) -> None:
        with pytest.raises(ValidationError, match="CheckTool needs a problem file"):
            CheckTool().execute()

    def test_from_file(self, data_dir: Path) -> None:
        tool = CheckTool.from_file(data_dir / "worked_example.json")
        assert tool.problem is not None
        assert tool.problem.composition_mode == "per_branch"


class TestCheckTool:
    def test_el_passes(self, data_dir: Path) -> None:
        report = CheckTool(load_problem_file(data_dir / "worked_example.json")).execute("el", 200)
        assert isinstance(report, ResidualReport)
        assert report.passed
        assert report.which == "el"
        assert report.tolerance == 1e-8
        assert report.functional_value == pytest.approx(0.5, abs=1e-8)

    def test_invariance_uses_symmetry_section(self, data_dir: Path) -> None:
        report = CheckTool.from_file(data_dir / "worked_example.json").execute("invariance", 200)
        assert report.passed
        assert report.which.startswith("invariance")

    def test_perturbed_fails(self, data_dir: Path) -> None:
        report = CheckTool.from_file(data_dir / "perturbed.json").execute("el", 200)
        assert not report.passed
        assert report.sup_norm > report.tolerance

    def test_functional_uses_file_quadrature(self, data_dir: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        specs: list[QuadratureSpec] = []

        def recording(problem: Problem, spec: QuadratureSpec) -> float:
            specs.append(spec)
            return 0.5

        monkeypatch.setattr("compvar.tools.check.eval_functional", recording)
        report = CheckTool.from_file(data_dir / "worked_example.json").execute("dbr", 50)
        assert report.functional_value == 0.5
        assert specs == [QuadratureSpec(tol=1e-10, max_panels=4096)]

    def test_unevaluable_functional_is_omitted(self, tmp_path: Path) -> None:
        """L = 1/x cannot be evaluated at the closed end x = 0."""
        source = {
            "lagrangian": {"expr": "1/x + q"},
            "map": [{"interval": [0, 1], "expr": "x"}],
            "tolerances": {"residual": 1.0},
        }
        path = tmp_path / "singular.json"
        path.write_text(json.dumps(source), encoding="utf-8")
        report = CheckTool.from_file(path).execute("el", 50)
        assert report.functional_value is None

    def test_invariance_needs_symmetry(self, data_dir: Path) -> None:
        tool = CheckTool.from_file(data_dir / "tent.json")
        with pytest.raises(ValidationError, match="symmetry"):
            tool.execute("invariance")

    def test_unknown_check(self, data_dir: Path) -> None:
        tool = CheckTool.from_file(data_dir / "worked_example.json")
        with pytest.raises(ValidationError, match="Unknown check"):
            tool.execute("hamilton")  # type: ignore[arg-type]


class TestNoetherTool:
    def test_file_symmetry(self, data_dir: Path) -> None:
        report = NoetherTool.from_file(data_dir / "worked_example.json").execute()
        assert isinstance(report, ConservationReport)
        assert report.verdict == "conserved"

    def test_explicit_tau_overrides_file(self, data_dir: Path) -> None:
        report = NoetherTool.from_file(data_dir / "worked_example.json").execute(tau="1")
        assert report.verdict == "not conserved"
        assert report.tau == "1"

    def test_solve_ode_excludes_tau(self, data_dir: Path) -> None:
        tool = NoetherTool.from_file(data_dir / "worked_example.json")
        with pytest.raises(ValidationError):
            tool.execute(tau="1", solve_ode=True)

    def test_solve_ode(self, data_dir: Path) -> None:
        report = NoetherTool.from_file(data_dir / "worked_example.json").execute(solve_ode=True, x_ref=0.5)
        assert report.passed
        assert report.tau_table is not None
        assert report.tau_table.x_ref == 0.5

    def test_missing_generator(self, data_dir: Path) -> None:
        with pytest.raises(ValidationError, match="--tau"):
            NoetherTool.from_file(data_dir / "tent.json").execute()

    def test_write_report(self, data_dir: Path, tmp_path: Path) -> None:
        tool = NoetherTool.from_file(data_dir / "worked_example.json")
        report = tool.execute()
        target = tmp_path / "report.txt"
        tool.write_report(report, target, "human")
        text = target.read_text(encoding="utf-8")
        assert "verdict: conserved" in text
        assert text.endswith("Result: PASSED\n")


class TestDensityTool:
    def test_tent_from_file_section(self, data_dir: Path) -> None:
        report = DensityTool.from_file(data_dir / "tent.json").execute()
        assert isinstance(report, DensityReport)
        assert report.passed
        assert report.mode == "cesaro"
        assert report.iterations == 50
        assert len(report.nodes) == 1001
        assert report.mass == pytest.approx(1.0)
        assert report.chaos_value == pytest.approx(1.0 / 6.0, abs=1e-8)

    def test_overrides(self, data_dir: Path) -> None:
        report = DensityTool.from_file(data_dir / "tent.json").execute(n=3, grid=10, mode="plain")
        assert report.mode == "plain"
        assert report.iterations == 3
        assert len(report.nodes) == 11
        assert report.mass == pytest.approx(3.0)
        assert report.passed

    def test_out_file(self, data_dir: Path, tmp_path: Path) -> None:
        target = tmp_path / "density.dat"
        DensityTool.from_file(data_dir / "tent.json").execute(grid=4, out=target)
        rows = [row.split() for row in target.read_text(encoding="utf-8").splitlines()]
        assert [row[0] for row in rows] == ["0", "0.25", "0.5", "0.75", "1"]

    def test_write_density(self, tmp_path: Path) -> None:
        target = tmp_path / "table.dat"
        write_density(np.array([0.0, 0.5]), np.array([1.0, 2.0 / 3.0]), target)
        assert target.read_text(encoding="utf-8") == "0 1\n0.5 0.666666666666667\n"


class TestWorkedExample:
    """The built-in example and its pass/fail matrix."""

    def test_composition_differences(self, worked_map: PiecewiseMap) -> None:
        spans = composition_differences(worked_map)
        assert spans == [pytest.approx((0.0, 0.25)), pytest.approx((0.75, 1.0))]

    def test_identity_has_no_differences(self) -> None:
        assert composition_differences(PiecewiseMap.identity()) == []

    @pytest.mark.slow
    def test_execute(self) -> None:
        report = WorkedExampleTool().execute()
        assert isinstance(report, VerificationReport)
        assert report.passed
        names = {check.name for check in report.checks}
        assert {"el-residual", "dbr-residual", "conservation", "uniform-density", "chaos-functional"} <= names
        assert len(report.checks) == 18
        for check in report.checks:
            assert check.fidelity == (check.mode != "actual")
            if check.fidelity:
                assert check.passed, check.name
        conservation = [c for c in report.checks if c.name == "conservation" and c.mode == "actual"]
        assert conservation and not conservation[0].passed
        assert any("actual composition differs" in note for note in report.notes)
