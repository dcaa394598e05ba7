import csv
import json
import math

import pytest

from irs_lab.core.exceptions import (
    DomainNotStabilizedError,
    ExperimentConfigError,
    InconsistentCurveSystemError,
    RadiusMismatchError,
    TruncationIncompleteError,
)
from irs_lab.interfaces.cli.commands import COMMAND_HANDLERS, resolve_group
from irs_lab.interfaces.cli.config import load_config, read_ini
from irs_lab.interfaces.cli.main import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from irs_lab.modules.fuchsian.constructions import punctured_torus
from irs_lab.modules.fuchsian.group import format_group
from irs_lab.modules.hyperbolic.isometry import Isometry


def run(tmp_path, *args):
    return main([*args, "--output-dir", str(tmp_path), "--workers", "1", "--log-level", "warning"])


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def read_csv(path):
    with path.open(encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def polygon_area_line(path):
    line = next(l for l in path.read_text(encoding="utf-8").splitlines() if l.startswith("area:"))
    return line.split(":", 1)[1].strip()


class TestAreaCheck:
    def test_loose_tolerance_passes(self, tmp_path):
        code = run(tmp_path, "area-check", "--resolution", "200", "--tolerance", "0.05", "--deltas", "1,2")
        assert code == EXIT_OK
        checks = read_json(tmp_path / "area-check.json")["checks"]
        assert len(checks) == 2 + 9
        assert all(c["passed"] for c in checks)

    def test_zero_tolerance_fails(self, tmp_path):
        code = run(tmp_path, "area-check", "--resolution", "100", "--tolerance", "0", "--deltas", "1")
        assert code == EXIT_FAILED

    def test_missing_config(self, tmp_path):
        assert run(tmp_path, "area-check", "--config", str(tmp_path / "nope.ini")) == EXIT_USAGE

    def test_unknown_flag(self, tmp_path):
        assert run(tmp_path, "area-check", "--no-such-flag") == EXIT_USAGE


class TestDirichlet:
    def test_punctured_torus(self, tmp_path, two_pi):
        code = run(tmp_path, "dirichlet", "--group", "punctured_torus", "--stroke-width", "2")
        assert code == EXIT_OK
        assert float(polygon_area_line(tmp_path / "dirichlet.txt")) == pytest.approx(two_pi, abs=1e-3)
        assert (tmp_path / "dirichlet.svg").read_text(encoding="utf-8").lstrip().startswith("<?xml")

    def test_fixture_file(self, tmp_path, two_pi):
        fixture = tmp_path / "torus.group"
        fixture.write_text(format_group(punctured_torus(1.5, 2.5)), encoding="utf-8")
        svg = tmp_path / "drawn" / "torus.svg"
        assert run(tmp_path, "dirichlet", "--group", str(fixture), "--svg", str(svg)) == EXIT_OK
        assert svg.is_file()
        assert float(polygon_area_line(svg.with_suffix(".txt"))) == pytest.approx(two_pi, abs=1e-3)

    def test_corrupted_fixture(self, tmp_path):
        torus = punctured_torus(2.0, 2.0)
        a = torus.generators[0]
        bent = Isometry(a.a * 1.01, a.b, a.c, a.d)
        fixture = tmp_path / "bent.group"
        fixture.write_text(format_group(torus.with_generators((bent,) + torus.generators[1:])), encoding="utf-8")
        assert run(tmp_path, "dirichlet", "--group", str(fixture)) == EXIT_FAILED

    def test_missing_fixture_file(self, tmp_path):
        assert run(tmp_path, "dirichlet", "--group", str(tmp_path / "missing.group")) == EXIT_USAGE

    def test_cyclic_group_is_not_a_lattice(self, tmp_path, capsys):
        assert run(tmp_path, "dirichlet", "--group", "cyclic:length=2") == EXIT_OK
        assert "not a lattice" in capsys.readouterr().out
        assert polygon_area_line(tmp_path / "dirichlet.txt") == "inf"


class TestDegenerate:
    ARGS = ("degenerate", "--functional", "ClippedInjRad(1)", "-n", "60", "--seed", "7")

    def test_schedule_must_decrease(self, tmp_path):
        assert run(tmp_path, *self.ARGS, "--schedule", "0.5,1.0") == EXIT_USAGE
        assert run(tmp_path, *self.ARGS, "--schedule", "0.5,0.5") == EXIT_USAGE

    def test_single_step(self, tmp_path):
        assert run(tmp_path, *self.ARGS, "--schedule", "0.5") == EXIT_OK
        summary = read_json(tmp_path / "degenerate.json")
        assert set(summary["verdicts"].values()) == {"INCONCLUSIVE"}

    def test_unknown_family(self, tmp_path):
        assert run(tmp_path, *self.ARGS, "--family", "no_such_family") == EXIT_USAGE

    def test_reproducible_across_workers(self, tmp_path):
        first, second = tmp_path / "one", tmp_path / "two"
        args = (*self.ARGS, "--schedule", "1.0,0.5")
        main([*args, "--output-dir", str(first), "--workers", "1"])
        main([*args, "--output-dir", str(second), "--workers", "2"])
        text = (first / "degenerate.csv").read_text(encoding="utf-8")
        assert text == (second / "degenerate.csv").read_text(encoding="utf-8")
        rows = read_csv(first / "degenerate.csv")
        assert [float(r["t"]) for r in rows] == [1.0, 0.5]
        assert all(int(r["seed"]) != 7 for r in rows)


class TestChabautyDistance:
    def test_constant_family(self, tmp_path):
        assert run(tmp_path, "chabauty-dist", "--family", "constant") == EXIT_OK
        rows = read_csv(tmp_path / "chabauty-dist.csv")
        assert rows and all(float(r["distance"]) == 0.0 for r in rows)

    def test_algebraic_family(self, tmp_path):
        assert run(tmp_path, "chabauty-dist") == EXIT_OK
        distances = [float(r["distance"]) for r in read_csv(tmp_path / "chabauty-dist.csv")]
        assert all(a > b for a, b in zip(distances, distances[1:]))
        report = read_json(tmp_path / "chabauty-dist.json")
        assert report["passed"] and report["family"] == "algebraic"
        assert 0.0 < report["margin"] <= 1.2

    def test_unknown_family(self, tmp_path):
        assert run(tmp_path, "chabauty-dist", "--family", "punctured_torus_pinch") == EXIT_USAGE

    def test_radius_below_the_systole(self, tmp_path):
        assert run(tmp_path, "chabauty-dist", "--radius", "0.5") == EXIT_USAGE


class TestEscape:
    def test_punctured_torus_cusp(self, tmp_path):
        code = run(tmp_path, "escape", "--group", "punctured_torus:len_a=2,len_b=2", "--steps", "6", "--escape-radius", "3")
        assert code == EXIT_OK
        report = read_json(tmp_path / "escape.json")
        assert report["verdict"] == "abelian horn"
        assert report["control_distance"] <= 1e-6


class TestIrsEstimate:
    def test_constant_functional(self, tmp_path):
        code = run(tmp_path, "irs-estimate", "--group", "thrice_punctured_sphere", "--functional", "Constant(1)", "-n", "40")
        assert code == EXIT_OK
        rows = read_csv(tmp_path / "irs-estimate.csv")
        assert len(rows) == 1
        assert float(rows[0]["mean"]) == 1.0
        assert float(rows[0]["std_error"]) == 0.0

    def test_non_lattice(self, tmp_path):
        assert run(tmp_path, "irs-estimate", "--group", "cyclic", "-n", "10") == EXIT_USAGE


class TestFiberBound:
    @pytest.mark.parametrize("surface, bound", [("2,0", 1152), ("1,1", 6), ("0,3", 6)])
    def test_bounds(self, tmp_path, surface, bound):
        assert run(tmp_path, "fiber-bound", "--surface", surface) == EXIT_OK
        assert read_json(tmp_path / "fiber-bound.json")["fiber_bound"] == bound

    def test_genus_two_has_a_collision_witness(self, tmp_path):
        run(tmp_path, "fiber-bound", "--surface", "2,0")
        data = read_json(tmp_path / "fiber-bound.json")
        assert len(data["component_bounds"]) == 2
        assert all(b <= 1152 for b in data["component_bounds"])

    def test_bad_signature(self, tmp_path):
        assert run(tmp_path, "fiber-bound", "--surface", "1,0") == EXIT_USAGE


class TestConfig:
    def test_ini_sections(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text(
            "[experiment]\nseed = 5\nn = 100\n\n"
            "[degenerate]\nschedule = 1.0, 0.5, 0.25\nfunctionals = Constant(1); SoftCount(1, 0.5)\n"
            "groups = punctured_torus:len_a=1,len_b=3; pants\n",
            encoding="utf-8",
        )
        values = read_ini(path, "degenerate")
        assert values["schedule"] == ["1.0", "0.5", "0.25"]
        assert values["functionals"] == ["Constant(1)", "SoftCount(1, 0.5)"]
        assert values["groups"] == ["punctured_torus:len_a=1,len_b=3", "pants"]

        config = load_config("degenerate", path, {"n": 40})
        assert config.seed == 5
        assert config.n == 40
        assert config.schedule == [1.0, 0.5, 0.25]
        assert load_config("escape", path).schedule is None

    def test_rejects_bad_values(self, tmp_path):
        with pytest.raises(ExperimentConfigError):
            load_config("degenerate", overrides={"functionals": ["Nope(1)"]})
        with pytest.raises(ExperimentConfigError):
            load_config("degenerate", overrides={"unknown_key": 1})
        with pytest.raises(ExperimentConfigError):
            load_config("no-such-command")

    def test_output_paths(self, tmp_path):
        config = load_config("collision", overrides={"output_dir": str(tmp_path), "json_path": str(tmp_path / "x.json")})
        assert config.output("json") == tmp_path / "x.json"
        assert config.output("csv") == tmp_path / "collision.csv"

    def test_resolve_group(self):
        group = resolve_group("punctured_torus:len_a=2.5")
        assert group.construction_params["len_a"] == 2.5
        assert group.target_area == pytest.approx(2.0 * math.pi)
        with pytest.raises(ValueError):
            resolve_group("punctured_torus:len_a")
        with pytest.raises(ValueError):
            resolve_group("no_such_group")


class TestExitCodes:
    @pytest.mark.parametrize(
        "error",
        [DomainNotStabilizedError, TruncationIncompleteError, RadiusMismatchError, InconsistentCurveSystemError],
    )
    def test_scientific_errors_exit_one(self, tmp_path, monkeypatch, error):
        def failing(config):
            raise error("did not hold up")

        monkeypatch.setitem(COMMAND_HANDLERS, "fiber-bound", failing)
        assert run(tmp_path, "fiber-bound", "--surface", "1,1") == EXIT_FAILED

    def test_usage_errors_exit_two(self, tmp_path, monkeypatch):
        def failing(config):
            raise ValueError("bad input")

        monkeypatch.setitem(COMMAND_HANDLERS, "fiber-bound", failing)
        assert run(tmp_path, "fiber-bound", "--surface", "1,1") == EXIT_USAGE
