import json

import pytest

from neqfridge.cli import main


class TestSteadyCommand:
    def test_benchmark_report(self, tmp_path):
        out = tmp_path / "steady.json"
        code = main([
            "steady", "--e1", "1", "--e3", "4", "--gamma", "0.3",
            "--t1", "1.3333333333333333", "--t2", "2", "--t3", "4",
            "--p", "0.01", "--g", "0.01", "--out", str(out),
        ])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["decomposition"]["d"] == pytest.approx(-4.775738017024425e-2, abs=1e-10)
        assert report["performance"]["cooling"] is True
        assert report["residuals"]["max_coefficient_delta"] < 1e-10
        assert report["frame"]["e2"] == pytest.approx(4.8)

    def test_infeasible_coupling_exits_2(self, capsys):
        code = main(["steady", "--gamma", "0.6", "--e1", "1"])
        assert code == 2
        assert "resonance infeasible" in capsys.readouterr().err

    def test_no_interaction_point(self, tmp_path):
        out = tmp_path / "steady.json"
        code = main(["steady", "--g", "0", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert abs(report["decomposition"]["d"]) < 1e-14
        assert abs(report["currents"]["q1g"]) < 1e-15
        assert report["performance"]["t1s"] == pytest.approx(report["params"]["t1"], abs=1e-10)

    def test_config_file_with_flag_override(self, tmp_path):
        config = tmp_path / "fridge.cfg"
        config.write_text(
            "# benchmark point\n"
            "e1 = 1.0\ne3 = 4.0\ngamma = 0.2\nt1 = 1.3333333333333333\n"
            "t2 = 2.0\nt3 = 4.0\np = 0.01\ng = 0.01\n"
        )
        out = tmp_path / "a.json"
        assert main(["steady", "--config", str(config), "--out", str(out)]) == 0
        assert json.loads(out.read_text())["params"]["gamma"] == 0.2
        out2 = tmp_path / "b.json"
        assert main(["steady", "--config", str(config), "--gamma", "0.3", "--out", str(out2)]) == 0
        assert json.loads(out2.read_text())["params"]["gamma"] == 0.3

    def test_bad_config_line_exits_2(self, tmp_path, capsys):
        config = tmp_path / "bad.cfg"
        config.write_text("gamma 0.3\n")
        assert main(["steady", "--config", str(config)]) == 2


class TestFigureCommand:
    def test_fig3_files(self, tmp_path):
        code = main(["figure", "fig3", "--points", "30", "--out", str(tmp_path)])
        assert code == 0
        a = (tmp_path / "fig3a.csv").read_text().splitlines()
        b = (tmp_path / "fig3b.csv").read_text().splitlines()
        header_idx = next(i for i, line in enumerate(a) if not line.startswith("#"))
        assert a[header_idx].split(",")[0] == "beta3"
        assert a[header_idx].split(",")[-1] == "q1g"
        assert b[header_idx].split(",")[-1] == "delta_c"
        assert len(a) - header_idx - 1 == 4 * 30  # four couplings

    def test_fig4_single_coupling_override(self, tmp_path):
        code = main(["figure", "fig4", "--points", "20", "--gamma", "0.2", "--out", str(tmp_path)])
        assert code == 0
        lines = (tmp_path / "fig4a.csv").read_text().splitlines()
        data = [l for l in lines if not l.startswith("#")][1:]
        assert len(data) == 20

    def test_fig5_files(self, tmp_path):
        assert main(["figure", "fig5", "--points", "15", "--out", str(tmp_path)]) == 0
        assert (tmp_path / "fig5a.csv").exists()
        assert (tmp_path / "fig5b.csv").exists()

    def test_fig6_deterministic(self, tmp_path):
        d1, d2 = tmp_path / "one", tmp_path / "two"
        assert main(["figure", "fig6", "--n", "30", "--seed", "7", "--out", str(d1)]) == 0
        assert main(["figure", "fig6", "--n", "30", "--seed", "7", "--out", str(d2)]) == 0
        assert (d1 / "fig6a.csv").read_bytes() == (d2 / "fig6a.csv").read_bytes()
        assert (d1 / "fig6b.csv").read_bytes() == (d2 / "fig6b.csv").read_bytes()
        lines = (d1 / "fig6a.csv").read_text().splitlines()
        assert any("near_bound" in line for line in lines if not line.startswith("#"))
        assert any(line.startswith("# rng: numpy-PCG64") for line in lines)


class TestSweepCommand:
    def test_writes_csv(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main([
            "sweep", "--axis", "beta3", "--lo", "0.05", "--hi", "0.45",
            "--points", "12", "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        data = [l for l in lines if not l.startswith("#")]
        assert data[0].split(",")[0] == "axis_value"
        assert len(data) == 13


class TestMaximizeCommand:
    def test_reports_window_and_optimum(self, tmp_path):
        out = tmp_path / "max.json"
        code = main(["maximize", "--gamma", "0.2", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["window"]["left"] < report["e1_star"] < report["window"]["right"]
        assert report["q1g_max"] > 0
        assert report["eta_g_star"] == pytest.approx(0.37229568257394136, abs=1e-6)

    def test_empty_window_exits_2(self, tmp_path, capsys):
        code = main([
            "maximize", "--e1", "1.6", "--gamma", "0.8",
            "--t1", "1.9", "--t2", "2.0", "--t3", "2.01",
        ])
        assert code == 2


class TestValidateCommand:
    def test_single_point_passes(self, tmp_path):
        out = tmp_path / "validate.json"
        code = main(["validate", "--gamma", "0.3", "--tol", "1e-7", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["passed"] is True
        groups = report["results"][0]["groups"]
        assert groups["oracle_equivalence"]["passed"] is True
        assert groups["oracle_equivalence"]["max_error"] < 1e-7

    def test_small_grid_passes(self, tmp_path):
        out = tmp_path / "validate.json"
        assert main(["validate", "--grid", "3", "--seed", "5", "--out", str(out)]) == 0

    def test_flipped_exponent_fails_named_invariants(self, tmp_path):
        out = tmp_path / "flip.json"
        code = main([
            "validate", "--gamma", "0.3", "--debug-flip-rnm-exponent", "--out", str(out),
        ])
        assert code == 4
        report = json.loads(out.read_text())
        groups = report["results"][0]["groups"]
        assert groups["population_range"]["passed"] is False
        assert groups["detailed_balance"]["passed"] is False


class TestEnsembleCommand:
    def test_writes_csv(self, tmp_path):
        out = tmp_path / "ens.csv"
        code = main(["ensemble", "--n", "20", "--seed", "3", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        data = [l for l in lines if not l.startswith("#")]
        assert len(data) == 21
        assert "eta_star_ratio" in data[0]


class TestExitCodes:
    def test_degenerate_solver_maps_to_3(self, monkeypatch, tmp_path):
        from neqfridge import cli
        from neqfridge.errors import DegenerateSteadyStateError

        def boom(*args, **kwargs):
            raise DegenerateSteadyStateError("synthetic degeneracy")

        monkeypatch.setattr(cli, "analytic_steady_state", boom)
        assert main(["steady", "--out", str(tmp_path / "x.json")]) == 3

    def test_missing_config_maps_to_2(self):
        assert main(["steady", "--config", "/nonexistent/path.cfg"]) == 2
