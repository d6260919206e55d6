import csv
import io
import math
import subprocess
import sys

import pytest

from cavityheat.cli import format_value, main, read_csv, relative_difference, render_csv, write_csv
from cavityheat.config import parse_config
from cavityheat.errors import SolverError
from cavityheat.quantum import HBAR, solve_equilibrium_t2

from cfgtext import edit, shipped, solve_text


def run(tmp_path, command, text, *extra):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(text, encoding="utf-8")
    out = tmp_path / "out.csv"
    code = main([command, str(cfg), "--output", str(out), *extra])
    return code, (read_csv(out) if code == 0 else None), out


class TestCsv:
    def test_one_row_two_lines(self, tmp_path):
        text = write_csv([{"a": 1.0, "b": 2}], tmp_path / "x.csv")
        assert text.count("\n") == 2 and text.endswith("\n") and "\r" not in text

    def test_fixed_width_scientific(self):
        assert format_value(2.92e-17) == "2.92000000e-17"
        assert format_value(-1.0) == "-1.00000000e+00"
        assert format_value(0.0) == "0.00000000e+00"
        assert format_value(math.inf) == "inf"

    def test_round_trip_bit_identical(self, tmp_path):
        rows = [{"t1_K": 0.04 + 0.01 * k, "p": 1.234567891e-17 * k} for k in range(5)]
        first = write_csv(rows, tmp_path / "a.csv")
        again = write_csv(read_csv(tmp_path / "a.csv"), tmp_path / "b.csv")
        assert again == first

    def test_rejects_ragged_rows(self):
        with pytest.raises(ValueError):
            render_csv([{"a": 1.0}, {"b": 1.0}])
        with pytest.raises(ValueError):
            render_csv([])

    def test_io_error_names_path(self, tmp_path):
        bad = tmp_path / "missing" / "x.csv"
        with pytest.raises(OSError, match="missing"):
            write_csv([{"a": 1.0}], bad)

    def test_relative_difference(self):
        assert relative_difference(1.0, 1.0) == 0.0
        assert relative_difference(0.0, 0.0) == 0.0
        assert relative_difference(1.0, 0.0) == math.inf
        assert relative_difference(1.1, 1.0) == pytest.approx(0.1)


class TestSolve:
    def test_equilibrium_point(self, tmp_path):
        code, rows, _ = run(tmp_path, "solve", solve_text(0.04))
        assert code == 0 and len(rows) == 1
        r = rows[0]
        assert r["t2"] == pytest.approx(0.04, abs=1e-12)
        for key in ("p_quantum", "p_two_level", "p_semiclassical"):
            assert abs(r[key]) < 1e-22
        assert r["q_eff"] == pytest.approx(20.5, rel=5e-3)
        assert list(r) == ["t1", "t2", "t_eff", "p_quantum", "p_two_level", "p_semiclassical",
                           "q_eff", "iterations", "residual"]

    def test_unrequested_models_left_blank(self, tmp_path):
        code, rows, _ = run(tmp_path, "solve", solve_text(0.1, model="quantum"))
        assert code == 0
        assert rows[0]["p_two_level"] is None and rows[0]["p_semiclassical"] is None
        assert rows[0]["p_quantum"] > 0

    def test_offset_rule(self, tmp_path):
        code, rows, _ = run(tmp_path, "solve", solve_text(0.1, t2_rule="offset", t2_offset=0.02))
        assert code == 0 and rows[0]["t2"] == pytest.approx(0.08, rel=1e-14)
        assert rows[0]["iterations"] == 0

    def test_stdout_when_no_output(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(solve_text(0.04), encoding="utf-8")
        assert main(["solve", str(cfg)]) == 0
        assert capsys.readouterr().out.startswith("t1,t2,t_eff")

    def test_rejects_sweep_block(self, tmp_path):
        code, _, _ = run(tmp_path, "solve", shipped("fig2a.cfg"))
        assert code == 1


class TestSweep:
    @pytest.fixture(scope="class")
    @staticmethod
    def heating(tmp_path_factory):
        tmp = tmp_path_factory.mktemp("heat")
        text = edit(shipped("fig2a.cfg"), sweep__points=10)
        code, rows, _ = run(tmp, "sweep-t1", text)
        assert code == 0
        return parse_config(text), rows

    def test_columns_and_grid(self, heating):
        cfg, rows = heating
        assert list(rows[0]) == ["t1_K", "t2_K", "t_eff_K", "p_cav2_W", "p_elph_W"]
        assert [r["t1_K"] for r in rows] == pytest.approx(cfg.sweep.grid(), rel=1e-8)

    def test_rows_balance_heat(self, heating):
        # photonic power into resistor 2 leaves through its phonons
        _, rows = heating
        for r in rows[1::4]:
            assert r["p_elph_W"] == pytest.approx(r["p_cav2_W"], rel=1e-6, abs=1e-24)

    def test_rows_match_direct_solve(self, heating):
        cfg, rows = heating
        for r in rows[::4]:
            eq = solve_equilibrium_t2(cfg.system, r["t1_K"])
            assert r["t2_K"] == pytest.approx(eq.t2, rel=1e-8)

    def test_decoupled_resistor_stays_at_bath(self, tmp_path):
        text = edit(shipped("fig2a.cfg"), sweep__points=5, resistor1__coupling_override=1,
                    resistor2__coupling_override=1)
        code, rows, _ = run(tmp_path, "sweep-t1", text)
        assert code == 0
        for r in rows:
            assert r["t2_K"] == pytest.approx(0.04, abs=1e-6)

    def test_requires_self_consistent_rule(self, tmp_path):
        code, _, _ = run(tmp_path, "sweep-t1", edit(shipped("fig2a.cfg"), t2_rule="offset", t2_offset=0.01))
        assert code == 1


class TestComparePower:
    def test_zero_offset_zero_power(self, tmp_path):
        # the internal-loss bath stays at T, so only a lossless cavity carries no net power
        text = edit(shipped("fig3.cfg"), t2_offset=0.0, sweep__points=3, cavity__loss_per_len=0)
        code, rows, _ = run(tmp_path, "compare-power", text)
        assert code == 0
        for r in rows:
            for key in ("p_quantum_full_W", "p_two_level_W", "p_semiclassical_W"):
                assert abs(r[key]) < 1e-22

    def test_columns(self, tmp_path):
        code, rows, _ = run(tmp_path, "compare-power", edit(shipped("fig3.cfg"), sweep__points=2))
        assert code == 0
        assert list(rows[0]) == ["t1_K", "t2_K", "p_quantum_full_W", "p_two_level_W", "p_semiclassical_W",
                                 "rel_diff_quantum_semiclassical", "rel_diff_full_twolevel"]
        r = rows[0]
        assert r["rel_diff_full_twolevel"] == pytest.approx(
            abs(r["p_two_level_W"] - r["p_quantum_full_W"]) / r["p_quantum_full_W"], rel=1e-3)  # cells hold 9 digits


class TestExitCodes:
    def test_config_error(self, tmp_path, capsys):
        code, _, _ = run(tmp_path, "solve", solve_text(0.04, bath=-1))
        assert code == 1
        assert "bath_temperature" in capsys.readouterr().err

    def test_solver_error_reports_t1(self, tmp_path, capsys, monkeypatch):
        import cavityheat.cli as cli

        def boom(*a, **k):
            raise SolverError("no convergence")

        monkeypatch.setattr(cli, "solve_equilibrium_t2", boom)
        code, _, _ = run(tmp_path, "sweep-t1", edit(shipped("fig2a.cfg"), sweep__points=3))
        assert code == 2
        assert "t1=0.04" in capsys.readouterr().err

    def test_real_nonconvergence(self, tmp_path):
        code, _, _ = run(tmp_path, "solve", solve_text(0.3, numeric__max_iterations=1))
        assert code == 2

    def test_unwritable_output(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(solve_text(0.04), encoding="utf-8")
        assert main(["solve", str(cfg), "-o", str(tmp_path / "no" / "x.csv")]) == 1


def test_deterministic_output(tmp_path):
    text = edit(shipped("fig3.cfg"), sweep__points=3)
    outputs = []
    for k in range(2):
        cfg = tmp_path / f"c{k}.cfg"
        cfg.write_text(text, encoding="utf-8")
        res = subprocess.run([sys.executable, "-m", "cavityheat", "compare-power", str(cfg)],
                             capture_output=True, check=True)
        outputs.append(res.stdout)
    assert outputs[0] == outputs[1] and outputs[0]
