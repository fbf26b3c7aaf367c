import json
import math
import os

import numpy as np
import pytest

from lowinertia import cli
from lowinertia.characteristics import omega_peak
from lowinertia.mcf import Spectrum
from lowinertia.scenario import DEFAULT_SCENARIO, format_scenario, parse_scenario

BASE_FIXED = "model = pendulum\nbeta = 0.5\nzeta_i = 1\nzeta_ii = 1.5\ntau = 0.5\nn_max = 10\nq_max = 20\n"
CAGE_STATION = """model = cage
x = 2
k_over_jgen = 0.3
delta_i = 1.0471975511965976
tau_el_initial_over_jgen = 1
tau_el_final_over_jgen = 2
t_max = 60
samples = 601
"""


def run(tmp_path, name, scenario, *args):
    """Run the CLI with a scenario file; returns (exit code, output text)."""
    spath = tmp_path / f"{name}.scn"
    spath.write_text(scenario)
    out = tmp_path / f"{name}.out"
    code = cli.main([args[0], "--scenario", str(spath), "--out", str(out), *args[1:]])
    return code, out.read_text() if out.exists() else None


def table(text):
    rows = [line for line in text.splitlines() if not line.startswith("#")]
    header = rows[0].split(",")
    data = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
    return header, data


class TestExitCodes:
    def test_parse_error(self, tmp_path, capsys):
        code, out = run(tmp_path, "bad", "model = pendulum\ncolour = red\n", "transient")
        assert code == 2 and out is None
        assert "unknown key" in capsys.readouterr().err

    def test_no_equilibrium(self, tmp_path):
        code, _ = run(tmp_path, "noeq", CAGE_STATION.replace("final_over_jgen = 2", "final_over_jgen = 0.5"),
                      "transient")
        assert code == 3

    def test_not_converged(self, tmp_path, monkeypatch):
        monkeypatch.setattr(cli, "TIME_TOL", 1e-30)
        monkeypatch.setattr(cli.eigensolver, "auto_truncation",
                            lambda p, t, tol: cli.eigensolver.TruncationReport(
                                cli.Truncation(6, 12), (), False))
        code, _ = run(tmp_path, "nc", "model = pendulum\nbeta = 0.5\nzeta_i = 1\nzeta_ii = 1.5\ntau = 0.5\n",
                      "transient")
        assert code == 4

    def test_missing_scenario_file(self, tmp_path):
        assert cli.main(["transient", "--scenario", str(tmp_path / "nope")]) == 2


class TestTransient:
    def test_cage_station_both_solvers(self, tmp_path):
        code, text = run(tmp_path, "cage", CAGE_STATION, "transient", "--solver", "both")
        assert code == 0
        header, data = table(text)
        assert header == ["t", "delta", "delta_dot", "omega_gen", "omega_grid", "delta_ode"]
        footer = [l for l in text.splitlines() if l.startswith("# max_abs_deviation")][0]
        assert float(footer.split("=")[1]) < 1e-5
        settle = math.asin(math.sin(math.pi / 3) / 2)
        assert abs(data[-1, 1] - settle) < 1e-4
        assert np.std(data[:100, 1]) > 0.05

    def test_pendulum_columns(self, tmp_path):
        code, text = run(tmp_path, "pend", BASE_FIXED, "transient", "--solver", "ode")
        header, data = table(text)
        assert code == 0 and header == ["t", "delta", "delta_dot"] and data.shape == (5001, 3)

    def test_constant_columns_at_final_equilibrium(self, tmp_path):
        sc = "model = pendulum\nbeta = 0.5\nzeta_i = 1.5\nzeta_ii = 1.5\ntau = 0.5\nsamples = 11\n"
        code, text = run(tmp_path, "flat", sc, "transient")
        _, data = table(text)
        assert code == 0
        assert np.all(data[:, 1] == data[0, 1]) and np.all(data[:, 2] == 0)

    def test_seventeen_digit_round_trip(self, tmp_path):
        _, text = run(tmp_path, "fmt", BASE_FIXED, "transient", "--solver", "ode")
        row = [l for l in text.splitlines() if not l.startswith("#")][2]
        for field in row.split(","):
            assert cli.fmt(float(field)) == field

    def test_header_echo_round_trips(self, tmp_path):
        _, text = run(tmp_path, "echo", CAGE_STATION, "transient", "--solver", "ode")
        assert cli.scenario_from_header(text) == parse_scenario(CAGE_STATION)

    def test_deterministic(self, tmp_path):
        _, a = run(tmp_path, "a", BASE_FIXED, "transient", "--solver", "both")
        _, b = run(tmp_path, "b", BASE_FIXED, "transient", "--solver", "both")
        assert a == b


@pytest.fixture(scope="module")
def base_csv(tmp_path_factory):
    return run(tmp_path_factory.mktemp("spec"), "base", BASE_FIXED, "spectrum")[1]


class TestSpectrum:
    def test_single_peak(self, base_csv):
        header, data = table(base_csv)
        assert header == ["omega", "re", "im"] and len(data) == 400
        re = data[:, 1]
        k = int(np.argmax(re))
        assert np.all(np.diff(re[:k + 1]) > 0) and np.all(np.diff(re[k:]) < 0)

    def test_peak_matches_characteristics(self, base_csv, tmp_path):
        _, data = table(base_csv)
        from_csv = omega_peak(Spectrum(data[:, 0], data[:, 1] + 1j * data[:, 2], None, None))
        code, text = run(tmp_path, "ch", BASE_FIXED, "characteristics")
        assert code == 0 and json.loads(text)["report"]["omega_peak"] == from_csv

    def test_doubling_points_bit_identical(self, base_csv, tmp_path):
        _, fine = run(tmp_path, "fine", BASE_FIXED + "omega_points = 799\n", "spectrum")
        rows = lambda t: {r.split(",")[0]: r for r in t.splitlines() if not r.startswith("#")}
        coarse_rows, fine_rows = rows(base_csv), rows(fine)
        shared = [w for w in coarse_rows if w in fine_rows and w != "omega"]
        assert len(shared) > 300
        assert all(coarse_rows[w] == fine_rows[w] for w in shared)

    def test_converged_flag(self, base_csv):
        assert "# truncation_converged = true" in base_csv


class TestCharacteristics:
    def test_overdamped_reason(self, tmp_path):
        sc = "model = pendulum\nbeta = 10\nzeta_i = 1\nzeta_ii = 1.5\ntau = 0.5\nn_max = 8\nq_max = 16\n"
        code, text = run(tmp_path, "od", sc, "characteristics")
        rep = json.loads(text)["report"]
        assert code == 0 and rep["omega_sm"] is None
        assert rep["reasons"]["omega_sm"].startswith("overdamped")

    def test_linear_limit_relaxation(self, tmp_path):
        sc = "model = pendulum\nbeta = 1\nzeta_i = 1\nzeta_ii = 1.01\ntau = 0.87\n"
        code, text = run(tmp_path, "lin", sc, "characteristics")
        assert code == 0 and abs(json.loads(text)["report"]["t_int"] / 2.0 - 1) < 0.1

    def test_metadata(self, tmp_path):
        _, text = run(tmp_path, "meta", BASE_FIXED, "characteristics")
        meta = json.loads(text)["metadata"]
        assert meta["scenario"] == format_scenario(parse_scenario(BASE_FIXED))
        assert len(meta["inputs_sha256"]) == 64


class TestVerify:
    def test_quick_default(self, tmp_path, capsys):
        assert cli.main(["verify"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["passed"] and all(c["passed"] for c in report["checks"])

    def test_corrupted_truncation(self, tmp_path):
        code, text = run(tmp_path, "bad", BASE_FIXED.replace("q_max = 20", "q_max = 0"), "verify")
        report = json.loads(text)
        assert code == 1
        assert report["checks"][0]["name"] == "precondition" and not report["checks"][0]["passed"]
        assert "TruncationTooSmall" in report["checks"][0]["detail"]

    @pytest.mark.slow
    def test_full_physical(self, tmp_path):
        code, text = run(tmp_path, "full", CAGE_STATION, "verify", "--level", "full")
        checks = {c["name"]: c for c in json.loads(text)["checks"]}
        assert code == 0 and checks["models_coincide_x_inf"]["passed"]
        assert checks["doubling_n_max"]["value"] < 1e-8


class TestSweep:
    def test_peak_rises_with_final_coupling(self, tmp_path):
        sc = "model = pendulum\nbeta = 0.5\nzeta_i = 1\nzeta_ii = 1.2\ndelta_i = 1.0471975511965976\n"
        sc += "omega_min = 0.3\nomega_max = 3\nomega_points = 120\n"
        code, text = run(tmp_path, "sw", sc, "sweep", "--param", "zeta_ii", "--values", "1.2,1.6,2.0")
        header, data = table(text)
        assert code == 0 and header[0] == "zeta_ii" and header[1:] == list(cli.SWEEP_COLUMNS)
        peak = data[:, header.index("omega_peak")]
        assert np.all(np.diff(peak) > 0)

    def test_unknown_parameter(self, tmp_path):
        code, _ = run(tmp_path, "sw", BASE_FIXED, "sweep", "--param", "colour", "--values", "1")
        assert code == 2


def test_atomic_write_leaves_no_temp_files(tmp_path):
    target = tmp_path / "out.csv"
    cli.write_atomic(str(target), "a\n")
    cli.write_atomic(str(target), "b\n")
    assert target.read_text() == "b\n" and os.listdir(tmp_path) == ["out.csv"]


def test_default_scenario_used(capsys):
    assert cli.main(["transient", "--solver", "ode"]) == 0
    assert cli.scenario_from_header(capsys.readouterr().out) == DEFAULT_SCENARIO
