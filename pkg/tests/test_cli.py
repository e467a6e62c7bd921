"""Command-line runner: configs, outputs, exit codes, determinism."""

import csv
import json
import math

import numpy as np
import pytest

from mwsqueeze.cli import main


def run(tmp_path, command, config, name="cfg.json", outdir="out"):
    cfg_path = tmp_path / name
    cfg_path.write_text(json.dumps(config))
    out = tmp_path / outdir
    code = main([command, str(cfg_path), "--output-dir", str(out)])
    return code, out


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], rows[1:]
    cols = {h: np.array([float(r[i]) for r in data]) for i, h in enumerate(header)}
    return header, cols


class TestEvolve:
    def test_gaussian_route_dips_at_t_pi(self, tmp_path):
        code, out = run(tmp_path, "evolve", {
            "route": "gaussian", "r": 1.1, "theta_hz": 10e3, "num_samples": 81,
        })
        assert code == 0
        header, cols = read_csv(out / "evolve_gaussian.csv")
        assert header == ["t_seconds", "theta_t", "n1", "n2", "n3", "zeta12"]
        assert cols["zeta12"][0] == 1.0
        assert cols["zeta12"][40] <= 1e-8  # middle sample is exactly t_pi
        assert (out / "run_manifest.json").exists()

    def test_zero_couplings(self, tmp_path):
        code, out = run(tmp_path, "evolve", {
            "route": "gaussian", "xi1_hz": 0.0, "xi2_hz": 0.0,
            "t_final_s": 1e-4, "num_samples": 11,
        })
        assert code == 0
        _, cols = read_csv(out / "evolve_gaussian.csv")
        for key in ("n1", "n2", "n3"):
            assert np.all(cols[key] == 0.0)
        assert np.all(cols["zeta12"] == 1.0)

    def test_fock_route_refusal_directs_to_gaussian(self, tmp_path, capsys):
        code, _ = run(tmp_path, "evolve", {"route": "fock", "r": 1.1, "theta_hz": 10e3})
        assert code == 2
        assert "gaussian" in capsys.readouterr().err

    def test_route_all_cross_route_discrepancy(self, tmp_path):
        code, out = run(tmp_path, "evolve", {
            "route": "all", "r": 2.0, "theta_hz": 10e3, "num_samples": 41,
        })
        assert code == 0
        summary = json.loads((out / "evolve_summary.json").read_text())
        assert set(summary["routes"]) == {"analytic", "fock", "gaussian"}
        for pair in summary["discrepancies"].values():
            assert pair["max_occupation_discrepancy"] <= 1e-6

    def test_unknown_key_rejected(self, tmp_path, capsys):
        code, _ = run(tmp_path, "evolve", {"route": "gaussian", "kappa": 7000.0})
        assert code == 2
        assert "unit suffix" in capsys.readouterr().err


class TestSpectrum:
    def test_three_minima_regime(self, tmp_path):
        code, out = run(tmp_path, "spectrum", {
            "r": 1.1, "theta_over_kappa": 10.0, "kappa_hz": 7e3, "num_points": 1001,
        })
        assert code == 0
        summary = json.loads((out / "spectrum_summary.json").read_text())
        assert summary["regime"] == "three-minima"
        header, cols = read_csv(out / "spectrum.csv")
        assert header == ["omega_over_theta", "s_plus", "s_minus"]
        assert abs(cols["omega_over_theta"][0] + 3.0) < 1e-12

    def test_narrow_regime(self, tmp_path):
        code, out = run(tmp_path, "spectrum", {
            "r": 1.1, "theta_over_kappa": 0.1, "kappa_hz": 7e3, "num_points": 1001,
        })
        assert code == 0
        summary = json.loads((out / "spectrum_summary.json").read_text())
        assert summary["regime"] == "narrow"

    def test_shot_noise_run(self, tmp_path):
        code, out = run(tmp_path, "spectrum", {
            "xi1_hz": 0.0, "xi2_hz": 0.0, "kappa_hz": 7e3, "num_points": 101,
        })
        assert code == 0
        _, cols = read_csv(out / "spectrum.csv")
        assert np.max(np.abs(cols["s_plus"] - 1.0)) <= 1e-10

    def test_unstable_config_exit_code(self, tmp_path, capsys):
        code, _ = run(tmp_path, "spectrum", {
            "xi1_hz": 1e3, "xi2_hz": 0.0, "kappa_hz": 1e3, "num_points": 101,
        })
        assert code == 3
        assert "unstable" in capsys.readouterr().err


class TestValidate:
    def test_default_suite_passes(self, tmp_path):
        code, out = run(tmp_path, "validate", {"include_adiabatic": False})
        assert code == 0
        report = json.loads((out / "validate_report.json").read_text())
        assert report["failures"] == 0

    def test_corrupted_sign_fails_conservation(self, tmp_path):
        code, out = run(tmp_path, "validate", {
            "include_adiabatic": False, "corrupt_hamiltonian_sign": True,
        })
        assert code == 1
        report = json.loads((out / "validate_report.json").read_text())
        failed = {c["name"] for c in report["checks"] if not c["passed"]}
        assert "conserved_number" in failed

    def test_dimension_cap_refusal(self, tmp_path, capsys):
        code, _ = run(tmp_path, "validate", {"dimension_cap": 100})
        assert code == 2
        assert "cap" in capsys.readouterr().err


class TestSweep:
    def test_epsilon_column_matches_oracle(self, tmp_path):
        code, out = run(tmp_path, "sweep", {
            "outputs": ["epsilon"], "r_values": [1.01, 1.05, 1.1],
        })
        assert code == 0
        _, cols = read_csv(out / "sweep.csv")
        expected = [math.log(2.01 / 0.01), math.log(2.05 / 0.05), math.log(2.1 / 0.1)]
        assert np.allclose(cols["epsilon"], expected, rtol=1e-12)

    def test_single_point(self, tmp_path):
        code, out = run(tmp_path, "sweep", {
            "outputs": ["t_pi_s"], "r_values": [1.1], "theta_hz": 10e3,
        })
        assert code == 0
        _, cols = read_csv(out / "sweep.csv")
        assert len(cols["t_pi_s"]) == 1
        assert cols["t_pi_s"][0] == pytest.approx(50e-6)

    def test_temperature_grid_monotone(self, tmp_path):
        code, out = run(tmp_path, "sweep", {
            "outputs": ["n_thermal"], "temperature_k_values": [0.05, 0.1, 0.35],
            "frequency_hz": 6.83e9,
        })
        assert code == 0
        _, cols = read_csv(out / "sweep.csv")
        n = cols["n_thermal"]
        assert n[0] < n[1] < n[2]

    def test_empty_grid_rejected(self, tmp_path):
        code, _ = run(tmp_path, "sweep", {"outputs": ["epsilon"], "r_values": []})
        assert code == 2

    def test_no_axes_rejected(self, tmp_path):
        code, _ = run(tmp_path, "sweep", {"outputs": ["epsilon"]})
        assert code == 2


class TestFeasibilityCommand:
    def test_preset_payload(self, tmp_path):
        code, out = run(tmp_path, "feasibility", {
            "temperature_k": 0.1, "gamma_a_hz": 1e6,
        })
        assert code == 0
        payload = json.loads((out / "feasibility.json").read_text())
        assert payload["rb_preset"]["t_pi_s"] == pytest.approx(50e-6)
        assert payload["thermal"]["n_thermal"] == pytest.approx(0.0392, abs=1e-4)
        assert 0 < payload["thermal"]["thermal_suppression"] < 1


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        configs = [
            ("evolve", {"route": "gaussian", "r": 1.1, "theta_hz": 10e3, "num_samples": 41}),
            ("spectrum", {"r": 1.1, "theta_over_kappa": 1.0, "kappa_hz": 7e3, "num_points": 201}),
            ("sweep", {"outputs": ["epsilon"], "r_values": [1.05, 1.1]}),
        ]
        for command, cfg in configs:
            _, out1 = run(tmp_path, command, cfg, name=f"{command}1.json", outdir=f"{command}_a")
            _, out2 = run(tmp_path, command, cfg, name=f"{command}2.json", outdir=f"{command}_b")
            files1 = sorted(p.name for p in out1.iterdir())
            files2 = sorted(p.name for p in out2.iterdir())
            assert files1 == files2
            for name in files1:
                assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_missing_config_file(tmp_path, capsys):
    code = main(["evolve", str(tmp_path / "absent.json"), "--output-dir", str(tmp_path)])
    assert code == 2
