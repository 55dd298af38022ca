import json
import math

import numpy as np
import pytest

from sideband_lab.cli import main
from sideband_lab.config import config_to_dict, save_config
from sideband_lab.dataio import read_xy_csv
from sideband_lab.model import TWO_PI, BathSpec, ToneConfig, ToneSpec
from sideband_lab.presets import preset

from conftest import make_params, tone_with_gamma_opt


def read_component_csv(path):
    rows = []
    for line in path.read_text().splitlines():
        if line.startswith("#") or not line.strip():
            continue
        offset, value, comp = line.split(",")
        rows.append((float(offset), float(value), comp))
    return rows


class TestSpectrumCommand:
    def test_si_figure_multitone_peaks_at_probe_detuning(self, tmp_path):
        rc = main(["spectrum", "--preset", "si-figure", "--mode", "multitone",
                   "--out", str(tmp_path)])
        assert rc == 0
        rows = read_component_csv(tmp_path / "spectrum.csv")
        for comp in ("anti_stokes", "stokes"):
            sub = [(o, v) for o, v, c in rows if c == comp]
            peak_offset = max(sub, key=lambda t: t[1])[0]
            expected = -5e3 if comp == "anti_stokes" else 5e3
            assert peak_offset == pytest.approx(expected, abs=10.0)
        assert (tmp_path / "manifest.json").exists()
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["outputs"] == ["spectrum.csv"]

    def test_flat_spectrum_when_undriven(self, tmp_path):
        params, baths, _ = preset("si-figure")
        cfg = ToneConfig(tones=(
            ToneSpec(detuning=-(params.omega_m + TWO_PI * 5e3), role="red_probe", coupling=0.0),
            ToneSpec(detuning=+(params.omega_m + TWO_PI * 5e3), role="blue_probe", coupling=0.0),
        ), delta=TWO_PI * 5e3)
        path = tmp_path / "cfg.json"
        save_config(path, params, baths, cfg)
        rc = main(["spectrum", "--config", str(path), "--mode", "multitone",
                   "--out", str(tmp_path)])
        assert rc == 0
        rows = read_component_csv(tmp_path / "spectrum.csv")
        values = [v for _, v, _ in rows]
        assert max(values) - min(values) < 1e-12

    def test_unstable_config_exit_code(self, tmp_path, capsys):
        params, baths, _ = preset("si-figure")
        delta = TWO_PI * 5e3
        cfg = ToneConfig(tones=(
            tone_with_gamma_opt(params, TWO_PI * 10.0, "red_probe",
                                -(params.omega_m + delta)),
            tone_with_gamma_opt(params, TWO_PI * 5000.0, "blue_probe",
                                +(params.omega_m + delta)),
        ), delta=delta)
        path = tmp_path / "cfg.json"
        save_config(path, params, baths, cfg)
        rc = main(["spectrum", "--config", str(path), "--mode", "multitone",
                   "--out", str(tmp_path)])
        assert rc == 3
        assert "InstabilityError" in capsys.readouterr().err

    def test_single_mode(self, tmp_path):
        rc = main(["spectrum", "--preset", "si-figure", "--mode", "single",
                   "--sign", "red", "--points", "101", "--out", str(tmp_path)])
        assert rc == 0
        x, v = read_xy_csv(tmp_path / "spectrum.csv")
        assert x.size == 101
        assert v[50] == max(v)  # peak at zero offset

    def test_full_rwa_components(self, tmp_path):
        rc = main(["spectrum", "--preset", "si-figure", "--mode", "full-rwa",
                   "--points", "801", "--out", str(tmp_path)])
        assert rc == 0
        rows = read_component_csv(tmp_path / "spectrum.csv")
        comps = {c for _, _, c in rows}
        assert comps == {"total", "floor", "mixing", "stokes", "anti_stokes"}

    def test_missing_source_is_config_error(self, capsys):
        assert main(["spectrum", "--mode", "multitone"]) == 2


class TestAsymmetryCommand:
    def test_vacuum_balanced_offset_term(self, tmp_path, capsys):
        params, _, config = preset("si-figure")
        path = tmp_path / "cfg.json"
        save_config(path, params, BathSpec(), config)
        rc = main(["asymmetry", "--config", str(path)])
        assert rc == 0
        report = json.loads(capsys.readouterr().out)
        assert report["n_eff"] == pytest.approx(0.0, abs=1e-12)
        gamma_opt, _ = config.gamma_opt_pair(params)
        pref = params.kappa_r / params.kappa
        assert report["delta_I_sym"] == pytest.approx(pref * gamma_opt, rel=1e-9)
        assert report["delta_I_sym"] == report["delta_I_normal"]

    def test_noise_scaling_between_runs(self, tmp_path, capsys):
        # n_eff = 2.5 scales the asymmetry by 2*2.5 + 1 = 6 against vacuum
        params, _, config = preset("si-figure")
        n = 2.5  # uniform ports -> n_eff = n
        path_vac = tmp_path / "vac.json"
        path_hot = tmp_path / "hot.json"
        save_config(path_vac, params, BathSpec(), config)
        save_config(path_hot, params, BathSpec(n_r=n, n_l=n, n_i=n), config)
        main(["asymmetry", "--config", str(path_vac)])
        vac = json.loads(capsys.readouterr().out)
        main(["asymmetry", "--config", str(path_hot)])
        hot = json.loads(capsys.readouterr().out)
        assert hot["delta_I_sym"] / vac["delta_I_sym"] == pytest.approx(6.0, rel=1e-9)

    def test_unbalanced_reports_equal_orderings(self, tmp_path, capsys):
        params, baths, _ = preset("si-figure")
        delta = TWO_PI * 5e3
        cfg = ToneConfig(tones=(
            tone_with_gamma_opt(params, TWO_PI * 100.0, "red_probe",
                                -(params.omega_m + delta)),
            tone_with_gamma_opt(params, TWO_PI * 60.0, "blue_probe",
                                +(params.omega_m + delta)),
        ), delta=delta)
        path = tmp_path / "cfg.json"
        save_config(path, params, baths, cfg)
        rc = main(["asymmetry", "--config", str(path)])
        assert rc == 0
        report = json.loads(capsys.readouterr().out)
        assert report["delta_I_sym"] == report["delta_I_normal"]


class TestNoiseConstraintCommand:
    def test_vacuum_report(self, tmp_path, capsys):
        params, _, config = preset("si-figure")
        # two-port variant for the linear-response module
        params2 = make_params(kappa_i_hz=0.0, omega_m_hz=400e6)
        cfg = ToneConfig(tones=(tone_with_gamma_opt(params2, 0.01 * params2.gamma_m,
                                                    "red_probe"),))
        path = tmp_path / "cfg.json"
        save_config(path, params2, BathSpec(), cfg)
        rc = main(["noise-constraint", "--config", str(path)])
        assert rc == 0
        report = json.loads(capsys.readouterr().out)
        for name, sign in (("red", +1), ("blue", -1)):
            entry = report[name]
            assert entry["S_zF"]["im"] == pytest.approx(-sign * 0.5, rel=1e-4)
            assert entry["rhs"] < 1e-3
            assert entry["gap"] >= -1e-10
            assert entry["satisfied"]

    def test_internal_loss_gate(self, tmp_path, capsys):
        params, baths, config = preset("si-figure")  # kappa_i > 0
        path = tmp_path / "cfg.json"
        save_config(path, params, baths, config)
        rc = main(["noise-constraint", "--config", str(path)])
        assert rc == 3
        assert "ValidityError" in capsys.readouterr().err


class TestCalibrateCommand:
    def test_synthetic_run(self, tmp_path, capsys):
        rc = main(["calibrate", "--preset", "main-text", "--synthetic",
                   "--seed", "3", "--out", str(tmp_path)])
        assert rc == 0
        report = json.loads((tmp_path / "calibration_report.json").read_text())
        assert report["mode"] == "synthetic"
        assert report["g0_rel_err"] < 0.01
        assert (tmp_path / "manifest.json").exists()

    def test_data_directory_ingestion(self, tmp_path):
        params, baths, config = preset("main-text")
        data = tmp_path / "data"
        data.mkdir()
        n_p = np.logspace(3, 7, 9)
        gamma_hz = (params.gamma_m + 4 * params.g0**2 * n_p / params.kappa) / TWO_PI
        lines = ["# power,gamma_tot_hz"] + [f"{float(p)!r},{float(g)!r}" for p, g in zip(n_p, gamma_hz)]
        (data / "linewidth_vs_power.csv").write_text("\n".join(lines) + "\n")
        cfgpath = tmp_path / "cfg.json"
        save_config(cfgpath, params, baths, config)
        out = tmp_path / "out"
        rc = main(["calibrate", "--config", str(cfgpath), "--data", str(data),
                   "--out", str(out)])
        assert rc == 0
        report = json.loads((out / "calibration_report.json").read_text())
        assert report["g0_fit"] == pytest.approx(params.g0, rel=1e-6)
        assert "linewidth_vs_power.csv" in report["inputs"]

    def test_requires_mode(self, tmp_path):
        assert main(["calibrate", "--preset", "main-text",
                     "--out", str(tmp_path)]) == 2


class TestOracleCompareCommand:
    def test_writes_report_and_spectra(self, tmp_path, capsys):
        # tiny run on a scaled config: checks plumbing, not statistics
        params, baths, _ = preset("oracle-demo")
        tone = tone_with_gamma_opt(params, 0.2 * params.gamma_m, "red_probe")
        cfg = ToneConfig(tones=(tone,))
        path = tmp_path / "cfg.json"
        save_config(path, params, BathSpec(n_m=30.0), cfg)
        out = tmp_path / "out"
        rc = main(["oracle-compare", "--config", str(path), "--seed", "1",
                   "--trajectories", "8", "--segments", "60", "--out", str(out)])
        assert rc == 0
        report = json.loads((out / "report.json").read_text())
        assert report["rng"].startswith("numpy-philox")
        assert (out / "mc_spectrum.csv").exists()
        assert (out / "analytic_spectrum.csv").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert set(manifest["outputs"]) == {"report.json", "mc_spectrum.csv",
                                            "analytic_spectrum.csv"}

    def test_determinism_across_runs(self, tmp_path):
        params, baths, _ = preset("oracle-demo")
        tone = tone_with_gamma_opt(params, 0.2 * params.gamma_m, "red_probe")
        cfg = ToneConfig(tones=(tone,))
        path = tmp_path / "cfg.json"
        save_config(path, params, BathSpec(n_m=5.0), cfg)
        reports = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            main(["oracle-compare", "--config", str(path), "--seed", "9",
                  "--trajectories", "4", "--segments", "40", "--out", str(out)])
            reports.append((out / "report.json").read_text())
        assert reports[0] == reports[1]
