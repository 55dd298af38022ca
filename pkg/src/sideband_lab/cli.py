"""Command-line front end.

Subcommands: spectrum, asymmetry, oracle-compare, calibrate,
noise-constraint. All file outputs come with a manifest.json whose hash
covers the fully resolved configuration, so reruns are verifiable.

Exit codes: 0 success, 2 configuration errors, 3 validity/stability gate
errors (the gate's exception name is printed verbatim on stderr).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .calibration import (
    fit_linewidth_vs_power,
    fit_output_occupation,
    fit_shunt_capacitance,
    run_synthetic_calibration,
    transmission_delta,
)
from .config import config_hash, describe_run, load_config
from .dataio import (
    RunManifest,
    file_sha256,
    read_xy_csv,
    write_components_csv,
    write_manifest,
    write_spectrum_csv,
)
from .errors import (
    ConfigError,
    InstabilityError,
    SidebandLabError,
    StepSizeError,
    UnbalancedError,
    ValidityError,
)
from .langevin import SimConfig, oracle_compare
from .linear_response import heisenberg_gap, resonance_correlators
from .model import TWO_PI, Spectrum, validate_stability
from .multitone import (
    averaged_occupation,
    full_rwa_spectrum,
    multitone_integrated_asymmetry,
    multitone_spectra,
    sideband_ratio_model,
    sideband_weights,
)
from .presets import PRESET_NAMES, preset
from .scattering import single_tone_spectrum

_GATE_ERRORS = (ValidityError, InstabilityError, UnbalancedError, StepSizeError)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(dataclasses.asdict(obj))
    return obj


def _load(args) -> tuple:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        return load_config(args.config)
    if args.preset:
        return preset(args.preset)
    raise ConfigError("one of --config or --preset is required")


def _add_source_args(parser):
    parser.add_argument("--config", help="JSON parameter file")
    parser.add_argument("--preset", choices=PRESET_NAMES, help="named parameter set")


def _probe_tone(config, sign_name: str):
    role = "red_probe" if sign_name == "red" else "blue_probe"
    tone = config.tone(role)
    if tone is None:
        raise ConfigError(f"config has no {role} tone")
    return tone, (+1 if sign_name == "red" else -1)


def cmd_spectrum(args) -> int:
    params, baths, config = _load(args)
    kind = {"sym": "symmetrized", "normal": "normal_ordered"}[args.kind]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    outputs = []

    if args.mode == "single":
        tone, sign = _probe_tone(config, args.sign)
        validate_stability(params, tone)
        gamma_tot = params.gamma_m + sign * tone.gamma_opt(params)
        grid = np.linspace(-args.span_linewidths, args.span_linewidths, args.points) * gamma_tot
        spec = single_tone_spectrum(params, baths, tone, sign, kind, grid)
        path = out / "spectrum.csv"
        write_spectrum_csv(path, spec)
        outputs.append(path.name)
    elif args.mode == "multitone":
        validate_stability(params, config)
        gamma_tot = config.gamma_tot(params)
        grid = np.linspace(-args.span_linewidths, args.span_linewidths, args.points) * gamma_tot
        spectra = multitone_spectra(params, baths, config, kind, grid)
        path = out / "spectrum.csv"
        write_components_csv(path, {"anti_stokes": spectra.anti_stokes,
                                    "stokes": spectra.stokes})
        outputs.append(path.name)
    else:  # full-rwa
        validate_stability(params, config)
        grid = np.linspace(-4.0 * config.delta, 4.0 * config.delta, args.points)
        comps = full_rwa_spectrum(params, baths, config, grid, components=True)
        path = out / "spectrum.csv"
        write_components_csv(path, {k: comps[k] for k in
                                    ("total", "floor", "mixing", "stokes", "anti_stokes")})
        outputs.append(path.name)

    desc = describe_run(params, baths, config, extra={"command": "spectrum",
                                                      "kind": kind, "mode": args.mode})
    write_manifest(out, RunManifest(command="spectrum", config_hash=desc["config_hash"],
                                    outputs=outputs, tool_version=__version__))
    print(str(out / "spectrum.csv"))
    return 0


def cmd_asymmetry(args) -> int:
    params, baths, config = _load(args)
    validate_stability(params, config)
    if not config.has_probe_pair:
        raise ConfigError("asymmetry needs a red_probe + blue_probe pair")
    n_eff = baths.n_eff(params)
    n_bar = averaged_occupation(params, baths, config)
    delta_i = multitone_integrated_asymmetry(params, baths, config)
    report = {
        "delta_I_sym": delta_i,
        "delta_I_normal": delta_i,
        "n_eff": n_eff,
        "n_bar_m": n_bar,
        "ratio_model": sideband_ratio_model(n_bar - n_eff, n_eff),
        "weights": dict(zip(("anti_stokes", "stokes"),
                            sideband_weights(params, baths, config, "symmetrized"))),
        "config_hash": describe_run(params, baths, config)["config_hash"],
    }
    print(json.dumps(_jsonable(report), indent=2, sort_keys=True))
    return 0


def cmd_oracle_compare(args) -> int:
    params, baths, config = _load(args)
    sim = SimConfig.auto(params, config, n_segments=args.segments, seed=args.seed,
                         n_trajectories=args.trajectories)
    report, mc_spec = oracle_compare(params, baths, config, sim)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_spectrum_csv(out / "mc_spectrum.csv", mc_spec)

    gamma_tot = config.gamma_tot(params)
    grid = np.linspace(-8.0 * gamma_tot, 8.0 * gamma_tot, 1001)
    if config.has_probe_pair:
        spectra = multitone_spectra(params, baths, config, "symmetrized", grid,
                                    enforce_separation=False)
        write_components_csv(out / "analytic_spectrum.csv",
                             {"anti_stokes": spectra.anti_stokes, "stokes": spectra.stokes})
    else:
        tone = config.tone("red_probe") or config.tone("blue_probe")
        sign = +1 if tone.role == "red_probe" else -1
        spec = single_tone_spectrum(params, baths, tone, sign, "symmetrized", grid)
        write_spectrum_csv(out / "analytic_spectrum.csv", spec)

    (out / "report.json").write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    write_manifest(out, RunManifest(command="oracle-compare", config_hash=report["config_hash"],
                                    outputs=["report.json", "mc_spectrum.csv", "analytic_spectrum.csv"],
                                    seed=args.seed, tool_version=__version__))
    print(json.dumps(_jsonable(report), indent=2, sort_keys=True))
    return 0


def cmd_calibrate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.synthetic:
        params, baths, config = _load(args)
        report = run_synthetic_calibration(params, baths, config, seed=args.seed,
                                           noise_level=args.noise)
        report["mode"] = "synthetic"
        report["config_hash"] = describe_run(params, baths, config,
                                             extra={"seed": args.seed})["config_hash"]
    else:
        if not args.data:
            raise ConfigError("either --synthetic or --data DIR is required")
        params, baths, config = _load(args)
        report = _calibrate_from_files(Path(args.data), params, args)
    path = out / "calibration_report.json"
    path.write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    write_manifest(out, RunManifest(command="calibrate", config_hash=report["config_hash"],
                                    outputs=[path.name], seed=args.seed,
                                    tool_version=__version__))
    print(str(path))
    return 0


def _calibrate_from_files(data_dir: Path, params, args) -> dict:
    """Ingest whichever calibration CSVs are present in ``data_dir``.

    Recognized files: linewidth_vs_power.csv (# power,gamma_tot_hz),
    s21_db.csv (# freq_hz,mag_db), output_floor.csv (# freq_hz,value).
    """
    report: dict = {"mode": "data", "inputs": {}}
    found = False
    lw = data_dir / "linewidth_vs_power.csv"
    if lw.exists():
        found = True
        p, g_hz = read_xy_csv(lw)
        gamma_m, slope = fit_linewidth_vs_power(np.column_stack([p, TWO_PI * g_hz]))
        report["gamma_m_fit"] = gamma_m
        report["linewidth_slope"] = slope
        report["g0_fit"] = float(np.sqrt(max(slope, 0.0) * params.kappa / 4.0))
        report["inputs"][lw.name] = file_sha256(lw)
    s21 = data_dir / "s21_db.csv"
    if s21.exists():
        found = True
        f_hz, mag_db = read_xy_csv(s21)
        shunt = fit_shunt_capacitance(TWO_PI * f_hz, 10.0 ** (mag_db / 20.0), params)
        report["c_out_fit"] = shunt.c_out
        report["delta_minus"] = float(transmission_delta(
            params, shunt, params.omega_c + params.omega_m))
        report["inputs"][s21.name] = file_sha256(s21)
    floor = data_dir / "output_floor.csv"
    if floor.exists():
        found = True
        f_hz, val = read_xy_csv(floor)
        order = np.argsort(f_hz)
        spec = Spectrum(TWO_PI * f_hz[order] - params.omega_c, val[order])
        occ = fit_output_occupation(spec, params, args.lambda_conv)
        report["n_r_fit"] = occ.n_r
        report["amplifier_floor_fit"] = occ.amplifier_floor
        report["inputs"][floor.name] = file_sha256(floor)
    if not found:
        raise ConfigError(
            f"no recognized calibration files in {data_dir} "
            "(expected linewidth_vs_power.csv, s21_db.csv or output_floor.csv)"
        )
    report["config_hash"] = config_hash(report["inputs"])
    return report


def cmd_noise_constraint(args) -> int:
    params, baths, config = _load(args)
    tone = config.tone("red_probe") or config.tone("blue_probe")
    if tone is None:
        raise ConfigError("noise-constraint needs a probe tone")
    report = {}
    for name, sign in (("red", +1), ("blue", -1)):
        noise = resonance_correlators(params, baths, tone, sign)
        gap = heisenberg_gap(noise.s_zz, noise.s_ff, noise.s_zf)
        report[name] = {
            "S_zF": {"re": noise.s_zf.real, "im": noise.s_zf.imag},
            "lhs": gap.lhs,
            "rhs": gap.rhs,
            "gap": gap.gap,
            "satisfied": gap.satisfied,
        }
    report["config_hash"] = describe_run(params, baths, config)["config_hash"]
    print(json.dumps(_jsonable(report), indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sideband-lab",
        description="Output noise spectra and calibrations of driven cavity "
                    "electro/opto-mechanical systems",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="write spectrum CSV")
    _add_source_args(p)
    p.add_argument("--kind", choices=("sym", "normal"), default="sym")
    p.add_argument("--mode", choices=("single", "multitone", "full-rwa"), default="multitone")
    p.add_argument("--sign", choices=("red", "blue"), default="red",
                   help="pump detuning for --mode single")
    p.add_argument("--points", type=int, default=4001)
    p.add_argument("--span-linewidths", type=float, default=25.0,
                   help="half-span of the grid in units of gamma_tot (single/multitone)")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("asymmetry", help="integrated sideband asymmetry report")
    _add_source_args(p)
    p.set_defaults(func=cmd_asymmetry)

    p = sub.add_parser("oracle-compare", help="stochastic oracle vs analytic spectra")
    _add_source_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trajectories", type=int, default=64)
    p.add_argument("--segments", type=int, default=2000)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_oracle_compare)

    p = sub.add_parser("calibrate", help="run the calibration pipeline")
    _add_source_args(p)
    p.add_argument("--synthetic", action="store_true")
    p.add_argument("--data", help="directory with measurement CSVs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--lambda-conv", type=float, default=0.27, dest="lambda_conv")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("noise-constraint", help="detector noise inequality report")
    _add_source_args(p)
    p.set_defaults(func=cmd_noise_constraint)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except _GATE_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except SidebandLabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
