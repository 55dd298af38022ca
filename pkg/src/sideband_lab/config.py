"""JSON parameter files: {"system": {...}, "baths": {...}, "tones": [...]}.

All frequencies in config files are plain Hz; the 2*pi conversion to the
angular rates used internally happens here and only here. Serialization
round-trips exactly (floats survive JSON via shortest-repr).
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .errors import ConfigError
from .model import TWO_PI, BathSpec, SystemParams, ToneConfig, ToneSpec

__all__ = [
    "params_to_dict", "params_from_dict",
    "baths_to_dict", "baths_from_dict",
    "tones_to_list", "tones_from_list",
    "config_to_dict", "config_from_dict",
    "load_config", "save_config",
    "canonical_json", "config_hash", "describe_run",
]

_SYSTEM_KEYS = ("omega_c_hz", "omega_m_hz", "g0_hz", "kappa_left_hz",
                "kappa_right_hz", "kappa_internal_hz", "gamma_m_hz")


def params_to_dict(params: SystemParams) -> dict:
    d = {
        "omega_c_hz": params.omega_c / TWO_PI,
        "omega_m_hz": params.omega_m / TWO_PI,
        "g0_hz": params.g0 / TWO_PI,
        "kappa_left_hz": params.kappa_l / TWO_PI,
        "kappa_right_hz": params.kappa_r / TWO_PI,
        "kappa_internal_hz": params.kappa_i / TWO_PI,
        "gamma_m_hz": params.gamma_m / TWO_PI,
    }
    if params.x_zp is not None:
        d["x_zp_m"] = params.x_zp
    return d


def params_from_dict(d: dict) -> SystemParams:
    missing = [k for k in _SYSTEM_KEYS if k not in d and k != "kappa_internal_hz"]
    if missing:
        raise ConfigError(f"system block missing keys: {missing}")
    return SystemParams.from_hz(
        omega_c_hz=d["omega_c_hz"],
        omega_m_hz=d["omega_m_hz"],
        g0_hz=d["g0_hz"],
        kappa_l_hz=d["kappa_left_hz"],
        kappa_r_hz=d["kappa_right_hz"],
        kappa_i_hz=d.get("kappa_internal_hz", 0.0),
        gamma_m_hz=d["gamma_m_hz"],
        x_zp_m=d.get("x_zp_m"),
    )


def baths_to_dict(baths: BathSpec) -> dict:
    return {
        "n_right": baths.n_r, "n_left": baths.n_l, "n_internal": baths.n_i,
        "n_mech": baths.n_m, "alpha_right": baths.alpha_r, "alpha_left": baths.alpha_l,
        "alpha_internal": baths.alpha_i, "beta": baths.beta,
    }


def baths_from_dict(d: dict) -> BathSpec:
    return BathSpec(
        n_r=d.get("n_right", 0.0), n_l=d.get("n_left", 0.0),
        n_i=d.get("n_internal", 0.0), n_m=d.get("n_mech", 0.0),
        alpha_r=d.get("alpha_right", 1.0), alpha_l=d.get("alpha_left", 1.0),
        alpha_i=d.get("alpha_internal", 1.0), beta=d.get("beta", 1.0),
    )


def tones_to_list(config: ToneConfig) -> list[dict]:
    out = []
    for tone in config.tones:
        entry: dict = {"role": tone.role, "detuning_hz": tone.detuning / TWO_PI}
        if tone.n_photons is not None:
            entry["n_photons"] = tone.n_photons
        else:
            entry["coupling_hz"] = tone.coupling / TWO_PI
        out.append(entry)
    return out


def tones_from_list(entries: list[dict], params: SystemParams) -> ToneConfig:
    """Build a ToneConfig; probe/cooling detunings delta, delta_c are derived
    from the tone placements omega_c -+ (omega_m + delta)."""
    tones = []
    for entry in entries:
        kwargs: dict = {"role": entry.get("role", "generic"),
                        "detuning": TWO_PI * entry["detuning_hz"]}
        if "n_photons" in entry and "coupling_hz" in entry:
            raise ConfigError("tone may carry n_photons or coupling_hz, not both")
        if "n_photons" in entry:
            kwargs["n_photons"] = entry["n_photons"]
        elif "coupling_hz" in entry:
            kwargs["coupling"] = TWO_PI * entry["coupling_hz"]
        else:
            raise ConfigError("tone needs n_photons or coupling_hz")
        tones.append(ToneSpec(**kwargs))

    deltas = {}
    for tone in tones:
        if tone.role == "red_probe":
            deltas["red"] = -tone.detuning - params.omega_m
        elif tone.role == "blue_probe":
            deltas["blue"] = tone.detuning - params.omega_m
        elif tone.role == "cooling":
            deltas["cool"] = -tone.detuning - params.omega_m
    delta = 0.0
    if "red" in deltas and "blue" in deltas:
        scale = max(abs(deltas["red"]), abs(deltas["blue"]), 1e-9)
        if abs(deltas["red"] - deltas["blue"]) > 1e-9 * scale:
            raise ConfigError(
                "probe tones are not symmetric about the sidebands: "
                f"delta_red = {deltas['red']:.6g}, delta_blue = {deltas['blue']:.6g}"
            )
        delta = deltas["red"]
    elif "red" in deltas:
        delta = deltas["red"]
    elif "blue" in deltas:
        delta = deltas["blue"]
    return ToneConfig(tones=tuple(tones), delta=delta, delta_c=deltas.get("cool"))


def config_to_dict(params: SystemParams, baths: BathSpec, config: ToneConfig) -> dict:
    return {
        "system": params_to_dict(params),
        "baths": baths_to_dict(baths),
        "tones": tones_to_list(config),
    }


def config_from_dict(d: dict) -> tuple[SystemParams, BathSpec, ToneConfig]:
    for key in ("system", "baths", "tones"):
        if key not in d:
            raise ConfigError(f"config missing top-level key {key!r}")
    params = params_from_dict(d["system"])
    baths = baths_from_dict(d["baths"])
    config = tones_from_list(d["tones"], params)
    return params, baths, config


def load_config(path) -> tuple[SystemParams, BathSpec, ToneConfig]:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return config_from_dict(data)


def save_config(path, params: SystemParams, baths: BathSpec, config: ToneConfig) -> None:
    Path(path).write_text(json.dumps(config_to_dict(params, baths, config), indent=2) + "\n")


def canonical_json(obj) -> str:
    """Deterministic JSON used for hashing (sorted keys, tight separators)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def describe_run(params: SystemParams, baths: BathSpec, config: ToneConfig,
                 sim=None, extra: dict | None = None) -> dict:
    """Fully resolved run description plus its hash."""
    resolved = config_to_dict(params, baths, config)
    if sim is not None:
        resolved["sim"] = {
            "dt": sim.dt, "n_steps": sim.n_steps, "n_trajectories": sim.n_trajectories,
            "seed": sim.seed, "burn_in": sim.burn_in, "psd_segments": sim.psd_segments,
        }
    if extra:
        resolved["extra"] = extra
    return {"config_hash": config_hash(resolved), "resolved": resolved}
