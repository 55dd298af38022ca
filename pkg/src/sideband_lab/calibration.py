"""Device calibration models and the synthetic end-to-end pipeline.

Covers the measurement chain around the spectra: sideband-linewidth versus
pump power, temperature-sweep thermometry, the noise-floor increase budget,
the output-port occupation fit, and the shunt-capacitor transmission model
that explains the asymmetric |S21|. Every fit goes through the deterministic
Gauss-Newton engine in `fitting`.

Power-like quantities are taken in watts (or any consistent power-density
unit matched to the conversion factor lambda); occupations are quanta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import hbar

from .errors import ConfigError, DegenerateData, RankDeficient, UnbalancedError
from .fitting import LorentzianFit, fit_lorentzian, gauss_newton
from .model import (
    TWO_PI,
    BathSpec,
    Spectrum,
    SystemParams,
    ToneConfig,
    bose_occupation,
)
from .multitone import multitone_spectra, sideband_weights

__all__ = [
    "LorentzianFit",
    "fit_lorentzian",
    "ShuntModel",
    "CalibrationRun",
    "OccupationFit",
    "fit_linewidth_vs_power",
    "thermometry_ratio",
    "thermometry_occupation",
    "noise_floor_increase",
    "sideband_difference_and_average",
    "fit_output_occupation",
    "s21_shunt",
    "s21_bare",
    "transmission_delta",
    "delta_from_power_ratio",
    "fit_shunt_capacitance",
    "run_synthetic_calibration",
]


@dataclass(frozen=True)
class ShuntModel:
    """Output transmission-line discontinuity as a shunt capacitor."""

    c_out: float  # farads
    r_l: float = 50.0  # ohms

    def __post_init__(self):
        if self.c_out < 0.0:
            raise ConfigError(f"c_out must be >= 0, got {self.c_out!r}")
        if self.r_l <= 0.0:
            raise ConfigError(f"r_l must be > 0, got {self.r_l!r}")


@dataclass(frozen=True)
class CalibrationRun:
    """Record of a temperature-sweep thermometry calibration."""

    temperatures: np.ndarray  # K
    sideband_powers_plus: np.ndarray  # W
    sideband_powers_minus: np.ndarray  # W
    through_powers_plus: np.ndarray  # W
    through_powers_minus: np.ndarray  # W
    conversion_slope_plus: float
    conversion_slope_minus: float
    g0: float

    def __post_init__(self):
        for name in ("temperatures", "sideband_powers_plus", "sideband_powers_minus",
                     "through_powers_plus", "through_powers_minus"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if np.any(arr <= 0.0):
                raise ConfigError(f"{name} must be strictly positive")
            object.__setattr__(self, name, arr)


def fit_linewidth_vs_power(points) -> tuple[float, float]:
    """Weighted linear fit of total linewidth versus detected pump power.

    ``points`` is a sequence of (power, gamma_tot) pairs. Returns
    (gamma_m, slope): the intercept is the intrinsic linewidth and the slope
    is 4 g0^2 / kappa per power unit. Weights assume relative measurement
    error (sigma_i proportional to gamma_i), which keeps the intercept pinned
    by the low-power points of a decades-wide sweep.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise RankDeficient("need at least two (power, linewidth) points")
    p, g = pts[:, 0], pts[:, 1]
    if np.ptp(p) <= 0.0:
        raise RankDeficient("all power values identical")
    w = 1.0 / np.maximum(np.abs(g), 1e-300)
    design = np.column_stack([w, w * p])
    coef, *_ = np.linalg.lstsq(design, w * g, rcond=None)
    return float(coef[0]), float(coef[1])


def _thermometry_coefficient(params: SystemParams, gains, delta_corr: float,
                             side: int, delta: float) -> float:
    if side not in (+1, -1):
        raise ConfigError("side must be +1 or -1")
    gain_cavity, gain_pump = gains
    if gain_cavity <= 0.0 or gain_pump <= 0.0:
        raise ConfigError("gains must be positive")
    omega_pump = params.omega_c - side * (params.omega_m + delta)
    return (params.omega_c / omega_pump) * (gain_cavity / gain_pump) \
        / (1.0 + delta_corr) * (2.0 * params.g0 / params.kappa) ** 2


def thermometry_ratio(params: SystemParams, gains, delta_corr: float, side: int,
                      n_m: float, *, delta: float = 0.0) -> float:
    """Sideband-to-through power ratio P_m/P_thru for one pump.

    (omega_c/omega_pump) (G(omega_c)/G(omega_pump)) / (1 + Delta(omega_pump))
    * (2 g0/kappa)^2 * n_m; ``side`` = +1 for the pump below the cavity
    (up-converted sideband), -1 for the pump above.
    """
    return _thermometry_coefficient(params, gains, delta_corr, side, delta) * n_m


def thermometry_occupation(params: SystemParams, gains, delta_corr: float, side: int,
                           ratio: float, *, delta: float = 0.0) -> float:
    """Inverse of `thermometry_ratio`: mechanical occupation from a measured ratio."""
    return ratio / _thermometry_coefficient(params, gains, delta_corr, side, delta)


def noise_floor_increase(params: SystemParams, baths: BathSpec, lambda_conv: float) -> float:
    """Noise-floor increase (power-density units) implied by the cavity baths.

    Delta_eta = (1/2 lambda) [n_eff - ((2 kappa_r - kappa)/(2 kappa_r)) n_r].
    """
    if not lambda_conv > 0.0:
        raise ConfigError("lambda_conv must be positive")
    corr = (2.0 * params.kappa_r - params.kappa) / (2.0 * params.kappa_r)
    return (baths.n_eff(params) - corr * baths.n_r) / (2.0 * lambda_conv)


def sideband_difference_and_average(params: SystemParams, baths: BathSpec,
                                    config: ToneConfig, lambda_conv: float,
                                    delta_eta: float) -> tuple[float, float]:
    """Sideband imbalance and average versus the measured floor increase.

    diff (Stokes minus anti-Stokes occupancy) = 4 lambda Delta_eta
    + ((2 kappa_r - kappa)/kappa_r) n_r + 1; the average adds the
    backaction-heating and cooling-dilution terms. Requires balanced probes.
    """
    if not config.is_balanced(params):
        gp, gm = config.gamma_opt_pair(params)
        raise UnbalancedError(
            f"balanced probes required: gamma_opt+ = {gp:.6g}, gamma_opt- = {gm:.6g}"
        )
    gamma_opt, _ = config.gamma_opt_pair(params)
    gamma_cool = config.cooling_gamma_opt(params)
    gamma_big_m = config.gamma_big_m(params)
    kr, k = params.kappa_r, params.kappa
    diff = 4.0 * lambda_conv * delta_eta + ((2.0 * kr - k) / kr) * baths.n_r + 1.0
    avg = ((2.0 * gamma_opt + gamma_cool) / gamma_big_m) * (
        lambda_conv * delta_eta + ((4.0 * kr - k) / (4.0 * kr)) * baths.n_r
    ) + (params.gamma_m / gamma_big_m) * baths.n_m + gamma_opt / gamma_big_m + 0.5
    return diff, avg


@dataclass(frozen=True)
class OccupationFit:
    """Result of the pump-off output-floor fit."""

    n_r: float
    amplifier_floor: float
    residual_norm: float
    n_r_err: float = float("nan")


def output_floor_model(params: SystemParams, lambda_conv: float, offsets, n_r: float,
                       amplifier_floor: float, alpha_r: float = 1.0) -> np.ndarray:
    """Pump-off detected floor across the cavity line (power-density units).

    (1/lambda) [kappa^2/(kappa^2 + 4 (omega - omega_c)^2) (kappa_r/kappa - 1)
    n_r + (kappa/4 kappa_r)(alpha_r + 2 n_r)] + amplifier floor. A dip when
    kappa_r < kappa.
    """
    x = np.asarray(offsets, dtype=float)
    k, kr = params.kappa, params.kappa_r
    lor = k**2 / (k**2 + 4.0 * x**2)
    return (lor * (kr / k - 1.0) * n_r + (k / (4.0 * kr)) * (alpha_r + 2.0 * n_r)) \
        / lambda_conv + amplifier_floor


def fit_output_occupation(spec: Spectrum, params: SystemParams,
                          lambda_conv: float) -> OccupationFit:
    """Fit (n_r, amplifier floor) to a pump-off floor spectrum.

    The spectrum should span at least ~3 kappa around the cavity so the dip
    depth separates from the flat amplifier contribution.
    """
    x = spec.freq_offsets
    v = spec.values
    if x[-1] - x[0] < 3.0 * params.kappa:
        raise ConfigError("spectrum must span at least 3*kappa")
    k, kr = params.kappa, params.kappa_r
    lor = k**2 / (k**2 + 4.0 * x**2)
    basis_n = (lor * (kr / k - 1.0) + k / (2.0 * kr)) / lambda_conv
    const = (k / (4.0 * kr)) / lambda_conv

    def residual_jac(p):
        n_r, floor = p
        model = basis_n * n_r + const + floor
        jac = np.column_stack([basis_n, np.ones_like(x)])
        return model - v, jac

    p, cov, rnorm, _ = gauss_newton(residual_jac, np.array([0.1, float(np.median(v))]))
    return OccupationFit(n_r=float(p[0]), amplifier_floor=float(p[1]),
                         residual_norm=rnorm, n_r_err=float(np.sqrt(abs(cov[0, 0]))))


def s21_bare(params: SystemParams, omega) -> np.ndarray:
    """Ideal Lorentzian transmission -sqrt(kappa_r kappa_l)/(j(omega - omega_c) + kappa/2)."""
    w = np.asarray(omega, dtype=float)
    return -math.sqrt(params.kappa_r * params.kappa_l) / (
        1j * (w - params.omega_c) + params.kappa / 2.0
    )


def s21_shunt(params: SystemParams, shunt: ShuntModel, omega):
    """Transmission with the output shunt capacitor: S21 + 2 R_L j omega_c C_out.

    The constant imaginary leakage interferes with the cavity line, producing
    the anti-resonance and the red/blue transmission asymmetry.
    """
    return s21_bare(params, omega) + 2.0 * shunt.r_l * 1j * params.omega_c * shunt.c_out


def transmission_delta(params: SystemParams, shunt: ShuntModel, omega) -> np.ndarray:
    """First-order power correction Delta(omega) of |S21|^2 from the shunt.

    4 R_L omega_c C_out (kappa/sqrt(kappa_l kappa_r)) ((omega - omega_c)/kappa);
    odd around the cavity, so Delta(omega_-)/Delta(omega_+) = -1.
    """
    w = np.asarray(omega, dtype=float)
    return 4.0 * shunt.r_l * params.omega_c * shunt.c_out \
        * (w - params.omega_c) / math.sqrt(params.kappa_l * params.kappa_r)


def delta_from_power_ratio(ratio_db: float) -> float:
    """Delta(omega_-) from a measured (1+Delta-)/(1+Delta+) power ratio in dB,
    using Delta(omega_-) = -Delta(omega_+)."""
    ratio = 10.0 ** (ratio_db / 10.0)
    return (ratio - 1.0) / (ratio + 1.0)


def fit_shunt_capacitance(omega: np.ndarray, s21_mag: np.ndarray,
                          params: SystemParams, r_l: float = 50.0) -> ShuntModel:
    """Estimate C_out from an |S21| magnitude trace (linear units)."""
    w = np.asarray(omega, dtype=float)
    mag = np.asarray(s21_mag, dtype=float)
    if w.size < 5:
        raise DegenerateData("need at least 5 transmission points")
    base = s21_bare(params, w)

    def residual_jac(p):
        c_out = p[0]
        shunted = base + 2.0 * r_l * 1j * params.omega_c * c_out
        model = np.abs(shunted)
        # d|z|/dC = Im(z) * 2 R_L omega_c / |z|
        jac = (np.imag(shunted) * 2.0 * r_l * params.omega_c / np.maximum(model, 1e-300))
        return model - mag, jac[:, None]

    p, _, _, _ = gauss_newton(residual_jac, np.array([1e-15]))
    return ShuntModel(c_out=float(abs(p[0])), r_l=r_l)


def _linear_slope_through_origin(x: np.ndarray, y: np.ndarray) -> float:
    return float(x @ y / (x @ x))


def run_synthetic_calibration(params: SystemParams, baths: BathSpec,
                              config: ToneConfig, *, lambda_conv: float = 0.27,
                              shunt: ShuntModel | None = None, seed: int = 0,
                              noise_level: float = 0.0,
                              gains=(1.0, 1.0)) -> dict:
    """Generate synthetic measurements from the forward models and invert them.

    Chain: linewidth-vs-power fit (gamma_m, g0), |S21| shunt fit (C_out and
    the Delta corrections), temperature-sweep thermometry (conversion
    slopes), pump-off floor fit (n_r), and a sideband-imbalance closure from
    Lorentzian fits of the twin-peak spectra (n_eff). Gaussian noise of
    relative size ``noise_level`` is added to every synthetic measurement.
    """
    rng = np.random.default_rng(seed)
    shunt = shunt or ShuntModel(c_out=2.7e-15)

    def noisy(arr):
        arr = np.asarray(arr, dtype=float)
        if noise_level == 0.0:
            return arr
        return arr * (1.0 + noise_level * rng.standard_normal(arr.shape))

    report: dict = {"seed": seed, "noise_level": noise_level}

    # 1) sideband linewidth vs pump photon number
    n_p = np.logspace(3, 7, 9)
    gamma_true = params.gamma_m + 4.0 * params.g0**2 * n_p / params.kappa
    gamma_m_fit, slope = fit_linewidth_vs_power(np.column_stack([n_p, noisy(gamma_true)]))
    g0_fit = math.sqrt(max(slope, 0.0) * params.kappa / 4.0)
    report["gamma_m_fit"] = gamma_m_fit
    report["g0_fit"] = g0_fit
    report["g0_true"] = params.g0
    report["g0_rel_err"] = abs(g0_fit - params.g0) / params.g0

    # 2) |S21| trace and shunt capacitance
    span = 10.0 * (params.omega_m + config.delta)
    w_grid = params.omega_c + np.linspace(-span, span, 801)
    mag_true = np.abs(s21_shunt(params, shunt, w_grid))
    shunt_fit = fit_shunt_capacitance(w_grid, noisy(mag_true), params, shunt.r_l)
    omega_minus = params.omega_c + (params.omega_m + config.delta)
    omega_plus = params.omega_c - (params.omega_m + config.delta)
    delta_minus = float(transmission_delta(params, shunt_fit, omega_minus))
    delta_plus = float(transmission_delta(params, shunt_fit, omega_plus))
    report["c_out_fit"] = shunt_fit.c_out
    report["c_out_true"] = shunt.c_out
    report["delta_minus"] = delta_minus
    report["delta_plus"] = delta_plus

    # 3) thermometry temperature sweep at low power
    temps = np.linspace(0.02, 0.2, 8)
    n_ms = np.array([bose_occupation(t, params.omega_m) for t in temps])
    ratios_p = noisy([thermometry_ratio(params, gains, delta_plus, +1, nm) for nm in n_ms])
    ratios_m = noisy([thermometry_ratio(params, gains, delta_minus, -1, nm) for nm in n_ms])
    slope_p = _linear_slope_through_origin(n_ms, ratios_p)
    slope_m = _linear_slope_through_origin(n_ms, ratios_m)
    report["conversion_slope_plus"] = slope_p
    report["conversion_slope_minus"] = slope_m
    report["conversion_ratio"] = slope_m / slope_p

    gamma_opt, _ = config.gamma_opt_pair(params)
    n_p_cal = 500.0
    run = CalibrationRun(
        temperatures=temps,
        sideband_powers_plus=ratios_p * gains[1] * hbar * omega_plus
        * (1.0 + delta_plus) * params.kappa_r * n_p_cal,
        sideband_powers_minus=ratios_m * gains[1] * hbar * omega_minus
        * (1.0 + delta_minus) * params.kappa_r * n_p_cal,
        through_powers_plus=np.full_like(temps, gains[1] * hbar * omega_plus
                                         * (1.0 + delta_plus) * params.kappa_r * n_p_cal),
        through_powers_minus=np.full_like(temps, gains[1] * hbar * omega_minus
                                          * (1.0 + delta_minus) * params.kappa_r * n_p_cal),
        conversion_slope_plus=slope_p,
        conversion_slope_minus=slope_m,
        g0=g0_fit,
    )
    report["calibration_run"] = run

    # 4) pump-off floor across the cavity line
    grid = np.linspace(-2.0 * params.kappa, 2.0 * params.kappa, 401)
    floor_true = output_floor_model(params, lambda_conv, grid, baths.n_r, 12.0)
    occ = fit_output_occupation(Spectrum(grid, noisy(floor_true)), params, lambda_conv)
    report["n_r_fit"] = occ.n_r
    report["n_r_err"] = occ.n_r_err
    report["n_r_true"] = baths.n_r
    report["amplifier_floor_fit"] = occ.amplifier_floor

    # 5) sideband-imbalance closure from Lorentzian fits of the twin peaks
    gamma_tot = config.gamma_tot(params)
    peak_grid = np.linspace(-25.0 * gamma_tot, 25.0 * gamma_tot, 1201)
    spectra = multitone_spectra(params, baths, config, "symmetrized", peak_grid)
    pref = params.kappa_r / params.kappa
    fits = {}
    for name, spec in (("anti_stokes", spectra.anti_stokes), ("stokes", spectra.stokes)):
        noisy_spec = Spectrum(spec.freq_offsets, noisy(spec.values))
        fits[name] = fit_lorentzian(noisy_spec)
    n_plus = fits["anti_stokes"].amplitude * fits["anti_stokes"].width / 4.0 / (pref * gamma_opt)
    n_minus = fits["stokes"].amplitude * fits["stokes"].width / 4.0 / (pref * gamma_opt)
    report["n_plus_fit"] = n_plus
    report["n_minus_fit"] = n_minus
    report["uncertainties"] = {
        "n_r": occ.n_r_err,
        "stokes_width": fits["stokes"].uncertainty("width"),
        "anti_stokes_width": fits["anti_stokes"].uncertainty("width"),
        "stokes_amplitude": fits["stokes"].uncertainty("amplitude"),
        "anti_stokes_amplitude": fits["anti_stokes"].uncertainty("amplitude"),
    }
    report["n_eff_fit"] = (n_minus - n_plus - 1.0) / 2.0
    report["n_eff_true"] = baths.n_eff(params)
    w_anti, w_stokes = sideband_weights(params, baths, config, "symmetrized")
    report["weights_analytic"] = {"anti_stokes": w_anti, "stokes": w_stokes}
    return report
