"""Balanced detuned probe pair plus cooling tone: twin-sideband spectra.

A red probe at omega_c - (omega_m + delta) and a blue probe at
omega_c + (omega_m + delta) dress the mechanics (linewidth gamma_tot,
averaged occupation n_bar) and emit an anti-Stokes sideband at offset -delta
and a Stokes sideband at +delta from the cavity. An optional cooling tone at
omega_c - (omega_m + delta_c) folds into the enhanced linewidth gamma_M and
occupation n_M.

Sideband Lorentzian weights are always computed analytically from their
brackets here; curve fitting lives in `calibration`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InstabilityError, UnbalancedError, ValidityError
from .model import (
    BathSpec,
    Spectrum,
    SystemParams,
    ToneConfig,
    validate_stability,
)
from .scattering import noise_floor

__all__ = [
    "MultitoneSpectra",
    "sxx_spectrum",
    "sxx_integrated_weight",
    "averaged_occupation",
    "multitone_spectra",
    "sideband_weights",
    "multitone_integrated_asymmetry",
    "sideband_ratio_model",
    "full_rwa_spectrum",
    "peak_ratio_correction",
]


@dataclass(frozen=True)
class MultitoneSpectra:
    """The two independently-resolved sideband Lorentzians.

    ``anti_stokes``/``stokes`` grids are absolute offsets from the cavity
    (centered at -delta and +delta). ``floor`` is the flat background of the
    returned spectra (already reduced by alpha_r/2 for the normal-ordered
    kind); ``gamma_tot`` is the common Lorentzian full width and ``n_bar_m``
    the averaged mechanical occupation.
    """

    anti_stokes: Spectrum
    stokes: Spectrum
    floor: float
    gamma_tot: float
    n_bar_m: float
    kind: str = "symmetrized"


def _separation_gate(params: SystemParams, config: ToneConfig, enforce: bool) -> float:
    gamma_tot = config.gamma_tot(params)
    if not gamma_tot > 0.0:
        raise InstabilityError(gamma_tot)
    if enforce and not (config.delta > 10.0 * gamma_tot):
        raise ValidityError(
            "sideband separation gate: delta > 10*gamma_tot required "
            f"(delta = {config.delta:.6g}, gamma_tot = {gamma_tot:.6g}); "
            "pass enforce_separation=False to override"
        )
    return gamma_tot


def sxx_spectrum(params: SystemParams, baths: BathSpec, config: ToneConfig,
                 grid: np.ndarray) -> Spectrum:
    """Symmetrized mechanical position spectrum (units x_zp^2 * s).

    S_xx[omega] = gamma_M/(omega^2 + gamma_tot^2/4) *
    [(n_M + 1/2) + ((gamma_opt^- + gamma_opt^+)/gamma_M)(n_c + 1/2)] * x_zp^2
    on a grid of offsets from the dressed mechanical resonance.
    """
    validate_stability(params, config)
    gp, gm = config.gamma_opt_pair(params)
    gamma_big_m = config.gamma_big_m(params)
    gamma_tot = config.gamma_tot(params)
    n_big_m = _n_big_m(params, baths, config)
    n_c = baths.n_c(params)
    bracket = (n_big_m + 0.5) + ((gm + gp) / gamma_big_m) * (n_c + 0.5)
    xzp2 = params.x_zp**2 if params.x_zp is not None else 1.0
    x = np.asarray(grid, dtype=float)
    return Spectrum(x, gamma_big_m / (x**2 + gamma_tot**2 / 4.0) * bracket * xzp2)


def sxx_integrated_weight(params: SystemParams, baths: BathSpec, config: ToneConfig) -> float:
    """Analytic integral (domega/2pi) of sxx_spectrum over all frequencies."""
    gp, gm = config.gamma_opt_pair(params)
    gamma_big_m = config.gamma_big_m(params)
    gamma_tot = config.gamma_tot(params)
    n_big_m = _n_big_m(params, baths, config)
    bracket = (n_big_m + 0.5) + ((gm + gp) / gamma_big_m) * (baths.n_c(params) + 0.5)
    xzp2 = params.x_zp**2 if params.x_zp is not None else 1.0
    return gamma_big_m * bracket / gamma_tot * xzp2


def _n_big_m(params: SystemParams, baths: BathSpec, config: ToneConfig) -> float:
    g_cool = config.cooling_gamma_opt(params)
    gamma_big_m = params.gamma_m + g_cool
    return (params.gamma_m * baths.n_m + g_cool * baths.n_c(params)) / gamma_big_m


def averaged_occupation(params: SystemParams, baths: BathSpec, config: ToneConfig) -> float:
    """Averaged mechanical occupation under both probes and cooling.

    n_bar = (gamma_M/gamma_tot) n_M + (gamma_opt^-/gamma_tot)(n_c + 1)
          + (gamma_opt^+/gamma_tot) n_c.
    """
    validate_stability(params, config)
    gp, gm = config.gamma_opt_pair(params)
    gamma_big_m = config.gamma_big_m(params)
    gamma_tot = config.gamma_tot(params)
    n_c = baths.n_c(params)
    return (gamma_big_m / gamma_tot) * _n_big_m(params, baths, config) \
        + (gm / gamma_tot) * (n_c + 1.0) + (gp / gamma_tot) * n_c


def _brackets(params: SystemParams, baths: BathSpec, config: ToneConfig,
              kind: str) -> tuple[float, float]:
    """(anti-Stokes, Stokes) Lorentzian brackets for the requested ordering."""
    n_bar = averaged_occupation(params, baths, config)
    n_eff = baths.n_eff(params)
    gp, gm = config.gamma_opt_pair(params)
    gamma_big_m = config.gamma_big_m(params)
    gamma_tot = config.gamma_tot(params)
    anti = n_bar - n_eff
    if kind == "symmetrized":
        stokes = n_bar + n_eff + 1.0
    elif kind == "normal_ordered":
        stokes = n_bar + n_eff + gamma_big_m / gamma_tot + (gp - gm) / gamma_tot
    else:
        raise ConfigError(f"unknown spectrum kind {kind!r}")
    return anti, stokes


def multitone_spectra(params: SystemParams, baths: BathSpec, config: ToneConfig,
                      kind: str, grid: np.ndarray, *,
                      enforce_separation: bool = True) -> MultitoneSpectra:
    """Both sideband Lorentzians on a shared offset-from-peak grid.

    Each peak has prefactor (kappa_r/kappa) gamma_tot gamma_opt^+- /
    (omega^2 + gamma_tot^2/4) with brackets [n_bar - n_eff] (anti-Stokes) and
    [n_bar + n_eff + 1] (Stokes, symmetrized). The returned spectra carry
    absolute offsets (peak center -+delta plus the supplied grid).
    """
    params.require_good_cavity()
    gamma_tot = _separation_gate(params, config, enforce_separation)
    gp, gm = config.gamma_opt_pair(params)
    anti_br, stokes_br = _brackets(params, baths, config, kind)
    floor = noise_floor(params, baths)
    if kind == "normal_ordered":
        floor = floor - baths.alpha_r / 2.0
    x = np.asarray(grid, dtype=float)
    lor = gamma_tot / (x**2 + gamma_tot**2 / 4.0)
    pref = params.kappa_r / params.kappa
    anti = floor + pref * gp * lor * anti_br
    stokes = floor + pref * gm * lor * stokes_br
    return MultitoneSpectra(
        anti_stokes=Spectrum(x - config.delta, anti),
        stokes=Spectrum(x + config.delta, stokes),
        floor=floor,
        gamma_tot=gamma_tot,
        n_bar_m=averaged_occupation(params, baths, config),
        kind=kind,
    )


def sideband_weights(params: SystemParams, baths: BathSpec, config: ToneConfig,
                     kind: str = "symmetrized") -> tuple[float, float]:
    """Analytic integrated weights (domega/2pi): (anti-Stokes, Stokes).

    Each unit-bracket Lorentzian integrates to exactly gamma_opt^+- *
    kappa_r/kappa, so the weights are the brackets times that factor.
    """
    validate_stability(params, config)
    gp, gm = config.gamma_opt_pair(params)
    anti_br, stokes_br = _brackets(params, baths, config, kind)
    pref = params.kappa_r / params.kappa
    return pref * gp * anti_br, pref * gm * stokes_br


def multitone_integrated_asymmetry(params: SystemParams, baths: BathSpec,
                                   config: ToneConfig) -> float:
    """Stokes-minus-anti-Stokes integrated weight (equal for both orderings).

    (kappa_r/kappa) [n_bar (gamma^- - gamma^+) + (n_eff + 1) gamma^-
    + n_eff gamma^+].
    """
    validate_stability(params, config)
    gp, gm = config.gamma_opt_pair(params)
    n_bar = averaged_occupation(params, baths, config)
    n_eff = baths.n_eff(params)
    return (params.kappa_r / params.kappa) * (
        n_bar * (gm - gp) + (n_eff + 1.0) * gm + n_eff * gp
    )


def sideband_ratio_model(n_m_plus: float, n_eff: float) -> float:
    """Expected sideband ratio n^-/n^+ = 1 + (2 n_eff + 1)/n^+."""
    if not n_m_plus > 0.0:
        raise ConfigError(f"n_m_plus must be positive, got {n_m_plus!r}")
    return 1.0 + (2.0 * n_eff + 1.0) / n_m_plus


def full_rwa_spectrum(params: SystemParams, baths: BathSpec, config: ToneConfig,
                      grid: np.ndarray, *, components: bool = False):
    """Complete twin-peak spectrum for balanced probes, including the mixing term.

    S[omega] = S0 + mixing + anti-Stokes Lorentzian + Stokes Lorentzian, with
    mixing = -(4 kappa_r/kappa) gamma_opt^2 [(omega - delta)(omega + delta)
    + gamma_M^2/4] / (both Lorentzian denominators) * (n_c + 1/2). Grid is
    absolute offsets from the cavity; peaks sit at -+delta.

    With ``components=True`` returns a dict with entries
    {"total", "floor", "mixing", "stokes", "anti_stokes"}.
    """
    params.require_good_cavity()
    if not config.is_balanced(params):
        gp, gm = config.gamma_opt_pair(params)
        raise UnbalancedError(
            f"balanced probes required: gamma_opt+ = {gp:.6g}, gamma_opt- = {gm:.6g}"
        )
    validate_stability(params, config)
    gp, _ = config.gamma_opt_pair(params)
    gamma_opt = gp
    gamma_big_m = config.gamma_big_m(params)
    delta = config.delta
    n_bar = averaged_occupation(params, baths, config)
    n_eff = baths.n_eff(params)
    n_c = baths.n_c(params)
    pref = params.kappa_r / params.kappa
    floor = noise_floor(params, baths)

    x = np.asarray(grid, dtype=float)
    d_as = (x + delta) ** 2 + gamma_big_m**2 / 4.0
    d_s = (x - delta) ** 2 + gamma_big_m**2 / 4.0
    mixing = -4.0 * pref * gamma_opt**2 * ((x - delta) * (x + delta) + gamma_big_m**2 / 4.0) \
        / (d_as * d_s) * (n_c + 0.5)
    anti = pref * gamma_big_m * gamma_opt / d_as * (n_bar - n_eff)
    stokes = pref * gamma_big_m * gamma_opt / d_s * (n_bar + n_eff + 1.0)
    total = floor + mixing + anti + stokes
    if not components:
        return Spectrum(x, total)
    return {
        "total": Spectrum(x, total),
        "floor": Spectrum(x, np.full_like(x, floor)),
        "mixing": Spectrum(x, mixing),
        "anti_stokes": Spectrum(x, anti),
        "stokes": Spectrum(x, stokes),
    }


def peak_ratio_correction(params: SystemParams, baths: BathSpec, config: ToneConfig,
                          side: str) -> float:
    """Finite-separation correction to a single-Lorentzian peak value.

    Ratio of (full twin-peak value minus floor) to the lone Lorentzian at the
    peak: 1 + [ (4 delta/gamma_M)^2 + 1 ]^-1 * (n_M - n_opt + a)/(n_M + n_opt
    + b) with n_opt = (gamma_opt/gamma_M)(2 n_c + 1) +- n_eff and
    (a, b) = (0, 1) for the Stokes side, (1, 0) for the anti-Stokes side.
    """
    if not config.is_balanced(params):
        gp, gm = config.gamma_opt_pair(params)
        raise UnbalancedError(
            f"balanced probes required: gamma_opt+ = {gp:.6g}, gamma_opt- = {gm:.6g}"
        )
    gamma_opt, _ = config.gamma_opt_pair(params)
    gamma_big_m = config.gamma_big_m(params)
    n_big_m = _n_big_m(params, baths, config)
    n_c = baths.n_c(params)
    n_eff = baths.n_eff(params)
    prefactor = 1.0 / ((4.0 * config.delta / gamma_big_m) ** 2 + 1.0)
    base = (gamma_opt / gamma_big_m) * (2.0 * n_c + 1.0)
    if side == "stokes":
        n_opt = base + n_eff
        return 1.0 + prefactor * (n_big_m - n_opt) / (n_big_m + n_opt + 1.0)
    if side == "anti_stokes":
        n_opt = base - n_eff
        return 1.0 + prefactor * (n_big_m - n_opt + 1.0) / (n_big_m + n_opt)
    raise ConfigError(f"side must be 'stokes' or 'anti_stokes', got {side!r}")
