"""Single-tone scattering theory of the driven cavity.

A pump at omega_p = omega_c - Delta with Delta = +-omega_m (detuning_sign =
+1 for red, -1 for blue) couples the right/left port fields and the
mechanical bath field through a 3x3 scattering matrix. This module builds
that matrix, the closed-form symmetrized / normal-ordered output spectra of
the right port, the red/blue imbalance, the integrated sideband weights, and
the output-field commutator.

Frequency bookkeeping: the printed matrix lives in the frame rotating at the
pump, where the cavity resonance sits at omega = Delta = sign*omega_m. All
public spectra take grids of lab-frame offsets x = omega - omega_c, which map
to rotating-frame frequencies omega = sign*omega_m + x.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InstabilityError, ValidityError
from .model import BathSpec, Spectrum, SystemParams, ToneSpec, validate_stability

__all__ = [
    "ScatteringMatrix",
    "intracavity_amplitude",
    "drive_amplitude_for_photons",
    "mech_denominator",
    "scattering_matrix",
    "noise_floor",
    "spectrum_from_scattering",
    "single_tone_spectrum",
    "single_tone_integrated_weight",
    "imbalance",
    "integrated_asymmetry",
    "output_commutator",
]


@dataclass(frozen=True)
class ScatteringMatrix:
    """3x3 scattering matrix at one rotating-frame frequency.

    Row/column order is (right port, left port, mechanical bath); the third
    field is c for a red pump and c^dagger for a blue pump. ``s_loss`` is the
    additional coupling of the intrinsic-loss input into the right output;
    it vanishes when kappa_i = 0 and is needed so that spectra composed from
    the matrix include the loss channel.
    """

    entries: np.ndarray
    detuning_sign: int
    s_loss: complex = 0.0 + 0.0j
    omega: float = 0.0

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.shape != (3, 3):
            raise ConfigError("scattering matrix must be 3x3")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        if self.detuning_sign not in (+1, -1):
            raise ConfigError("detuning_sign must be +1 or -1")

    @property
    def output_row(self) -> np.ndarray:
        """First row: right-port output onto (R, L, mech) inputs."""
        return self.entries[0]


def intracavity_amplitude(params: SystemParams, tone: ToneSpec, drive_amplitude: float = 1.0) -> complex:
    """Classical intracavity amplitude of a tone driven through the left port.

    a_bar = sqrt(kappa_l) * alpha / (kappa/2 - i*(omega_p - omega_c)); the
    squared modulus is the mean pump photon number for that drive strength.
    """
    return math.sqrt(params.kappa_l) * drive_amplitude / (
        params.kappa / 2.0 - 1j * tone.detuning
    )


def drive_amplitude_for_photons(params: SystemParams, tone: ToneSpec) -> float:
    """Inverse map of |intracavity_amplitude|**2 = n_photons: required drive strength."""
    n_p = tone.photon_number(params)
    return math.sqrt(n_p) * abs(params.kappa / 2.0 - 1j * tone.detuning) / math.sqrt(params.kappa_l)


def mech_denominator(offset, detuning_sign: int, gamma_m: float, gamma_opt: float):
    """Mechanical response denominator N^+-entered at the sideband.

    N^+- = -i*(omega -+ omega_m) + (gamma_m +- gamma_opt)/2; since omega_m is
    not an argument, ``offset`` is the already-shifted omega -+ omega_m
    (equal to the lab offset from the cavity resonance).
    """
    if not gamma_m > 0.0:
        raise ConfigError("gamma_m must be positive")
    return -1j * np.asarray(offset, dtype=complex) + (gamma_m + detuning_sign * gamma_opt) / 2.0


def _window_gate(params: SystemParams, x, enforce_window: bool) -> None:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    lim = params.kappa / 4.0
    if enforce_window and np.any(np.abs(x) >= lim):
        raise ValidityError(
            "frequency window gate: |omega -+ omega_m| < kappa/4 required "
            f"(max offset {np.max(np.abs(x)):.6g}, kappa/4 = {lim:.6g}); "
            "pass enforce_window=False to override"
        )


def scattering_matrix(params: SystemParams, tone: ToneSpec, detuning_sign: int,
                      omega: float, *, enforce_window: bool = True) -> ScatteringMatrix:
    """Full 3x3 scattering matrix at rotating-frame frequency ``omega``.

    Valid within |omega -+ omega_m| < kappa/4 of the mechanical feature
    (overridable) and in the good-cavity limit omega_m > kappa.
    """
    params.require_good_cavity()
    sign = int(detuning_sign)
    if sign not in (+1, -1):
        raise ConfigError("detuning_sign must be +1 or -1")
    x = omega - sign * params.omega_m
    _window_gate(params, x, enforce_window)

    k = params.kappa
    gamma_opt = tone.gamma_opt(params)
    n = complex(mech_denominator(x, sign, params.gamma_m, gamma_opt))
    g = gamma_opt / n
    mech = 1j * cmath.sqrt(params.gamma_m * gamma_opt) / n

    kr, kl, ki = params.kappa_r, params.kappa_l, params.kappa_i
    s11 = 1.0 - 2.0 * kr / k + sign * (kr / k) * g
    s12 = -2.0 * math.sqrt(kl * kr) / k + sign * (math.sqrt(kl * kr) / k) * g
    s22 = 1.0 - 2.0 * kl / k + sign * (kl / k) * g
    s13 = math.sqrt(kr / k) * mech
    s23 = math.sqrt(kl / k) * mech
    s33 = 1.0 - params.gamma_m / n
    s_loss = -2.0 * math.sqrt(ki * kr) / k + sign * (math.sqrt(ki * kr) / k) * g

    entries = np.array(
        [[s11, s12, s13],
         [s12, s22, s23],
         [s13, s23, s33]],
        dtype=complex,
    )
    return ScatteringMatrix(entries=entries, detuning_sign=sign, s_loss=s_loss, omega=omega)


def noise_floor(params: SystemParams, baths: BathSpec) -> float:
    """Frequency-independent noise floor of the right-port output (lab frame).

    S0 = alpha_r/2 + n_r + (4 kappa_r/kappa)(n_c - n_r)
       + (2 kappa_r/kappa)(alpha_l - alpha_r).
    """
    k = params.kappa
    kr = params.kappa_r
    return (
        baths.alpha_r / 2.0
        + baths.n_r
        + 4.0 * kr / k * (baths.n_c(params) - baths.n_r)
        + 2.0 * kr / k * (baths.alpha_l - baths.alpha_r)
    )


def spectrum_from_scattering(smat: ScatteringMatrix, baths: BathSpec, kind: str,
                             detuning_sign: int | None = None) -> float:
    """Output spectral value at smat's frequency, composed from |s_1j|^2.

    ``kind`` is "symmetrized" (inputs weighted by n + w/2) or
    "normal_ordered" (inputs weighted by n; the mechanical vacuum beta
    contributes only for the blue pump). The intrinsic-loss channel enters
    through ``smat.s_loss``.
    """
    sign = smat.detuning_sign if detuning_sign is None else int(detuning_sign)
    s11, s12, s13 = smat.output_row
    a = (abs(s11) ** 2, abs(s12) ** 2, abs(smat.s_loss) ** 2, abs(s13) ** 2)
    if kind == "symmetrized":
        w = (
            baths.n_r + baths.alpha_r / 2.0,
            baths.n_l + baths.alpha_l / 2.0,
            baths.n_i + baths.alpha_i / 2.0,
            baths.n_m + baths.beta / 2.0,
        )
    elif kind == "normal_ordered":
        beta = baths.beta if sign == -1 else 0.0
        w = (baths.n_r, baths.n_l, baths.n_i, baths.n_m + beta)
    else:
        raise ConfigError(f"unknown spectrum kind {kind!r}")
    return float(sum(ai * wi for ai, wi in zip(a, w)))


def _lorentzian_brackets(params: SystemParams, baths: BathSpec, gamma_opt: float,
                         detuning_sign: int, kind: str) -> float:
    """Bracket multiplying kappa_r/kappa * gamma_m*gamma_opt / ((omega -+ omega_m)^2 + gamma_tot^2/4)."""
    n_c = baths.n_c(params)
    n_eff = baths.n_eff(params)
    u = gamma_opt / params.gamma_m
    kl_frac = params.kappa_l / params.kappa
    d_alpha = (baths.alpha_l - baths.alpha_r) / 2.0
    if kind == "symmetrized":
        if detuning_sign == +1:
            return (baths.n_m - n_eff + (baths.beta - baths.alpha_r) / 2.0
                    - u * (n_c - baths.n_r) - kl_frac * (2.0 + u) * d_alpha)
        return (baths.n_m + n_eff + (baths.beta + baths.alpha_r) / 2.0
                - u * (n_c - baths.n_r) + kl_frac * (2.0 - u) * d_alpha)
    if kind == "normal_ordered":
        if detuning_sign == +1:
            return baths.n_m - n_eff - u * (n_c - baths.n_r)
        return baths.n_m + n_eff + baths.beta - u * (n_c - baths.n_r)
    raise ConfigError(f"unknown spectrum kind {kind!r}")


def single_tone_spectrum(params: SystemParams, baths: BathSpec, tone: ToneSpec,
                         detuning_sign: int, kind: str, grid: np.ndarray, *,
                         weak_coupling: bool = False,
                         enforce_window: bool = True) -> Spectrum:
    """Closed-form output spectrum on a lab-offset grid x = omega - omega_c.

    The exact Lorentzian width gamma_tot = gamma_m +- gamma_opt is used by
    default; ``weak_coupling=True`` selects the gamma_tot ~ gamma_m form.
    Agrees with the scattering-row composition at every point.
    """
    params.require_good_cavity()
    sign = int(detuning_sign)
    gamma_opt = tone.gamma_opt(params)
    gamma_tot = params.gamma_m + sign * gamma_opt
    if not gamma_tot > 0.0:
        raise InstabilityError(gamma_tot)
    x = np.asarray(grid, dtype=float)
    _window_gate(params, x, enforce_window)

    width = params.gamma_m if weak_coupling else gamma_tot
    floor = noise_floor(params, baths)
    if kind == "normal_ordered":
        floor = floor - baths.alpha_r / 2.0
    bracket = _lorentzian_brackets(params, baths, gamma_opt, sign, kind)
    lorentz = (params.kappa_r / params.kappa) * params.gamma_m * gamma_opt / (
        x**2 + width**2 / 4.0
    )
    return Spectrum(x, floor + lorentz * bracket)


def single_tone_integrated_weight(params: SystemParams, baths: BathSpec, tone: ToneSpec,
                                  detuning_sign: int, kind: str, *,
                                  weak_coupling: bool = False) -> float:
    """Analytic integral (domega/2pi) of the single-tone Lorentzian feature.

    (kappa_r/kappa) gamma_m gamma_opt * bracket / width, the exact integral
    of the closed-form Lorentzian over all frequencies.
    """
    sign = int(detuning_sign)
    gamma_opt = tone.gamma_opt(params)
    gamma_tot = params.gamma_m + sign * gamma_opt
    if not gamma_tot > 0.0:
        raise InstabilityError(gamma_tot)
    width = params.gamma_m if weak_coupling else gamma_tot
    bracket = _lorentzian_brackets(params, baths, gamma_opt, sign, kind)
    return (params.kappa_r / params.kappa) * params.gamma_m * gamma_opt * bracket / width


def imbalance(params: SystemParams, baths: BathSpec, tone: ToneSpec, kind: str,
              grid: np.ndarray, *, weak_coupling: bool = False,
              enforce_window: bool = True) -> Spectrum:
    """Pointwise blue-minus-red spectrum difference, both re-centered on their peaks.

    The grid is the common offset-from-peak axis; the constant floor cancels.
    """
    blue = single_tone_spectrum(params, baths, tone, -1, kind, grid,
                                weak_coupling=weak_coupling, enforce_window=enforce_window)
    red = single_tone_spectrum(params, baths, tone, +1, kind, grid,
                               weak_coupling=weak_coupling, enforce_window=enforce_window)
    return Spectrum(np.asarray(grid, dtype=float), blue.values - red.values)


def integrated_asymmetry(params: SystemParams, baths: BathSpec, tone: ToneSpec,
                         kind: str) -> float:
    """Integrated weight (domega/2pi) of the red/blue imbalance, weak-coupling form.

    Symmetrized: (kappa_r/kappa) gamma_opt [2 n_eff + (kappa_r/kappa) alpha_r
    + (kappa_l/kappa) alpha_l]; normal-ordered: ... [2 n_eff + beta].
    """
    gamma_opt = tone.gamma_opt(params)
    if gamma_opt > 0.1 * params.gamma_m:
        warnings.warn(
            "integrated_asymmetry assumes gamma_opt << gamma_m "
            f"(gamma_opt/gamma_m = {gamma_opt / params.gamma_m:.3g})",
            stacklevel=2,
        )
    n_eff = baths.n_eff(params)
    k = params.kappa
    if kind == "symmetrized":
        bracket = 2.0 * n_eff + (params.kappa_r / k) * baths.alpha_r + (params.kappa_l / k) * baths.alpha_l
    elif kind == "normal_ordered":
        bracket = 2.0 * n_eff + baths.beta
    else:
        raise ConfigError(f"unknown spectrum kind {kind!r}")
    return (params.kappa_r / k) * gamma_opt * bracket


def output_commutator(params: SystemParams, baths: BathSpec, tone: ToneSpec,
                      detuning_sign: int, omega: float, *,
                      enforce_window: bool = True) -> float:
    """Coefficient of delta(omega + Omega) in [d_R,out, d_R,out^dagger].

    Composed from the scattering row with the graded mechanical weight
    (+beta for red, -beta for blue); equals alpha_r everywhere when
    alpha_l = alpha_r = beta, and otherwise carries a Lorentzian residue.
    """
    smat = scattering_matrix(params, tone, detuning_sign, omega,
                             enforce_window=enforce_window)
    s11, s12, s13 = smat.output_row
    return float(
        abs(s11) ** 2 * baths.alpha_r
        + abs(s12) ** 2 * baths.alpha_l
        + abs(smat.s_loss) ** 2 * baths.alpha_i
        + smat.detuning_sign * abs(s13) ** 2 * baths.beta
    )
