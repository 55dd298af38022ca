"""Domain types and derived quantities for a driven two-port electro/opto-mechanical cavity.

Conventions used everywhere in this package:

* hbar = 1; spectra are dimensionless ("quanta"). Mechanical position spectra
  are reported in units of x_zp**2 unless ``x_zp`` is supplied.
* All frequencies and rates are angular (rad/s). Configuration files quote Hz;
  the conversion by 2*pi happens only at the config boundary (`config.py`)
  and in the ``from_hz`` constructors.
* Spectrum grids are offsets from the cavity resonance, omega - omega_c.
* Drive amplitudes are taken real; drive phase is not modelled. The static
  mechanical displacement only renormalizes the cavity frequency and is
  absorbed into omega_c.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, InstabilityError, ValidityError

TWO_PI = 2.0 * math.pi

#: roles a drive tone may take
TONE_ROLES = ("red_probe", "blue_probe", "cooling", "generic")


def _require_positive(name: str, value: float) -> None:
    if not (value > 0.0) or not math.isfinite(value):
        raise ConfigError(f"{name} must be strictly positive and finite, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """Static device constants.

    All rates angular (rad/s). ``x_zp`` is the mechanical zero-point amplitude
    in meters and may be omitted; position spectra are then reported in units
    of x_zp**2.
    """

    omega_c: float
    omega_m: float
    g0: float
    kappa_l: float
    kappa_r: float
    kappa_i: float
    gamma_m: float
    x_zp: float | None = None

    def __post_init__(self):
        for name in ("omega_c", "omega_m", "g0", "kappa_l", "kappa_r", "gamma_m"):
            _require_positive(name, getattr(self, name))
        if self.kappa_i < 0.0 or not math.isfinite(self.kappa_i):
            raise ConfigError(f"kappa_i must be >= 0, got {self.kappa_i!r}")
        if self.x_zp is not None:
            _require_positive("x_zp", self.x_zp)

    @property
    def kappa(self) -> float:
        """Total cavity linewidth, kappa_l + kappa_r + kappa_i (never stored)."""
        return self.kappa_l + self.kappa_r + self.kappa_i

    @property
    def mass(self) -> float | None:
        """Effective mass from x_zp (hbar = 1), None when x_zp is absent."""
        if self.x_zp is None:
            return None
        return 1.0 / (2.0 * self.omega_m * self.x_zp**2)

    def require_good_cavity(self) -> None:
        """Gate for every operation that relies on the rotating-wave step.

        Raises instead of silently computing outside omega_m > kappa.
        """
        if not self.omega_m > self.kappa:
            raise ValidityError(
                "good-cavity gate: omega_m > kappa required, "
                f"got omega_m = {self.omega_m:.6g}, kappa = {self.kappa:.6g}"
            )

    @classmethod
    def from_hz(cls, *, omega_c_hz, omega_m_hz, g0_hz, kappa_l_hz, kappa_r_hz,
                kappa_i_hz=0.0, gamma_m_hz, x_zp_m=None) -> "SystemParams":
        return cls(
            omega_c=TWO_PI * omega_c_hz,
            omega_m=TWO_PI * omega_m_hz,
            g0=TWO_PI * g0_hz,
            kappa_l=TWO_PI * kappa_l_hz,
            kappa_r=TWO_PI * kappa_r_hz,
            kappa_i=TWO_PI * kappa_i_hz,
            gamma_m=TWO_PI * gamma_m_hz,
            x_zp=x_zp_m,
        )


@dataclass(frozen=True)
class BathSpec:
    """Thermal occupations and vacuum-noise weights of every input channel.

    ``alpha_*`` and ``beta`` are the electromagnetic/mechanical vacuum weights.
    Physically they equal 1; they are kept adjustable so the vacuum
    contributions can be tracked through every observable.
    """

    n_r: float = 0.0
    n_l: float = 0.0
    n_i: float = 0.0
    n_m: float = 0.0
    alpha_r: float = 1.0
    alpha_l: float = 1.0
    alpha_i: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        for name in ("n_r", "n_l", "n_i", "n_m", "alpha_r", "alpha_l", "alpha_i", "beta"):
            v = getattr(self, name)
            if v < 0.0 or not math.isfinite(v):
                raise ConfigError(f"{name} must be >= 0 and finite, got {v!r}")

    def n_c(self, params: SystemParams) -> float:
        """Cavity thermal occupation: decay-rate-weighted sum over the ports."""
        return (
            params.kappa_l * self.n_l
            + params.kappa_r * self.n_r
            + params.kappa_i * self.n_i
        ) / params.kappa

    def n_eff(self, params: SystemParams) -> float:
        """Effective cavity occupation 2*n_c - n_r that controls the measured imbalance."""
        return 2.0 * self.n_c(params) - self.n_r


@dataclass(frozen=True)
class ToneSpec:
    """One drive tone.

    Exactly one of ``n_photons`` (mean intracavity pump photons) or
    ``coupling`` (linearized many-photon rate G, rad/s) must be given; the
    other is derived through G = g0 * sqrt(n_photons).
    """

    detuning: float  # omega_pump - omega_c, signed, rad/s
    role: str = "generic"
    n_photons: float | None = None
    coupling: float | None = None

    def __post_init__(self):
        if self.role not in TONE_ROLES:
            raise ConfigError(f"unknown tone role {self.role!r}; expected one of {TONE_ROLES}")
        if (self.n_photons is None) == (self.coupling is None):
            raise ConfigError("exactly one of n_photons or coupling must be given")
        if self.n_photons is not None and (self.n_photons < 0 or not math.isfinite(self.n_photons)):
            raise ConfigError(f"n_photons must be >= 0, got {self.n_photons!r}")
        if self.coupling is not None and (self.coupling < 0 or not math.isfinite(self.coupling)):
            raise ConfigError(f"coupling must be >= 0, got {self.coupling!r}")

    def coupling_rate(self, params: SystemParams) -> float:
        """G in rad/s."""
        if self.coupling is not None:
            return self.coupling
        return params.g0 * math.sqrt(self.n_photons)

    def photon_number(self, params: SystemParams) -> float:
        if self.n_photons is not None:
            return self.n_photons
        return (self.coupling / params.g0) ** 2

    def gamma_opt(self, params: SystemParams) -> float:
        """Optical damping (red) / anti-damping (blue) rate 4 G^2 / kappa."""
        g = self.coupling_rate(params)
        return 4.0 * g * g / params.kappa


@dataclass(frozen=True)
class ToneConfig:
    """An ordered set of drive tones plus the probe/cooling detunings.

    For the balanced three-tone scheme the probes sit at
    omega_c -+ (omega_m + delta) and the cooling tone at
    omega_c - (omega_m + delta_c). A configuration may also hold a single
    tone (delta = 0 meaning "on the sideband") or no tones at all.
    """

    tones: tuple[ToneSpec, ...]
    delta: float = 0.0
    delta_c: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "tones", tuple(self.tones))
        roles = [t.role for t in self.tones]
        for r in ("red_probe", "blue_probe", "cooling"):
            if roles.count(r) > 1:
                raise ConfigError(f"at most one {r} tone allowed, got {roles.count(r)}")

    def tone(self, role: str) -> ToneSpec | None:
        for t in self.tones:
            if t.role == role:
                return t
        return None

    @property
    def has_probe_pair(self) -> bool:
        return self.tone("red_probe") is not None and self.tone("blue_probe") is not None

    def validate_three_tone(self, params: SystemParams, *, allow_small_separation: bool = False) -> None:
        """Well-separated-sidebands gate for the probe-pair scheme.

        Enforces delta_c > delta and delta > 10*gamma_m; pass
        ``allow_small_separation=True`` to override deliberately.
        """
        if not self.has_probe_pair:
            raise ConfigError("probe pair (red_probe + blue_probe) required")
        if self.tone("cooling") is not None:
            if self.delta_c is None or not (self.delta_c > self.delta):
                raise ConfigError(
                    f"cooling detuning delta_c = {self.delta_c!r} must exceed delta = {self.delta:.6g}"
                )
        if not allow_small_separation and not (self.delta > 10.0 * params.gamma_m):
            raise ValidityError(
                "sideband separation gate: delta > 10*gamma_m required "
                f"(delta = {self.delta:.6g}, gamma_m = {params.gamma_m:.6g}); "
                "pass allow_small_separation=True to override"
            )

    def gamma_opt_pair(self, params: SystemParams) -> tuple[float, float]:
        """(gamma_opt^+, gamma_opt^-) from the red and blue probe tones (0 when absent)."""
        red = self.tone("red_probe")
        blue = self.tone("blue_probe")
        gp = red.gamma_opt(params) if red is not None else 0.0
        gm = blue.gamma_opt(params) if blue is not None else 0.0
        return gp, gm

    def cooling_gamma_opt(self, params: SystemParams) -> float:
        cool = self.tone("cooling")
        return cool.gamma_opt(params) if cool is not None else 0.0

    def gamma_big_m(self, params: SystemParams) -> float:
        """Cooling-enhanced mechanical linewidth gamma_M = gamma_m + gamma_opt^cool."""
        return params.gamma_m + self.cooling_gamma_opt(params)

    def gamma_tot(self, params: SystemParams) -> float:
        """Total damping gamma_M + gamma_opt^+ - gamma_opt^-."""
        gp, gm = self.gamma_opt_pair(params)
        return self.gamma_big_m(params) + gp - gm

    def is_balanced(self, params: SystemParams, rel_tol: float = 1e-12) -> bool:
        gp, gm = self.gamma_opt_pair(params)
        scale = max(gp, gm, 1e-300)
        return abs(gp - gm) <= rel_tol * scale

    @classmethod
    def balanced(cls, params: SystemParams, *, delta: float, probe_gamma_opt: float,
                 delta_c: float | None = None, cooling_gamma_opt: float = 0.0,
                 allow_small_separation: bool = False) -> "ToneConfig":
        """Build the balanced probe pair (optionally plus cooling tone) from target rates."""
        g_probe = math.sqrt(probe_gamma_opt * params.kappa) / 2.0
        tones = [
            ToneSpec(detuning=-(params.omega_m + delta), role="red_probe", coupling=g_probe),
            ToneSpec(detuning=+(params.omega_m + delta), role="blue_probe", coupling=g_probe),
        ]
        if cooling_gamma_opt > 0.0:
            if delta_c is None:
                raise ConfigError("delta_c required when a cooling tone is present")
            g_cool = math.sqrt(cooling_gamma_opt * params.kappa) / 2.0
            tones.append(ToneSpec(detuning=-(params.omega_m + delta_c), role="cooling",
                                  coupling=g_cool))
        cfg = cls(tones=tuple(tones), delta=delta, delta_c=delta_c)
        cfg.validate_three_tone(params, allow_small_separation=allow_small_separation)
        return cfg


@dataclass(frozen=True)
class Spectrum:
    """A real spectral density on a strictly increasing frequency-offset grid.

    ``freq_offsets`` holds omega - omega_c in rad/s; ``values`` is in quanta
    (or x_zp**2 * s for position spectra).
    """

    freq_offsets: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.freq_offsets, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if f.ndim != 1 or v.ndim != 1 or f.shape != v.shape:
            raise ConfigError("freq_offsets and values must be 1-d arrays of equal length")
        if f.size >= 2 and not np.all(np.diff(f) > 0):
            raise ConfigError("freq_offsets must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ConfigError("spectrum values must be finite")
        f.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "freq_offsets", f)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.freq_offsets.size

    def shifted(self, offset: float) -> "Spectrum":
        return Spectrum(self.freq_offsets + offset, self.values)


def integrated_weight(spec: Spectrum, floor: float = 0.0, *, tail_correction: bool = True,
                      center: float | None = None) -> float:
    """Integral (domega / 2pi) of (values - floor) over the grid.

    A Lorentzian feature loses ~gamma/(pi*X) of its weight outside a +-X
    window; when ``tail_correction`` is set the 1/x^2 tails are estimated from
    the edge samples and added back, which makes +-50 linewidth windows good
    to ~1e-6 relative.
    """
    x = spec.freq_offsets
    v = spec.values - floor
    w = np.trapezoid(v, x)
    if tail_correction and x.size >= 4:
        if center is None:
            tot = np.trapezoid(np.abs(v), x)
            center = float(np.trapezoid(x * np.abs(v), x) / tot) if tot > 0 else 0.5 * (x[0] + x[-1])
        left = abs(x[0] - center)
        right = abs(x[-1] - center)
        if left > 0 and right > 0:
            w += v[0] * left + v[-1] * right
    return float(w / TWO_PI)


def derive_effective_mechanics(params: SystemParams, baths: BathSpec,
                               cooling: ToneSpec) -> tuple[float, float]:
    """Cooling-tone dressed mechanics: (gamma_M, n_M).

    gamma_M = gamma_m + gamma_opt^cool and the bath mixture
    n_M = (gamma_m n_m + gamma_opt^cool n_c) / gamma_M.
    """
    if cooling.role != "cooling":
        raise ConfigError(f"expected a cooling tone, got role {cooling.role!r}")
    g_cool = cooling.gamma_opt(params)
    gamma_big_m = params.gamma_m + g_cool
    n_big_m = (params.gamma_m * baths.n_m + g_cool * baths.n_c(params)) / gamma_big_m
    return gamma_big_m, n_big_m


def validate_stability(params: SystemParams, tones) -> None:
    """Reject drive configurations with non-positive total damping.

    Accepts a ToneConfig or a lone ToneSpec. A lone blue tone requires
    gamma_m - gamma_opt > 0; a probe pair requires
    gamma_M + gamma_opt^+ - gamma_opt^- > 0.
    """
    if isinstance(tones, ToneSpec):
        if tones.role == "blue_probe":
            gamma_tot = params.gamma_m - tones.gamma_opt(params)
        else:
            gamma_tot = params.gamma_m + tones.gamma_opt(params)
        if not gamma_tot > 0.0:
            raise InstabilityError(gamma_tot)
        return
    if not isinstance(tones, ToneConfig):
        raise ConfigError(f"expected ToneSpec or ToneConfig, got {type(tones)!r}")
    blue = tones.tone("blue_probe")
    if blue is not None and tones.tone("red_probe") is None and tones.tone("cooling") is None:
        gamma_tot = params.gamma_m - blue.gamma_opt(params)
    else:
        gamma_tot = tones.gamma_tot(params)
    if not gamma_tot > 0.0:
        raise InstabilityError(gamma_tot)


def bose_occupation(temperature_k: float, omega: float) -> float:
    """Thermal occupation 1/(exp(hbar*omega/kT) - 1) for omega in rad/s."""
    from scipy.constants import hbar, k as k_b

    x = hbar * omega / (k_b * temperature_k)
    return 1.0 / math.expm1(x)
