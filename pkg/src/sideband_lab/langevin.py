"""Brute-force time-domain cross-check of the analytic spectra.

The linearized rotating-frame equations for the cavity and mechanical
fluctuation envelopes are integrated by Euler-Maruyama with classical
complex Gaussian inputs whose variances are the symmetrized bath strengths
(n_sigma + w_sigma/2). For linear dynamics this classical ensemble has
exactly the symmetrized quantum spectra; normal-ordered spectra are not
reproduced by this construction and are checked analytically elsewhere.

The right-port output d_out = d_in + sqrt(kappa_r) d is boxcar-decimated to
the bandwidth of interest and Welch-averaged into a power spectral density in
quanta, normalized so a flat vacuum input gives 1/2.

Reproducibility: every trajectory draws from its own counter-based stream,
numpy Philox-4x64-10 seeded with SeedSequence(seed, spawn_key=(index,)), so
serial and parallel execution produce identical ensembles. The environment
variable SIDEBAND_LAB_THREADS caps the number of worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import signal as _signal

from .errors import ConfigError, StepSizeError
from .model import (
    TWO_PI,
    BathSpec,
    Spectrum,
    SystemParams,
    ToneConfig,
    integrated_weight,
    validate_stability,
)
from .multitone import sideband_weights
from .scattering import noise_floor, single_tone_integrated_weight

try:  # pragma: no cover - exercised implicitly
    import numba as _numba

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover
    _numba = None
    _HAVE_NUMBA = False

RNG_ALGORITHM = "numpy-philox-4x64-10"

__all__ = [
    "SimConfig",
    "TrajectoryOutput",
    "synthesize_input_noise",
    "integrate_langevin",
    "estimate_psd",
    "choose_decimation",
    "oracle_compare",
    "RNG_ALGORITHM",
]

_CHANNELS = ("right", "left", "intrinsic", "mechanical")


@dataclass(frozen=True)
class SimConfig:
    """Integration and averaging layout for one stochastic run."""

    dt: float
    n_steps: int
    n_trajectories: int
    seed: int
    burn_in: int
    psd_segments: int

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        for name in ("n_steps", "n_trajectories", "psd_segments"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not 0 <= self.burn_in < self.n_steps:
            raise ConfigError("burn_in must satisfy 0 <= burn_in < n_steps")

    @classmethod
    def auto(cls, params: SystemParams, config: ToneConfig, *, n_segments: int = 2000,
             seed: int = 0, n_trajectories: int = 64, dt_factor: float = 0.04,
             bins_per_linewidth: float = 4.0, burn_linewidths: float = 8.0) -> "SimConfig":
        """Pick dt, lengths and burn-in consistent with the step-size gates."""
        gamma_tot = config.gamma_tot(params)
        dt = min(dt_factor / params.kappa, 9e-4 / gamma_tot)
        t_seg = TWO_PI * bins_per_linewidth / gamma_tot
        steps_per_seg = max(2, math.ceil(t_seg / dt))
        segs_per_traj = max(2, math.ceil(n_segments / n_trajectories))
        kept = math.ceil((segs_per_traj + 1) / 2 * steps_per_seg)
        kept = max(kept, math.ceil(51.0 / (gamma_tot * dt)))
        burn = math.ceil(burn_linewidths / (gamma_tot * dt))
        return cls(dt=dt, n_steps=kept + burn, n_trajectories=n_trajectories,
                   seed=seed, burn_in=burn, psd_segments=n_segments)


@dataclass(frozen=True)
class TrajectoryOutput:
    """Decimated right-port output samples for every trajectory.

    ``output_field`` has shape (n_trajectories, (n_steps - burn_in)//decimation)
    and ``sampling`` is the decimated step base_dt * decimation.
    ``mech_abs2`` (optional) holds the per-trajectory time average of |c|^2.
    """

    output_field: np.ndarray
    sampling: float
    decimation: int
    base_dt: float
    mech_abs2: np.ndarray | None = None

    def __post_init__(self):
        if not np.all(np.isfinite(self.output_field)):
            raise StepSizeError("trajectory diverged: non-finite output samples")


def _channel_variance(baths: BathSpec, channel: str) -> float:
    """Symmetrized strength n + w/2 of one input channel."""
    table = {
        "right": baths.n_r + baths.alpha_r / 2.0,
        "left": baths.n_l + baths.alpha_l / 2.0,
        "intrinsic": baths.n_i + baths.alpha_i / 2.0,
        "mechanical": baths.n_m + baths.beta / 2.0,
    }
    try:
        return table[channel]
    except KeyError:
        raise ConfigError(f"unknown channel {channel!r}; expected one of {_CHANNELS}") from None


def synthesize_input_noise(baths: BathSpec, channel: str, dt: float,
                           rng: np.random.Generator, n_samples: int) -> np.ndarray:
    """Discrete complex white noise with per-sample variance (n + w/2)/dt.

    Real and imaginary parts are independent with half the variance each, so
    <xi* xi> per sample matches the symmetrized continuum correlator.
    """
    if dt <= 0:
        raise ConfigError("dt must be positive")
    var = _channel_variance(baths, channel) / dt
    z = rng.standard_normal((n_samples, 2))
    return math.sqrt(var / 2.0) * (z[:, 0] + 1j * z[:, 1])


def _drive_terms(params: SystemParams, config: ToneConfig) -> tuple[float, float, float, float, float]:
    """(G+, G-, G_cool, delta, delta_c) in rad/s for the integrator."""
    gp = gm = gc = 0.0
    for tone in config.tones:
        if tone.role == "red_probe":
            gp = tone.coupling_rate(params)
        elif tone.role == "blue_probe":
            gm = tone.coupling_rate(params)
        elif tone.role == "cooling":
            gc = tone.coupling_rate(params)
        else:
            raise ConfigError(
                "generic-role tones are ambiguous for time-domain integration; "
                "use red_probe/blue_probe/cooling"
            )
    delta_c = config.delta_c if config.delta_c is not None else 0.0
    return gp, gm, gc, config.delta, delta_c


def _kernel_numpy(d, c, zr, zo, zm, pp, pc, consts, dec, out, out_col, record, mech_acc):
    # output samples use the midpoint (d_k + d_{k+1})/2, which restores the
    # continuum input-output interference to O((kappa dt)^2)
    dt, half_kappa, half_gamma, gp, gm, gc, sqrt_kr, inv_dt = consts
    nsteps = zr.shape[0]
    acc = np.zeros(d.shape, dtype=np.complex128)
    k = 0
    m = out_col
    for s in range(nsteps):
        p = pp[s]
        q = pc[s]
        cd = np.conj(d)
        cc = np.conj(c)
        drift_d = -half_kappa * d - 1j * (gp * p * c + gm * np.conj(p) * cc + gc * q * c)
        drift_c = -half_gamma * c - 1j * (np.conj(p) * (gp * d + gm * cd) + gc * np.conj(q) * d)
        d_new = d + dt * drift_d - sqrt_kr * zr[s] - zo[s]
        c_new = c + dt * drift_c - zm[s]
        if record:
            acc += zr[s] * inv_dt + sqrt_kr * 0.5 * (d + d_new)
        d[:] = d_new
        c[:] = c_new
        if mech_acc is not None:
            mech_acc += np.abs(c) ** 2
        if record:
            k += 1
            if k == dec:
                out[:, m] = acc / dec
                acc[:] = 0.0
                k = 0
                m += 1
    return m


if _HAVE_NUMBA:

    @_numba.njit(cache=True, nogil=True)
    def _kernel_jit(d, c, zr, zo, zm, pp, pc, dt, half_kappa, half_gamma, gp, gm, gc,
                    sqrt_kr, inv_dt, dec, out, out_col, record, mech_acc, track_mech):
        nsteps, nb = zr.shape
        acc = np.zeros(nb, dtype=np.complex128)
        k = 0
        m = out_col
        for s in range(nsteps):
            p = pp[s]
            q = pc[s]
            pbar = p.conjugate()
            qbar = q.conjugate()
            for j in range(nb):
                dj = d[j]
                cj = c[j]
                drift_d = -half_kappa * dj - 1j * (gp * p * cj + gm * pbar * cj.conjugate() + gc * q * cj)
                drift_c = -half_gamma * cj - 1j * (pbar * (gp * dj + gm * dj.conjugate()) + gc * qbar * dj)
                d_new = dj + dt * drift_d - sqrt_kr * zr[s, j] - zo[s, j]
                c_new = cj + dt * drift_c - zm[s, j]
                if record:
                    # midpoint output sample restores the continuum
                    # input-output interference to O((kappa dt)^2)
                    acc[j] += zr[s, j] * inv_dt + sqrt_kr * 0.5 * (dj + d_new)
                d[j] = d_new
                c[j] = c_new
                if track_mech:
                    mech_acc[j] += c_new.real * c_new.real + c_new.imag * c_new.imag
            if record:
                k += 1
                if k == dec:
                    for j in range(nb):
                        out[j, m] = acc[j] / dec
                        acc[j] = 0.0
                    k = 0
                    m += 1
        return m


def _run_block(params, baths, config, sim, decimate, traj_indices, record_mech):
    """Integrate one block of trajectories; returns (output_block, mech_means)."""
    dt = sim.dt
    gp, gm, gc, delta, delta_c = _drive_terms(params, config)
    nb = len(traj_indices)
    kept_steps = sim.n_steps - sim.burn_in
    n_out = kept_steps // decimate

    scale_r = math.sqrt(_channel_variance(baths, "right") * dt / 2.0)
    var_other = (params.kappa_l * _channel_variance(baths, "left")
                 + params.kappa_i * _channel_variance(baths, "intrinsic"))
    scale_o = math.sqrt(var_other * dt / 2.0)
    scale_m = math.sqrt(params.gamma_m * _channel_variance(baths, "mechanical") * dt / 2.0)

    rngs = [np.random.Generator(np.random.Philox(np.random.SeedSequence(sim.seed, spawn_key=(int(j),))))
            for j in traj_indices]

    d = np.zeros(nb, dtype=np.complex128)
    c = np.zeros(nb, dtype=np.complex128)
    out = np.empty((nb, n_out), dtype=np.complex128)
    mech_acc = np.zeros(nb, dtype=np.float64)

    consts = (dt, params.kappa / 2.0, params.gamma_m / 2.0, gp, gm, gc,
              math.sqrt(params.kappa_r), 1.0 / dt)

    base_chunk = 8192
    chunk = max(decimate, decimate * (base_chunk // decimate))
    out_col = 0
    step = 0
    while step < sim.n_steps:
        recording = step >= sim.burn_in
        if recording:
            n = min(chunk, sim.n_steps - step)
        else:
            n = min(chunk, sim.burn_in - step)
        z = np.empty((n, nb, 6))
        for jj, rng in enumerate(rngs):
            z[:, jj, :] = rng.standard_normal((n, 6))
        zr = scale_r * (z[:, :, 0] + 1j * z[:, :, 1])
        zo = scale_o * (z[:, :, 2] + 1j * z[:, :, 3])
        zm = scale_m * (z[:, :, 4] + 1j * z[:, :, 5])
        t = (step + np.arange(n)) * dt
        pp = np.exp(1j * delta * t)
        pc = np.exp(1j * delta_c * t)
        if _HAVE_NUMBA:
            out_col = _kernel_jit(d, c, zr, zo, zm, pp, pc, *consts, decimate, out,
                                  out_col, recording, mech_acc,
                                  record_mech and recording)
        else:
            out_col = _kernel_numpy(d, c, zr, zo, zm, pp, pc, consts, decimate, out,
                                    out_col, recording,
                                    mech_acc if (record_mech and recording) else None)
        step += n

    mech_means = mech_acc / kept_steps if record_mech else None
    return out[:, :out_col], mech_means


def integrate_langevin(params: SystemParams, baths: BathSpec, config: ToneConfig,
                       sim: SimConfig, *, decimate: int = 1, record_mech: bool = False,
                       threads: int | None = None) -> TrajectoryOutput:
    """Euler-Maruyama integration of the coupled cavity/mechanics envelopes.

    All configured tones are applied with their rotating phases
    (e^{-+i delta t} beamsplitter / two-mode-squeezing pair, e^{-i delta_c t}
    cooling). Deterministic for a fixed seed. ``decimate`` boxcar-averages
    the output to a lower sampling rate; ``estimate_psd`` compensates the
    boxcar response.
    """
    params.require_good_cavity()
    validate_stability(params, config)
    gamma_tot = config.gamma_tot(params)
    if sim.dt * params.kappa >= 0.05:
        raise StepSizeError(
            f"step gate dt*kappa < 0.05 violated (dt*kappa = {sim.dt * params.kappa:.3g})"
        )
    if sim.dt * gamma_tot >= 1e-3:
        raise StepSizeError(
            f"step gate dt*gamma_tot < 1e-3 violated (dt*gamma_tot = {sim.dt * gamma_tot:.3g})"
        )
    if sim.n_steps * sim.dt <= 50.0 / gamma_tot:
        raise StepSizeError(
            "length gate n_steps*dt > 50/gamma_tot violated "
            f"(T = {sim.n_steps * sim.dt:.3g}, 50/gamma_tot = {50.0 / gamma_tot:.3g})"
        )
    if decimate < 1:
        raise ConfigError("decimate must be >= 1")

    if threads is None:
        threads = int(os.environ.get("SIDEBAND_LAB_THREADS", "1") or "1")
    threads = max(1, min(threads, sim.n_trajectories))

    indices = np.arange(sim.n_trajectories)
    if threads == 1:
        blocks = [_run_block(params, baths, config, sim, decimate, indices, record_mech)]
    else:
        parts = np.array_split(indices, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_run_block, params, baths, config, sim, decimate,
                                   part, record_mech) for part in parts if part.size]
            blocks = [f.result() for f in futures]

    out = np.vstack([b[0] for b in blocks])
    mech = np.concatenate([b[1] for b in blocks]) if record_mech else None
    return TrajectoryOutput(output_field=out, sampling=sim.dt * decimate,
                            decimation=decimate, base_dt=sim.dt, mech_abs2=mech)


def _welch_spectrum(traj: TrajectoryOutput, psd_segments: int) -> tuple[Spectrum, int]:
    # The boxcar-decimated white background folds back to an exactly flat
    # density, so no response compensation is applied; narrowband features are
    # attenuated by |H(f)|^2 < 1, kept below ~0.3% by the oversampling margin
    # in choose_decimation.
    kept = traj.output_field.shape[1]
    ntraj = traj.output_field.shape[0]
    segs_per_traj = max(1, math.ceil(psd_segments / ntraj))
    nperseg = min(kept, max(8, int(2 * kept / (segs_per_traj + 1))))
    # shrink until the 50%-overlap segment count actually reaches the request
    while nperseg > 8:
        total = ntraj * (1 + max(0, kept - nperseg) // max(1, nperseg - nperseg // 2))
        if total >= psd_segments:
            break
        nperseg -= max(1, nperseg // 50)
    noverlap = nperseg // 2
    f, pxx = _signal.welch(traj.output_field, fs=1.0 / traj.sampling, window="hann",
                           nperseg=nperseg, noverlap=noverlap, detrend=False,
                           return_onesided=False, scaling="density", axis=-1)
    pxx = pxx.mean(axis=0)
    # engineer's +f axis holds e^{+i 2 pi f t} content; the physics convention
    # f(omega) = int f(t) e^{i omega t} dt places it at omega = -2 pi f
    offsets = -TWO_PI * f
    order = np.argsort(offsets)
    n_segments = ntraj * (1 + max(0, (kept - nperseg)) // max(1, nperseg - noverlap))
    return Spectrum(offsets[order], pxx[order]), n_segments


def estimate_psd(traj: TrajectoryOutput, psd_segments: int) -> Spectrum:
    """Welch PSD of the output field in quanta (flat vacuum input gives 1/2).

    Two-sided over the decimated bandwidth, Hann window, 50% overlap,
    averaged over segments and trajectories, reported on the offset-from-
    cavity grid.
    """
    spec, _ = _welch_spectrum(traj, psd_segments)
    return spec


def choose_decimation(params: SystemParams, config: ToneConfig, sim: SimConfig,
                      *, window_linewidths: float = 12.0) -> int:
    """Largest decimation that keeps the peaks well inside the folded band.

    32x oversampling of the outermost feature keeps the boxcar attenuation
    of a peak below ~0.32% (sinc^2 at 1/32 of the output rate).
    """
    gamma_tot = config.gamma_tot(params)
    span = abs(config.delta) + window_linewidths * gamma_tot
    fs_needed = 32.0 * span / TWO_PI
    return max(1, int(1.0 / (fs_needed * sim.dt)))


def _estimate_floor(spec: Spectrum, peak_centers, exclusion: float) -> float:
    """Median of the spectrum away from every peak (robust, kernel-agnostic)."""
    mask = np.ones(spec.freq_offsets.size, dtype=bool)
    for center in peak_centers:
        mask &= np.abs(spec.freq_offsets - center) > exclusion
    if not np.any(mask):
        mask[:] = True
    return float(np.median(spec.values[mask]))


def _measure_peak(spec: Spectrum, center: float, half_window: float, floor: float):
    """(weight, centroid) of one feature: tail-corrected trapezoid + first moment.

    Pure sample statistics, insensitive to the Welch kernel (the integral of a
    convolved peak is preserved), valid for dips (negative weight) too. The
    1/x^2 tail constants are estimated from edge bands (outer ~8% of the
    window per side) rather than single samples, which keeps the correction
    usable on noisy estimates.
    """
    mask = np.abs(spec.freq_offsets - center) <= half_window
    x = spec.freq_offsets[mask]
    v = spec.values[mask] - floor
    norm = np.trapezoid(np.abs(v), x)
    centroid = float(np.trapezoid(x * np.abs(v), x) / norm) if norm > 0 else center
    weight = np.trapezoid(v, x) / TWO_PI
    k = max(2, x.size // 12)
    for sl in (slice(0, k), slice(x.size - k, x.size)):
        c_tail = float(np.mean(v[sl] * (x[sl] - centroid) ** 2))
        edge = max(abs(float(np.mean(x[sl])) - centroid), 1e-300)
        weight += c_tail / edge / TWO_PI
    return float(weight), centroid


def oracle_compare(params: SystemParams, baths: BathSpec, config: ToneConfig,
                   sim: SimConfig, *, decimate: int | None = None,
                   threads: int | None = None,
                   window_linewidths: float = 8.0) -> tuple[dict, Spectrum]:
    """Run the stochastic oracle and compare against the analytic spectra.

    Returns (report, mc_spectrum): a JSON-ready report with analytic and
    Monte-Carlo Lorentzian weights, floors and centers for every sideband
    present, plus the estimated spectrum. Disagreement is reported as-is;
    nothing is rescaled.
    """
    from .config import describe_run

    if decimate is None:
        decimate = choose_decimation(params, config, sim)
    traj = integrate_langevin(params, baths, config, sim, decimate=decimate,
                              threads=threads)
    spec, n_segments = _welch_spectrum(traj, sim.psd_segments)
    gamma_tot = config.gamma_tot(params)
    half_window = window_linewidths * gamma_tot

    peaks = []
    if config.has_probe_pair:
        w_anti, w_stokes = sideband_weights(params, baths, config, "symmetrized")
        peaks.append(("anti_stokes", -config.delta, w_anti))
        peaks.append(("stokes", +config.delta, w_stokes))
    else:
        single = [t for t in config.tones if t.role in ("red_probe", "blue_probe")]
        if len(single) != 1:
            raise ConfigError("oracle_compare needs a probe pair or a single probe tone")
        tone = single[0]
        sign = +1 if tone.role == "red_probe" else -1
        w = single_tone_integrated_weight(params, baths, tone, sign, "symmetrized")
        peaks.append(("peak", -config.delta if sign == +1 else config.delta, w))

    floor_analytic = noise_floor(params, baths)
    mc_floor = _estimate_floor(spec, [c for _, c, _ in peaks], 1.5 * half_window)
    report = {
        "config_hash": describe_run(params, baths, config, sim)["config_hash"],
        "seed": sim.seed,
        "rng": RNG_ALGORITHM,
        "n_segments": int(n_segments),
        "decimation": int(decimate),
        "analytic_floor": floor_analytic,
        "mc_floor": mc_floor,
        "floor_rel_err": abs(mc_floor - floor_analytic) / abs(floor_analytic),
        "analytic_weight": {},
        "mc_weight": {},
        "rel_err": {},
        "mc_center": {},
    }
    for name, center, w_analytic in peaks:
        w_mc, centroid = _measure_peak(spec, center, half_window, mc_floor)
        report["analytic_weight"][name] = w_analytic
        report["mc_weight"][name] = w_mc
        report["rel_err"][name] = abs(w_mc - w_analytic) / abs(w_analytic) if w_analytic else math.inf
        report["mc_center"][name] = centroid
    return report, spec
