"""Deterministic damped Gauss-Newton least squares with analytic Jacobians.

One engine backs every fit in the calibration pipeline so that repeated runs
are bit-reproducible: no stochastic restarts, fixed damping schedule, fixed
iteration and convergence thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateData, NonConvergence
from .model import Spectrum

__all__ = ["LorentzianFit", "gauss_newton", "fit_lorentzian"]

MAX_ITER = 200
STEP_TOL = 1e-10


def gauss_newton(residual_jac: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
                 x0: np.ndarray) -> tuple[np.ndarray, np.ndarray, float, int]:
    """Minimize ||r(x)||^2 given r and its Jacobian dr/dx.

    Damped Gauss-Newton: solve (J^T J + lam*diag(J^T J)) step = -J^T r,
    increase lam tenfold on a rejected step, relax threefold on acceptance.
    Converged when the relative step norm drops below 1e-10; raises
    NonConvergence after 200 iterations. Returns (x, covariance,
    residual_norm, n_iter); the covariance is s^2 (J^T J)^-1 with
    s^2 = RSS/(N - p).
    """
    x = np.asarray(x0, dtype=float).copy()
    r, jac = residual_jac(x)
    cost = float(r @ r)
    lam = 0.0
    for iteration in range(1, MAX_ITER + 1):
        jtj = jac.T @ jac
        jtr = jac.T @ r
        diag = np.diag(np.maximum(np.diag(jtj), 1e-300))
        accepted = False
        for _ in range(25):
            try:
                step = np.linalg.solve(jtj + lam * diag, -jtr)
            except np.linalg.LinAlgError:
                raise DegenerateData("normal equations are singular") from None
            r_new, jac_new = residual_jac(x + step)
            cost_new = float(r_new @ r_new)
            if np.isfinite(cost_new) and cost_new <= cost:
                accepted = True
                break
            lam = 10.0 * lam if lam > 0.0 else 1e-4
        if not accepted:
            raise NonConvergence(f"no acceptable step after iteration {iteration}")
        rel_step = np.linalg.norm(step) / max(np.linalg.norm(x), 1e-300)
        x = x + step
        r, jac, cost = r_new, jac_new, cost_new
        lam /= 3.0
        if rel_step < STEP_TOL:
            break
    else:
        raise NonConvergence(f"no convergence in {MAX_ITER} iterations")
    dof = max(r.size - x.size, 1)
    try:
        cov = np.linalg.inv(jac.T @ jac) * (cost / dof)
    except np.linalg.LinAlgError:
        cov = np.full((x.size, x.size), np.nan)
    return x, cov, float(np.sqrt(cost)), iteration


@dataclass(frozen=True)
class LorentzianFit:
    """Peak parameters of floor + amplitude/(1 + ((x - center)/(width/2))^2).

    ``width`` is the FWHM; ``covariance`` is ordered (center, width,
    amplitude, floor).
    """

    center: float
    width: float
    amplitude: float
    floor: float
    residual_norm: float
    covariance: np.ndarray

    def __post_init__(self):
        if self.width <= 0:
            raise DegenerateData(f"non-positive fitted width {self.width!r}")

    def uncertainty(self, name: str) -> float:
        idx = {"center": 0, "width": 1, "amplitude": 2, "floor": 3}[name]
        return float(np.sqrt(self.covariance[idx, idx]))


def _lorentzian_initial_guess(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    floor = float(np.median(np.concatenate([v[: max(2, x.size // 10)],
                                            v[-max(2, x.size // 10):]])))
    dev = v - floor
    peak_idx = int(np.argmax(np.abs(dev)))
    amp = float(dev[peak_idx])
    span = x[-1] - x[0]
    if abs(amp) < 1e-12 * max(np.max(np.abs(v)), 1.0) or span <= 0:
        raise DegenerateData("flat spectrum: no peak to fit")
    half = np.abs(dev) >= abs(amp) / 2.0
    width = max(x[half][-1] - x[half][0], span / x.size)
    return np.array([x[peak_idx], width, amp, floor])


def fit_lorentzian(spec: Spectrum, init: LorentzianFit | None = None) -> LorentzianFit:
    """Four-parameter Lorentzian least squares on a spectrum window.

    Initialization from a peak/half-maximum scan when ``init`` is absent;
    dips (negative amplitude) are handled. Needs at least 20 points.
    """
    x = spec.freq_offsets
    v = spec.values
    if x.size < 20:
        raise DegenerateData(f"need >= 20 points to fit, got {x.size}")
    if np.ptp(v) <= 1e-14 * max(np.max(np.abs(v)), 1.0):
        raise DegenerateData("flat spectrum: no peak to fit")
    if init is not None:
        x0 = np.array([init.center, init.width, init.amplitude, init.floor])
    else:
        x0 = _lorentzian_initial_guess(x, v)

    def residual_jac(p):
        center, width, amp, floor = p
        width = max(abs(width), 1e-300)
        dx = x - center
        denom = dx**2 + width**2 / 4.0
        shape = (width**2 / 4.0) / denom
        model = floor + amp * shape
        r = model - v
        jac = np.empty((x.size, 4))
        jac[:, 0] = amp * (width**2 / 4.0) * 2.0 * dx / denom**2
        jac[:, 1] = amp * (width / 2.0) * dx**2 / denom**2
        jac[:, 2] = shape
        jac[:, 3] = 1.0
        return r, jac

    p, cov, rnorm, _ = gauss_newton(residual_jac, x0)
    return LorentzianFit(center=float(p[0]), width=float(abs(p[1])),
                         amplitude=float(p[2]), floor=float(p[3]),
                         residual_norm=rnorm, covariance=cov)
