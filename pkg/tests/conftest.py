import math

import numpy as np
import pytest

from sideband_lab.model import TWO_PI, BathSpec, SystemParams, ToneConfig, ToneSpec


def make_params(*, kappa_l_hz=155e3, kappa_r_hz=450e3, kappa_i_hz=265e3,
                gamma_m_hz=10.0, omega_m_hz=4.0e6, g0_hz=16.0,
                omega_c_hz=5.4e9, x_zp_m=None) -> SystemParams:
    return SystemParams.from_hz(
        omega_c_hz=omega_c_hz, omega_m_hz=omega_m_hz, g0_hz=g0_hz,
        kappa_l_hz=kappa_l_hz, kappa_r_hz=kappa_r_hz, kappa_i_hz=kappa_i_hz,
        gamma_m_hz=gamma_m_hz, x_zp_m=x_zp_m,
    )


def tone_with_gamma_opt(params: SystemParams, gamma_opt: float, role: str,
                        detuning: float | None = None) -> ToneSpec:
    """Probe tone with an exact target optical damping rate."""
    g = math.sqrt(gamma_opt * params.kappa) / 2.0
    if detuning is None:
        detuning = -params.omega_m if role != "blue_probe" else params.omega_m
    return ToneSpec(detuning=detuning, role=role, coupling=g)


def random_system(rng: np.random.Generator, *, kappa_i_zero=False,
                  good_cavity_factor=50.0) -> SystemParams:
    """Random but physically sane device constants (rates in rad/s)."""
    kappa_l = rng.uniform(0.05, 1.0) * TWO_PI * 1e5
    kappa_r = rng.uniform(0.05, 1.0) * TWO_PI * 1e5
    kappa_i = 0.0 if kappa_i_zero else rng.uniform(0.0, 0.5) * TWO_PI * 1e5
    kappa = kappa_l + kappa_r + kappa_i
    return SystemParams(
        omega_c=TWO_PI * 5e9,
        omega_m=good_cavity_factor * kappa,
        g0=TWO_PI * 20.0,
        kappa_l=kappa_l, kappa_r=kappa_r, kappa_i=kappa_i,
        gamma_m=rng.uniform(5.0, 100.0) * TWO_PI,
    )


def random_baths(rng: np.random.Generator, *, max_n=5.0) -> BathSpec:
    return BathSpec(
        n_r=rng.uniform(0, max_n), n_l=rng.uniform(0, max_n),
        n_i=rng.uniform(0, max_n), n_m=rng.uniform(0, 100.0),
    )


def balanced_config(params: SystemParams, *, delta: float, probe_gamma_opt: float,
                    delta_c: float | None = None, cooling_gamma_opt: float = 0.0,
                    allow_small_separation: bool = True) -> ToneConfig:
    return ToneConfig.balanced(
        params, delta=delta, probe_gamma_opt=probe_gamma_opt, delta_c=delta_c,
        cooling_gamma_opt=cooling_gamma_opt,
        allow_small_separation=allow_small_separation,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
