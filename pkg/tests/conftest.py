import numpy as np
import pytest

from xpair.kinematics import ElectronState, ScatterConfig
from xpair.units import kev_to_natural


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_config_arrays(rng, n, beta_max=0.9995, omega_kev=(1.0, 1000.0),
                         omega1_frac=(0.02, 0.98)):
    """Vectorized random physical configurations with omega1 inside
    (0, omega1_max). Returns a dict of arrays."""
    beta = rng.uniform(0.0, beta_max, n)
    gamma = 1.0 / np.sqrt(1.0 - beta**2)
    omega = kev_to_natural(np.exp(rng.uniform(np.log(omega_kev[0]),
                                              np.log(omega_kev[1]), n)))
    alpha = np.arccos(rng.uniform(-1, 1, n))
    t1p = np.arccos(rng.uniform(-1, 1, n))
    t2p = np.arccos(rng.uniform(-1, 1, n))
    f1p = rng.uniform(0, 2 * np.pi, n)
    f2p = rng.uniform(0, 2 * np.pi, n)
    ct1 = np.cos(alpha) * np.cos(t1p) + np.sin(alpha) * np.sin(t1p) * np.cos(f1p)
    w1max = (gamma * omega * (1 - beta * np.cos(alpha))
             / (gamma * (1 - beta * np.cos(t1p)) + omega * (1 - ct1)))
    omega1 = w1max * rng.uniform(*omega1_frac, n)
    return dict(omega=omega, gamma=gamma, beta=beta, alpha=alpha,
                t1p=t1p, f1p=f1p, t2p=t2p, f2p=f2p, omega1=omega1,
                w1max=w1max)


def config_from_arrays(arrs, i) -> ScatterConfig:
    return ScatterConfig(float(arrs["omega"][i]), float(arrs["alpha"][i]),
                         float(arrs["t1p"][i]), float(arrs["f1p"][i]),
                         float(arrs["t2p"][i]), float(arrs["f2p"][i]),
                         ElectronState(float(arrs["gamma"][i])))


def fig2_config(omega1_unused=None) -> ScatterConfig:
    """The 100 keV fixed-target benchmark geometry."""
    return ScatterConfig(kev_to_natural(100.0), 0.0, 2.0, 0.0, 2.0, np.pi,
                         ElectronState(1.0))
