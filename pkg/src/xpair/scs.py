"""Inverse single Compton scattering: cross section, scattered energy,
and the pulse-broadened double-differential spectrum used as the
comparison baseline for the two-photon channel.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .kinematics import ElectronState
from .units import MC2_KEV, R0_BARN, omega_tau_product


@dataclass
class SingleComptonConfig:
    """Laser photon on a (possibly relativistic) electron.

    omega_L in natural units, alpha the incidence angle to the electron
    axis, thetap the observation angle about the electron axis, tau_L
    the laser pulse duration in fs (enters only through the
    dimensionless product omega_L * tau_L).
    """

    omega_L: float
    alpha: float
    thetap: float
    tau_L_fs: float = 50.0
    electron: ElectronState = field(default_factory=ElectronState)

    def __post_init__(self):
        if self.omega_L <= 0:
            raise ValueError("omega_L must be positive")
        if self.tau_L_fs <= 0:
            raise ValueError("tau_L must be positive")

    @property
    def gamma(self):
        return self.electron.gamma

    @property
    def beta(self):
        return self.electron.beta

    @property
    def omega_tau(self) -> float:
        """Dimensionless omega_L * tau_L (bandwidth parameter)."""
        return omega_tau_product(self.omega_L * MC2_KEV * 1e3, self.tau_L_fs)


def omega_prime(cfg: SingleComptonConfig):
    """Scattered photon energy at observation angle thetap, natural units.

    The recoil term uses the incidence angle alpha for the photon-photon
    angle, which is exact for on-axis observation (thetap = 0) and a
    near-axis approximation otherwise; for an electron at rest alpha
    plays the role of the scattering angle.
    """
    g, b = cfg.gamma, cfg.beta
    num = g * cfg.omega_L * (1.0 - b * np.cos(cfg.alpha))
    den = g * (1.0 - b * np.cos(cfg.thetap)) + cfg.omega_L * (1.0 - np.cos(cfg.alpha))
    return num / den


def single_diff_xsec(cfg: SingleComptonConfig):
    """d(sigma)/dOmega' for unpolarized photons, in b/sr.

    Evaluated from the two invariants kappa = p.k and kappa' = p.k'
    (both negative with this signature; the signs are kept as they are).
    Reduces to Klein-Nishina for an electron at rest and to Thomson
    scattering in the soft limit.
    """
    g, b = cfg.gamma, cfg.beta
    wp = omega_prime(cfg)
    kap = -g * cfg.omega_L * (1.0 - b * np.cos(cfg.alpha))
    kapp = -g * wp * (1.0 - b * np.cos(cfg.thetap))
    bracket = (kapp / kap + kap / kapp
               + 2.0 * (1.0 / kapp - 1.0 / kap)
               + (1.0 / kap - 1.0 / kapp) ** 2)
    return (R0_BARN / 2.0) * (wp / kap) ** 2 * bracket


def spectral_G(omega, cfg: SingleComptonConfig):
    """Normalized spectral function of the finite-pulse laser, per keV.

    A Gaussian of relative width 1/(omega_L tau_L) centered on
    omega_prime; integrates to 1 over omega. omega in natural units.
    """
    wt = cfg.omega_tau
    wp = omega_prime(cfg)
    g_natural = (wt / (wp * math.sqrt(2.0 * math.pi))
                 * np.exp(-0.5 * wt**2 * (omega / wp - 1.0) ** 2))
    return g_natural / MC2_KEV


def single_double_diff(omega, cfg: SingleComptonConfig):
    """d^2(sigma)/(domega dOmega'), b/(keV sr): cross section times G."""
    return single_diff_xsec(cfg) * spectral_G(omega, cfg)
