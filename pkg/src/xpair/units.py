"""Natural units (hbar = m_e = c = 1) and conversions to laboratory units.

All scattering formulas in this package work in natural units, where
energies are measured in units of the electron rest energy. Conversions
to keV, barns, volts etc. happen only at the I/O boundary.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-level constants, rounded where only a few digits matter."""

    r0_m: float = 2.8179403262e-15          # classical electron radius [m]
    alpha_qed: float = 7.2973525693e-3      # fine-structure constant
    mc2_keV: float = 510.999                # electron rest energy [keV]
    barn_per_m2: float = 1e28
    kB_eV_per_K: float = 8.617333262e-5     # Boltzmann constant [eV/K]
    hbar_eV_s: float = 6.582e-16            # hbar [eV s]
    c_m_s: float = 299792458.0
    eps0_F_m: float = 8.8541878128e-12
    e_C: float = 1.602176634e-19
    hc_eV_nm: float = 1239.841984           # photon energy * wavelength

    @property
    def r0_squared_barn(self) -> float:
        return self.r0_m**2 * self.barn_per_m2


CONSTANTS = PhysicalConstants()

MC2_KEV = CONSTANTS.mc2_keV
MC2_EV = MC2_KEV * 1e3
R0_BARN = CONSTANTS.r0_squared_barn
ALPHA_QED = CONSTANTS.alpha_qed

# Natural energy is a plain float: energy / (m_e c^2).
NaturalEnergy = float


def kev_to_natural(energy_kev):
    """Photon energy in keV -> natural units. Rejects negative input."""
    e = np.asarray(energy_kev, dtype=float)
    if np.any(e < 0):
        raise ValueError(f"energy must be non-negative, got {energy_kev}")
    out = e / MC2_KEV
    return float(out) if out.ndim == 0 else out


def natural_to_kev(energy):
    e = np.asarray(energy, dtype=float)
    out = e * MC2_KEV
    return float(out) if out.ndim == 0 else out


def ev_to_natural(energy_ev):
    return kev_to_natural(np.asarray(energy_ev, dtype=float) * 1e-3)


def natural_to_ev(energy):
    return natural_to_kev(energy) * 1e3


def xsec_natural_to_barn_per_kev_sr2(value):
    """Cross-section density in natural units -> b/(keV sr^2).

    One natural unit of d^3(sigma)/domega corresponds to r0^2 per rest
    energy: the factor is r0^2[barn] / mc^2[keV].
    """
    v = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("cross-section value must be finite")
    out = v * (R0_BARN / MC2_KEV)
    return float(out) if out.ndim == 0 else out


def xsec_barn_per_kev_sr2_to_natural(value):
    v = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("cross-section value must be finite")
    out = v / (R0_BARN / MC2_KEV)
    return float(out) if out.ndim == 0 else out


def omega_tau_product(omega_L_ev: float, tau_L_fs: float) -> float:
    """Dimensionless omega_L * tau_L from an energy in eV and a duration in fs."""
    return omega_L_ev * tau_L_fs * 1e-15 / CONSTANTS.hbar_eV_s
