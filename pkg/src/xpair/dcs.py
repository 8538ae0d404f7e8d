"""Exact triple-differential cross section for incoherent double Compton
scattering (one photon in, two photons out, free electron).

The cross section is the Mandl-Skyrme QED result: six scalar invariants
kappa_i, kappa_i' built from the electron and photon four-momenta feed a
single rational function X, which multiplies a kinematic prefactor. The
function is evaluated in natural units and converted to b/(keV sr^2) at
the boundary.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kinematics as kin
from .errors import (
    ForbiddenKinematicsError,
    InconsistentKinematicsError,
    IRCutoffError,
)
from .units import ALPHA_QED, MC2_KEV, R0_BARN, kev_to_natural

# mask codes shared by the vectorized evaluator and the grid generators
MASK_OK = 0
MASK_FORBIDDEN = 1
MASK_IR_CUT = 2

_PREFACTOR = ALPHA_QED / (16.0 * math.pi**2)
_NAT_TO_BARN_KEV = R0_BARN / MC2_KEV


@dataclass
class KappaSet:
    """The six invariants: k_i from the initial electron momentum p,
    k_i' from the recoil momentum p'.

    k1 = -p.k1, k2 = -p.k2, k3 = +p.k, k1' = +p'.k1, k2' = +p'.k2,
    k3' = -p'.k. Physical configurations have k1, k2 > 0 and k3 < 0,
    and the two triples share the same sum (= 1 + p.p').
    """

    k1: float
    k2: float
    k3: float
    k1p: float
    k2p: float
    k3p: float

    def swapped(self) -> "KappaSet":
        """Invariants with the two final photons exchanged."""
        return KappaSet(self.k2, self.k1, self.k3, self.k2p, self.k1p, self.k3p)


@dataclass
class Abbreviations:
    """The eight scalar combinations of a KappaSet feeding X."""

    a: float
    b: float
    c: float
    x: float
    z: float
    A: float
    B: float
    rho: float


@dataclass
class XsecValue:
    value: float
    units: str


def kappa_components(omega, gamma, beta, alpha, theta1p, theta2p,
                     ct1, ct2, ct12, omega1, omega2):
    """All six invariants from angle formulas. Vectorized."""
    k1 = gamma * omega1 * (1.0 - beta * np.cos(theta1p))
    k2 = gamma * omega2 * (1.0 - beta * np.cos(theta2p))
    k3 = -gamma * omega * (1.0 - beta * np.cos(alpha))
    w_w1 = omega * omega1 * (1.0 - ct1)
    w_w2 = omega * omega2 * (1.0 - ct2)
    w1_w2 = omega1 * omega2 * (1.0 - ct12)
    k1p = -k1 - w_w1 + w1_w2
    k2p = -k2 - w_w2 + w1_w2
    k3p = -k3 - w_w1 - w_w2
    return k1, k2, k3, k1p, k2p, k3p


def kappas(cfg: kin.ScatterConfig, omega1: float, omega2: float,
           consistency_tol: float = 1e-9) -> KappaSet:
    """Invariants for a configuration, checking that (omega1, omega2)
    actually solve the conservation equations."""
    expected = kin.omega2(cfg, omega1)
    scale = max(expected, cfg.omega)
    if abs(omega2 - expected) > consistency_tol * scale:
        raise InconsistentKinematicsError(
            f"omega2 = {omega2:.9g} inconsistent with conservation "
            f"(expected {expected:.9g})")
    ct1, ct2, ct12 = kin.cos_emission_angles(cfg.alpha, cfg.theta1p, cfg.phi1p,
                                             cfg.theta2p, cfg.phi2p)
    ks = kappa_components(cfg.omega, cfg.gamma, cfg.beta, cfg.alpha,
                          cfg.theta1p, cfg.theta2p, ct1, ct2, ct12,
                          omega1, omega2)
    return KappaSet(*(float(k) for k in ks))


def kappas_from_four_vectors(p, k, k1, k2) -> KappaSet:
    """Invariants straight from four-vector dot products (p' = p+k-k1-k2)."""
    pp = p + k - k1 - k2
    return KappaSet(-p.dot(k1), -p.dot(k2), p.dot(k),
                    pp.dot(k1), pp.dot(k2), -pp.dot(k))


def abbreviations(ks: KappaSet) -> Abbreviations:
    k = (ks.k1, ks.k2, ks.k3)
    kp = (ks.k1p, ks.k2p, ks.k3p)
    a = sum(1.0 / ki for ki in k)
    b = sum(1.0 / ki for ki in kp)
    c = sum(1.0 / (k[i] * kp[i]) for i in range(3))
    x = sum(k)
    z = sum(k[i] * kp[i] for i in range(3))
    A = k[0] * k[1] * k[2]
    B = kp[0] * kp[1] * kp[2]
    rho = sum(k[i] / kp[i] + kp[i] / k[i] for i in range(3))
    return Abbreviations(a, b, c, x, z, A, B, rho)


def _neumaier_sum(terms):
    """Compensated sum of a fixed list of arrays (or scalars)."""
    total = np.asarray(terms[0], dtype=float).copy()
    comp = np.zeros_like(total)
    for t in terms[1:]:
        t = np.asarray(t, dtype=float)
        s = total + t
        comp += np.where(np.abs(total) >= np.abs(t),
                         (total - s) + t, (t - s) + total)
        total = s
    return total + comp


def _x_terms(k1, k2, k3, k1p, k2p, k3p):
    """The five term groups of X, kept separate for compensated summation.

    The large positive and negative groups cancel heavily near the
    phase-space edges, which is why the pieces are summed with a
    Neumaier loop instead of a bare chain of additions.
    """
    a = 1.0 / k1 + 1.0 / k2 + 1.0 / k3
    b = 1.0 / k1p + 1.0 / k2p + 1.0 / k3p
    c = 1.0 / (k1 * k1p) + 1.0 / (k2 * k2p) + 1.0 / (k3 * k3p)
    x = k1 + k2 + k3
    z = k1 * k1p + k2 * k2p + k3 * k3p
    A = k1 * k2 * k3
    B = k1p * k2p * k3p
    # grouped so the float evaluation is bit-identical under photon swap
    rho = ((k1 / k1p + k2 / k2p) + k3 / k3p) \
        + ((k1p / k1 + k2p / k2) + k3p / k3)
    ab_c = a * b - c
    t1 = 2.0 * ab_c * ((a + b) * (x + 2.0) - ab_c - 8.0)
    t2 = -2.0 * x * (a * a + b * b)
    t3 = -8.0 * c
    t4 = (4.0 / (A * B)) * ((A + B) * (x * x + x)
                            - (a * A + b * B) * (2.0 * x + z * (1.0 - x))
                            + x**3 * (1.0 - z) + 2.0 * z * x)
    t5 = -2.0 * rho * (a * b + c * (1.0 - x))
    return t1, t2, t3, t4, t5


def x_function(ks: KappaSet) -> float:
    """The double Compton cross-section function X of the six invariants.

    Diverges as either final photon becomes soft (the infrared
    catastrophe of the uncorrected perturbative result); symmetric
    under exchange of the two final photons; non-negative on physical
    configurations.
    """
    A = ks.k1 * ks.k2 * ks.k3
    B = ks.k1p * ks.k2p * ks.k3p
    if A == 0.0 or B == 0.0:
        raise IRCutoffError("vanishing invariant product: infrared/collinear "
                            "singularity of X")
    terms = _x_terms(ks.k1, ks.k2, ks.k3, ks.k1p, ks.k2p, ks.k3p)
    return float(_neumaier_sum(list(terms)))


def xsec_density(omega, gamma, beta, alpha, omega1, theta1p, phi1p,
                 theta2p, phi2p, ir_cutoff=0.0):
    """Vectorized d^3(sigma)/(domega1 dOmega1' dOmega2') in b/(keV sr^2).

    All energies in natural units. Returns (value, omega2, mask); masked
    entries carry value 0 with MASK_FORBIDDEN where conservation cannot
    be satisfied and MASK_IR_CUT where omega1 or omega2 falls below
    ir_cutoff.
    """
    ct1, ct2, ct12 = kin.cos_emission_angles(alpha, theta1p, phi1p,
                                             theta2p, phi2p)
    num, den = kin.omega2_terms(omega, gamma, beta, alpha, theta1p, theta2p,
                                ct1, ct2, ct12, omega1)
    num, den, w1b = np.broadcast_arrays(num, den,
                                        np.asarray(omega1, dtype=float))
    allowed = (num > 0.0) & (den > 0.0) & (w1b > 0.0)
    safe_den = np.where(den > 0.0, den, 1.0)
    omega2 = np.where(allowed, num / safe_den, 0.0)

    ir = allowed & ((w1b < ir_cutoff) | (omega2 < ir_cutoff))
    mask = np.where(allowed, MASK_OK, MASK_FORBIDDEN).astype(np.uint8)
    mask = np.where(ir, MASK_IR_CUT, mask)
    ok = mask == MASK_OK

    w1 = np.where(ok, w1b, 1.0)
    w2 = np.where(ok, omega2, 1.0)
    comps = kappa_components(omega, gamma, beta, alpha, theta1p, theta2p,
                             ct1, ct2, ct12, w1, w2)
    k1, k2, k3, k1p, k2p, k3p = (
        np.where(ok, np.broadcast_to(v, omega2.shape), 1.0) for v in comps)
    X = _neumaier_sum(list(_x_terms(k1, k2, k3, k1p, k2p, k3p)))
    flux = gamma * omega * (1.0 - beta * np.cos(alpha))
    value = _PREFACTOR * X * w1 * w2 / (flux * safe_den)
    value = np.where(ok, value * _NAT_TO_BARN_KEV, 0.0)
    return value, omega2, mask


def triple_diff_xsec(cfg: kin.ScatterConfig, omega1: float,
                     ir_cutoff_kev: float | None = None) -> XsecValue:
    """d^3(sigma)/(domega1 dOmega1' dOmega2') at one phase-space point.

    omega1 in natural units; result in b/(keV sr^2). Raises
    ForbiddenKinematicsError outside (0, omega1_max) and IRCutoffError
    if a cutoff is given and either photon falls below it.
    """
    if omega1 <= 0:
        raise ForbiddenKinematicsError(f"omega1 must be positive, got {omega1}")
    w2 = kin.omega2(cfg, omega1)   # raises if forbidden
    if ir_cutoff_kev is not None:
        eps = kev_to_natural(ir_cutoff_kev)
        if omega1 <= eps or w2 <= eps:
            raise IRCutoffError(
                f"point within {ir_cutoff_kev} keV of an infrared edge "
                f"(omega1, omega2) = ({omega1:.3e}, {w2:.3e}) natural")
    value, _, mask = xsec_density(cfg.omega, cfg.gamma, cfg.beta, cfg.alpha,
                                  omega1, cfg.theta1p, cfg.phi1p,
                                  cfg.theta2p, cfg.phi2p)
    if int(mask) != MASK_OK:
        raise ForbiddenKinematicsError("configuration outside phase space")
    return XsecValue(float(value), "b/(keV sr^2)")


def triple_diff_xsec_natural(cfg: kin.ScatterConfig, omega1: float) -> float:
    """Same as triple_diff_xsec but in natural units."""
    return triple_diff_xsec(cfg, omega1).value / _NAT_TO_BARN_KEV


def same_direction_double_diff(cfg: kin.ScatterConfig, omega1: float,
                               ir_cutoff_kev: float | None = None) -> XsecValue:
    """d^2(sigma)/(domega1 dOmega) for both photons in one solid angle.

    Defined for collinear detector settings only (theta1' = theta2',
    phi1' = phi2') as 4 pi times the triple-differential value; result
    in b/(keV sr).
    """
    if not (math.isclose(cfg.theta1p, cfg.theta2p, abs_tol=1e-12)
            and math.isclose(cfg.phi1p, cfg.phi2p, abs_tol=1e-12)):
        raise ValueError("same-direction cross section requires collinear "
                         "detector settings")
    triple = triple_diff_xsec(cfg, omega1, ir_cutoff_kev)
    return XsecValue(4.0 * math.pi * triple.value, "b/(keV sr)")
