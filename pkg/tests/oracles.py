"""Independent oracles used by the test suite.

Everything here is deliberately written against the formulas a second
time, in a different style (mpmath high precision, explicit component
arithmetic, brute-force quadrature), so that agreement with the package
is evidence against transcription errors rather than a tautology.
"""

import math

import mpmath as mp
import numpy as np
from scipy.optimize import brentq

mp.mp.dps = 50


# ---------------------------------------------------------------------------
# second transcription of the cross-section function, high precision

def x_function_reference(k1, k2, k3, k1p, k2p, k3p) -> float:
    """X evaluated with 50-digit arithmetic, term by term."""
    k = [mp.mpf(v) for v in (k1, k2, k3)]
    kp = [mp.mpf(v) for v in (k1p, k2p, k3p)]
    a = mp.fsum(1 / v for v in k)
    b = mp.fsum(1 / v for v in kp)
    c = mp.fsum(1 / (k[i] * kp[i]) for i in range(3))
    x = mp.fsum(k)
    z = mp.fsum(k[i] * kp[i] for i in range(3))
    A = k[0] * k[1] * k[2]
    B = kp[0] * kp[1] * kp[2]
    rho = mp.fsum([k[i] / kp[i] for i in range(3)]
                  + [kp[i] / k[i] for i in range(3)])
    total = mp.mpf(0)
    total += 2 * (a * b - c) * ((a + b) * (x + 2) - (a * b - c) - 8)
    total -= 2 * x * (a**2 + b**2)
    total -= 8 * c
    total += (4 / (A * B)) * ((A + B) * (x**2 + x)
                              - (a * A + b * B) * (2 * x + z * (1 - x))
                              + x**3 * (1 - z) + 2 * z * x)
    total -= 2 * rho * (a * b + c * (1 - x))
    return float(total)


# ---------------------------------------------------------------------------
# conservation solved by root finding on explicit components

def unit(theta, phi):
    return np.array([math.sin(theta) * math.cos(phi),
                     math.sin(theta) * math.sin(phi),
                     math.cos(theta)])


def mdot(a, b):
    return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]


def four(e, n):
    return np.array([e, e * n[0], e * n[1], e * n[2]])


def electron_four(gamma):
    gb = math.sqrt(gamma * gamma - 1.0)
    return np.array([gamma, 0.0, 0.0, gb])


def omega2_root(omega, gamma, alpha, t1p, f1p, t2p, f2p, omega1):
    """omega2 from the mass-shell residual of p' = p + k - k1 - k2."""
    p = electron_four(gamma)
    k = four(omega, unit(alpha, 0.0))
    k1 = four(omega1, unit(t1p, f1p))
    n2 = unit(t2p, f2p)

    def residual(w2):
        pp = p + k - k1 - four(w2, n2)
        return mdot(pp, pp) + 1.0

    hi = gamma + omega
    if residual(1e-14) * residual(hi) > 0:
        raise ValueError("no physical omega2 root in bracket")
    return brentq(residual, 1e-14, hi, xtol=1e-16, rtol=8.9e-16)


def kappas_from_components(omega, gamma, alpha, t1p, f1p, t2p, f2p,
                           omega1, omega2):
    p = electron_four(gamma)
    k = four(omega, unit(alpha, 0.0))
    k1 = four(omega1, unit(t1p, f1p))
    k2 = four(omega2, unit(t2p, f2p))
    pp = p + k - k1 - k2
    return (-mdot(p, k1), -mdot(p, k2), mdot(p, k),
            mdot(pp, k1), mdot(pp, k2), -mdot(pp, k))


def boost_z(vec, beta):
    """Boost a component four-vector along +z into the frame moving
    with velocity beta (the electron rest frame for beta = electron's)."""
    g = 1.0 / math.sqrt(1.0 - beta * beta)
    t, x, y, z = vec
    return np.array([g * (t - beta * z), x, y, g * (z - beta * t)])


# ---------------------------------------------------------------------------
# closed-form single-Compton references

def klein_nishina_total_natural(omega) -> float:
    """Analytic total Klein-Nishina cross section, units of r0^2... in
    barns via the shared constant."""
    from xpair.units import R0_BARN

    a = omega
    term1 = ((1 + a) / a**2) * (2 * (1 + a) / (1 + 2 * a)
                                - math.log(1 + 2 * a) / a)
    term2 = math.log(1 + 2 * a) / (2 * a)
    term3 = (1 + 3 * a) / (1 + 2 * a) ** 2
    return 2.0 * math.pi * R0_BARN * (term1 + term2 - term3)


def thomson_differential(theta) -> float:
    from xpair.units import R0_BARN

    return 0.5 * R0_BARN * (1.0 + math.cos(theta) ** 2)


# ---------------------------------------------------------------------------
# brute-force marginals of the clamped pair density (beta = 0, alpha = 0)

def clamped_joint_w1_ct1(omega_kev, w1_kev, ct1, ir_cutoff_kev=0.1,
                         n_inner=48):
    """2 pi * Integral over (ct2, dphi) of the clamped density,
    b/(keV sr). w1_kev and ct1 are broadcast together."""
    from xpair.dcs import MASK_OK, xsec_density
    from xpair.units import kev_to_natural

    x2, wgt2 = np.polynomial.legendre.leggauss(n_inner)
    ct2 = x2
    dphi = math.pi * (x2 + 1.0)

    w1 = np.asarray(w1_kev, dtype=float)
    c1 = np.asarray(ct1, dtype=float)
    w1b, c1b = np.broadcast_arrays(w1, c1)
    out = np.zeros(w1b.shape)
    flat_w1 = kev_to_natural(w1b.ravel())
    flat_t1 = np.arccos(np.clip(c1b.ravel(), -1, 1))
    T2, DP = np.meshgrid(np.arccos(ct2), dphi, indexing="ij")
    val, _, mask = xsec_density(
        kev_to_natural(omega_kev), 1.0, 0.0, 0.0,
        flat_w1[:, None, None], flat_t1[:, None, None], 0.0,
        T2[None, :, :], DP[None, :, :],
        ir_cutoff=kev_to_natural(ir_cutoff_kev))
    val = np.where(mask == MASK_OK, val, 0.0)
    inner = np.einsum("nij,i,j->n", val, wgt2, wgt2) * math.pi
    # 2 pi for the overall azimuth, pi from mapping dphi in [0, 2pi);
    # f depends only on |phi1 - phi2| so integrating the difference over
    # [0, 2pi) equals the full double azimuth integral / (2 pi)
    return 2.0 * math.pi * inner.reshape(w1b.shape)


def clamped_marginal_w1(omega_kev, w1_kev, ir_cutoff_kev=0.1,
                        n_ct1=48, n_inner=48):
    """d(sigma)/d(omega1) of the clamped density, b/keV."""
    x1, wgt1 = np.polynomial.legendre.leggauss(n_ct1)
    w1 = np.asarray(w1_kev, dtype=float)
    joint = clamped_joint_w1_ct1(omega_kev, w1[:, None], x1[None, :],
                                 ir_cutoff_kev, n_inner)
    return joint @ wgt1
