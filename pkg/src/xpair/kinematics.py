"""Four-vector algebra and exact kinematics for photon-pair emission.

Geometry convention: the electron moves along +z, the incident photon
lies in the x-z plane at angle alpha from the electron axis, and the
primed emission angles (theta', phi') of each outgoing photon are polar
coordinates about the electron axis with azimuths measured from the
plane of incidence (the x-z plane), right-handed about +z. Unprimed
angles theta1, theta2 are measured from the incident photon direction
and theta12 is the opening angle of the pair. Cross sections depend on
the azimuths only through cos(phi') and cos(phi1' - phi2'), so the
orientation sign is observable-neutral.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateGeometryError,
    ForbiddenKinematicsError,
    InconsistentKinematicsError,
)

MIN_GAMMA_FOR_APPROX = 10.0


@dataclass
class FourVector:
    """Minkowski four-vector with signature (-+++); components may be arrays."""

    t: float
    x: float
    y: float
    z: float

    def dot(self, other: "FourVector"):
        return -self.t * other.t + self.x * other.x + self.y * other.y + self.z * other.z

    def mass2(self):
        """p.p; equals -1 for an on-shell electron, 0 for a photon."""
        return self.dot(self)

    def __add__(self, other):
        return FourVector(self.t + other.t, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    def __sub__(self, other):
        return FourVector(self.t - other.t, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def __mul__(self, s):
        return FourVector(self.t * s, self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def boost(self, bx: float, by: float, bz: float) -> "FourVector":
        """Boost into a frame moving with velocity (bx, by, bz)."""
        b2 = bx * bx + by * by + bz * bz
        if b2 >= 1.0:
            raise ValueError("boost velocity must satisfy |beta| < 1")
        if b2 == 0.0:
            return FourVector(self.t, self.x, self.y, self.z)
        g = 1.0 / math.sqrt(1.0 - b2)
        bp = bx * self.x + by * self.y + bz * self.z
        g2 = (g - 1.0) / b2
        t = g * (self.t - bp)
        x = self.x + g2 * bp * bx - g * bx * self.t
        y = self.y + g2 * bp * by - g * by * self.t
        z = self.z + g2 * bp * bz - g * bz * self.t
        return FourVector(t, x, y, z)


def photon_direction(theta, phi):
    """Unit 3-vector for polar angles about the electron axis."""
    st = np.sin(theta)
    return np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])


def photon_four_vector(omega, theta, phi) -> FourVector:
    n = photon_direction(theta, phi)
    return FourVector(omega, omega * n[0], omega * n[1], omega * n[2])


@dataclass
class ElectronState:
    """Incident electron: Lorentz factor and direction of motion."""

    gamma: float = 1.0
    axis: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if self.gamma < 1.0:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")
        norm = math.sqrt(sum(a * a for a in self.axis))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError("electron axis must be a unit vector")

    @property
    def beta(self) -> float:
        if self.gamma == 1.0:
            return 0.0
        return math.sqrt(1.0 - 1.0 / self.gamma**2)

    def four_momentum(self) -> FourVector:
        gb = self.gamma * self.beta
        return FourVector(self.gamma, gb * self.axis[0], gb * self.axis[1],
                          gb * self.axis[2])


@dataclass
class ScatterConfig:
    """One pair-emission geometry: incident photon, electron, detector angles.

    omega is the incident photon energy in natural units; alpha is the
    angle between the incident photon and the electron axis; the primed
    angles place the two photon detectors.
    """

    omega: float
    alpha: float
    theta1p: float
    phi1p: float
    theta2p: float
    phi2p: float
    electron: ElectronState = field(default_factory=ElectronState)

    def __post_init__(self):
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ValueError(f"omega must be positive, got {self.omega}")
        for name in ("alpha", "theta1p", "theta2p"):
            v = getattr(self, name)
            if not 0.0 <= v <= math.pi:
                raise ValueError(f"{name} must lie in [0, pi], got {v}")
        self.phi1p = self.phi1p % (2.0 * math.pi)
        self.phi2p = self.phi2p % (2.0 * math.pi)

    @property
    def gamma(self) -> float:
        return self.electron.gamma

    @property
    def beta(self) -> float:
        return self.electron.beta


@dataclass
class EmissionAngles:
    """Angles of both photons relative to the incident photon direction."""

    theta1: float
    theta2: float
    theta12: float


def cos_emission_angles(alpha, theta1p, phi1p, theta2p, phi2p):
    """(cos theta1, cos theta2, cos theta12) from the primed angles.

    Vectorized; any argument may be an array.
    """
    ca, sa = np.cos(alpha), np.sin(alpha)
    ct1p, st1p = np.cos(theta1p), np.sin(theta1p)
    ct2p, st2p = np.cos(theta2p), np.sin(theta2p)
    ct1 = ca * ct1p + sa * st1p * np.cos(phi1p)
    ct2 = ca * ct2p + sa * st2p * np.cos(phi2p)
    ct12 = ct1p * ct2p + st1p * st2p * np.cos(phi1p - phi2p)
    return ct1, ct2, ct12


def emission_angles(cfg: ScatterConfig) -> EmissionAngles:
    ct1, ct2, ct12 = cos_emission_angles(cfg.alpha, cfg.theta1p, cfg.phi1p,
                                         cfg.theta2p, cfg.phi2p)
    clip = lambda c: min(1.0, max(-1.0, float(c)))
    return EmissionAngles(math.acos(clip(ct1)), math.acos(clip(ct2)),
                          math.acos(clip(ct12)))


def omega2_terms(omega, gamma, beta, alpha, theta1p, theta2p,
                 ct1, ct2, ct12, omega1):
    """Numerator and denominator of the closed-form omega2. Vectorized.

    The numerator is positive iff omega1 < omega1_max; the denominator
    is positive for every configuration reachable by conservation.
    """
    num = (gamma * omega * (1.0 - beta * np.cos(alpha))
           - gamma * omega1 * (1.0 - beta * np.cos(theta1p))
           - omega1 * omega * (1.0 - ct1))
    den = (gamma * (1.0 - beta * np.cos(theta2p))
           + omega * (1.0 - ct2) - omega1 * (1.0 - ct12))
    return num, den


def omega2(cfg: ScatterConfig, omega1: float) -> float:
    """Energy of the second photon fixed by conservation, natural units.

    Raises ForbiddenKinematicsError if omega1 exceeds omega1_max for the
    detector-1 direction or if the configuration cannot balance
    momentum (non-positive denominator). Returns exactly 0.0 at
    omega1 = omega1_max.
    """
    if omega1 <= 0:
        raise ForbiddenKinematicsError(f"omega1 must be positive, got {omega1}")
    ct1, ct2, ct12 = cos_emission_angles(cfg.alpha, cfg.theta1p, cfg.phi1p,
                                         cfg.theta2p, cfg.phi2p)
    num, den = omega2_terms(cfg.omega, cfg.gamma, cfg.beta, cfg.alpha,
                            cfg.theta1p, cfg.theta2p, ct1, ct2, ct12, omega1)
    if den <= 0:
        raise ForbiddenKinematicsError(
            f"configuration cannot balance momentum (denominator {den:.3e} <= 0)")
    scale = cfg.gamma * cfg.omega * (1.0 - cfg.beta * math.cos(cfg.alpha))
    if num < -1e-12 * scale:
        raise ForbiddenKinematicsError(
            f"omega1 = {omega1:.6g} exceeds omega1_max = {omega1_max(cfg):.6g}")
    return float(max(num, 0.0) / den)


def omega1_max(cfg: ScatterConfig) -> float:
    """Largest omega1 reachable in detector 1 (the omega2 = 0 endpoint).

    Independent of the detector-2 setting. For an electron at rest this
    is the single-Compton energy omega / (1 + omega (1 - cos theta1)).
    """
    ct1, _, _ = cos_emission_angles(cfg.alpha, cfg.theta1p, cfg.phi1p,
                                    cfg.theta2p, cfg.phi2p)
    g, b, w = cfg.gamma, cfg.beta, cfg.omega
    return float(g * w * (1.0 - b * math.cos(cfg.alpha))
                 / (g * (1.0 - b * math.cos(cfg.theta1p)) + w * (1.0 - ct1)))


def omega1_max_approx(gamma: float, omega_L: float, alpha0: float,
                      theta1p: float) -> float:
    """High-gamma approximation omega_m / (1 + (theta1'/theta0')^2).

    alpha0 = pi - alpha is the collision angle measured from head-on.
    Valid for gamma >> 1; enforced as gamma >= 10.
    """
    if gamma < MIN_GAMMA_FOR_APPROX:
        raise ValueError(f"approximation requires gamma >= {MIN_GAMMA_FOR_APPROX}")
    x = 4.0 * gamma * omega_L * math.cos(alpha0 / 2.0) ** 2
    omega_m = gamma * x / (1.0 + x)
    theta0 = math.sqrt(1.0 + x) / gamma
    return omega_m / (1.0 + (theta1p / theta0) ** 2)


def omega1_max_dressed(gamma: float, omega_L: float, alpha: float,
                       theta1p: float, a_L: float) -> float:
    """Compton edge for a laser-dressed electron with normalized strength a_L.

    2 gamma^2 omega_L (1 - beta cos alpha) / (1 + a_L^2 + (gamma theta1')^2);
    head-on and on-axis this is 4 gamma^2 omega_L / (1 + a_L^2).
    """
    if gamma < MIN_GAMMA_FOR_APPROX:
        raise ValueError(f"approximation requires gamma >= {MIN_GAMMA_FOR_APPROX}")
    beta = math.sqrt(1.0 - 1.0 / gamma**2)
    return (2.0 * gamma**2 * omega_L * (1.0 - beta * math.cos(alpha))
            / (1.0 + a_L**2 + (gamma * theta1p) ** 2))


def quasimomentum(p: FourVector, k: FourVector, a_L: float) -> FourVector:
    """Effective electron four-momentum inside a plane wave of strength a_L.

    q = p - a_L^2 / (2 k.p) k, so q.q = -(1 + a_L^2) identically.
    """
    kp = k.dot(p)
    if np.any(np.asarray(kp) == 0.0):
        raise DegenerateGeometryError("k.p = 0; dressed momentum undefined")
    return p - (a_L**2 / (2.0 * kp)) * k


def four_vectors(cfg: ScatterConfig, omega1: float, omega2_val: float):
    """(p, k, k1, k2) four-vectors for a configuration and energy pair."""
    p = cfg.electron.four_momentum()
    k = photon_four_vector(cfg.omega, cfg.alpha, 0.0)
    k1 = photon_four_vector(omega1, cfg.theta1p, cfg.phi1p)
    k2 = photon_four_vector(omega2_val, cfg.theta2p, cfg.phi2p)
    return p, k, k1, k2


def reconstruct_final_electron(cfg: ScatterConfig, omega1: float,
                               omega2_val: float,
                               tol: float = 1e-9) -> FourVector:
    """Recoil electron p' = p + k - k1 - k2, checked against the mass shell.

    Raises InconsistentKinematicsError if |p'.p' + 1| exceeds tol
    (relative to gamma'^2), i.e. when (omega1, omega2) do not actually
    solve the conservation equations.
    """
    p, k, k1, k2 = four_vectors(cfg, omega1, omega2_val)
    pp = p + k - k1 - k2
    residual = abs(pp.mass2() + 1.0) / max(1.0, float(pp.t) ** 2)
    if residual > tol:
        raise InconsistentKinematicsError(
            f"(omega1, omega2) violate the mass shell: |p'.p'+1| = {residual:.3e}")
    return pp
