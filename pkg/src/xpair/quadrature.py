"""Numerical integration and evaluation grids.

Two integral shapes are needed: the full-sphere integral over the
second photon's solid angle, and detector-acceptance products. Grid
generation over (omega1, theta) supports the isodensity-map and rate
outputs of the CLI.
"""

import heapq
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import dcs, scs
from .errors import IntegrationFailureError
from .kinematics import ScatterConfig
from .units import kev_to_natural, natural_to_kev

GEOMETRY_MODES = ("one", "two", "custom")


def max_workers() -> int:
    """Worker cap for grid fills, from XPAIR_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("XPAIR_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class GridSpec:
    """Rectangular (omega1, theta) evaluation grid.

    Energies in keV, angles in rad. geometry_mode 'one' places the
    detectors at opposite azimuths (phi2 - phi1 = pi), 'two' at equal
    azimuths (collinear pair), 'custom' uses phi1/phi2 as given.
    """

    omega1_min: float
    omega1_max: float
    omega1_steps: int
    angle_min: float
    angle_max: float
    angle_steps: int
    geometry_mode: str = "one"
    phi1: float = 0.0
    phi2: float = math.pi
    ir_cutoff_kev: float = 0.1
    floor_log10: float = -30.0

    def __post_init__(self):
        if self.omega1_steps < 2 or self.angle_steps < 2:
            raise ValueError("grid needs at least 2 steps per axis")
        if self.geometry_mode not in GEOMETRY_MODES:
            raise ValueError(f"unknown geometry_mode {self.geometry_mode!r}")
        if self.geometry_mode == "one":
            self.phi2 = self.phi1 + math.pi
        elif self.geometry_mode == "two":
            self.phi2 = self.phi1

    def omega1_axis_kev(self):
        return np.linspace(self.omega1_min, self.omega1_max, self.omega1_steps)

    def angle_axis(self):
        return np.linspace(self.angle_min, self.angle_max, self.angle_steps)


@dataclass
class GridResult:
    """Values on a GridSpec: axes, value matrix, mask of unusable cells.

    values[i, j] corresponds to omega1_kev[i], angles[j]. Masked cells
    carry a reason code (dcs.MASK_FORBIDDEN, dcs.MASK_IR_CUT), never a
    silent zero.
    """

    omega1_kev: np.ndarray
    angles: np.ndarray
    values: np.ndarray
    mask: np.ndarray
    units: str
    quantity: str
    floor_log10: float = -30.0
    meta: dict = field(default_factory=dict)

    def log10_values(self):
        with np.errstate(divide="ignore"):
            lg = np.log10(np.where(self.values > 0, self.values, np.nan))
        lg = np.where(np.isnan(lg), self.floor_log10, lg)
        return np.maximum(lg, self.floor_log10)


# ---------------------------------------------------------------------------
# adaptive 2-D cubature

_GL_CACHE: dict = {}


def _gl(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _region_estimates(f, rects):
    """Coarse/fine tensor Gauss-Legendre estimates for a batch of rects."""
    xs8, ws8 = _gl(8)
    xs4, ws4 = _gl(4)
    vals = np.empty(len(rects))
    errs = np.empty(len(rects))
    # assemble one batched call for all regions and both rules
    pts_x, pts_y, w8, w4 = [], [], [], []
    for (x0, x1, y0, y1) in rects:
        hx, mx = 0.5 * (x1 - x0), 0.5 * (x1 + x0)
        hy, my = 0.5 * (y1 - y0), 0.5 * (y1 + y0)
        gx8, gy8 = np.meshgrid(mx + hx * xs8, my + hy * xs8, indexing="ij")
        gx4, gy4 = np.meshgrid(mx + hx * xs4, my + hy * xs4, indexing="ij")
        pts_x.append(np.concatenate([gx8.ravel(), gx4.ravel()]))
        pts_y.append(np.concatenate([gy8.ravel(), gy4.ravel()]))
        w8.append(hx * hy * np.outer(ws8, ws8).ravel())
        w4.append(hx * hy * np.outer(ws4, ws4).ravel())
    fv = f(np.concatenate(pts_x), np.concatenate(pts_y))
    n8, n4 = 64, 16
    stride = n8 + n4
    for i in range(len(rects)):
        chunk = fv[i * stride:(i + 1) * stride]
        v8 = float(np.dot(chunk[:n8], w8[i]))
        v4 = float(np.dot(chunk[n8:], w4[i]))
        vals[i] = v8
        errs[i] = abs(v8 - v4)
    return vals, errs


def cubature2d(f, x0, x1, y0, y1, rel_tol=1e-4, abs_tol=0.0,
               max_evals=2_000_000, x_splits=None):
    """Adaptive rectangle-subdivision cubature of a vectorized integrand.

    f(x, y) must accept equal-length 1-D arrays. Optional x_splits seeds
    the initial subdivision along x (useful for integrands concentrated
    in a narrow cone). Returns (value, error_bound, n_evals); raises
    IntegrationFailureError carrying the best estimate if the tolerance
    is not reached within max_evals.
    """
    edges = sorted({x0, x1, *(s for s in (x_splits or []) if x0 < s < x1)})
    rects = [(a, b, y0, y1) for a, b in zip(edges[:-1], edges[1:])]
    vals, errs = _region_estimates(f, rects)
    n_evals = 80 * len(rects)
    heap = []
    counter = 0
    for r, v, e in zip(rects, vals, errs):
        heapq.heappush(heap, (-e, counter, r, v, e))
        counter += 1
    wx = (x1 - x0) / max(1, len(rects))
    wy = y1 - y0

    while True:
        total = sum(item[3] for item in heap)
        total_err = sum(item[4] for item in heap)
        if total_err <= max(abs_tol, rel_tol * abs(total)):
            return total, total_err, n_evals
        if n_evals >= max_evals:
            raise IntegrationFailureError(
                f"cubature did not reach tol={rel_tol:g} after {n_evals} "
                f"evaluations (estimate {total:.6e} +- {total_err:.2e})",
                estimate=total, error_bound=total_err)
        # split the worst regions, batched
        children = []
        for _ in range(min(16, len(heap))):
            _, _, (a, b, c, d), _, _ = heapq.heappop(heap)
            if (b - a) / wx >= (d - c) / wy:
                m = 0.5 * (a + b)
                children += [(a, m, c, d), (m, b, c, d)]
            else:
                m = 0.5 * (c + d)
                children += [(a, b, c, m), (a, b, m, d)]
        vals, errs = _region_estimates(f, children)
        n_evals += 80 * len(children)
        for r, v, e in zip(children, vals, errs):
            heapq.heappush(heap, (-e, counter, r, v, e))
            counter += 1


def integrate_photon2(cfg: ScatterConfig, omega1: float, rel_tol: float = 1e-4,
                      max_evals: int = 2_000_000):
    """d^2(sigma)/(domega1 dOmega1') with photon 2 integrated over its
    full sphere, in b/(keV sr).

    cfg fixes the incident channel and detector 1; its detector-2 angles
    are ignored. omega1 in natural units. The integrand is finite here
    because omega2 stays positive for omega1 < omega1_max regardless of
    the photon-2 direction.
    """
    g = cfg.gamma

    def integrand(theta2, phi2):
        val, _, _ = dcs.xsec_density(cfg.omega, g, cfg.beta, cfg.alpha,
                                     omega1, cfg.theta1p, cfg.phi1p,
                                     theta2, phi2)
        return val * np.sin(theta2)

    # seed splits so an emission cone of opening ~1/gamma is resolved
    splits = []
    s = math.pi / 2.0
    while s > 0.25 / g:
        splits.append(s)
        s /= 2.0
    value, err, n = cubature2d(integrand, 0.0, math.pi, 0.0, 2.0 * math.pi,
                               rel_tol=rel_tol, max_evals=max_evals,
                               x_splits=splits)
    return value, err


def detector_rate_integral(xsec, det1, det2, flatness_threshold: float = 0.05,
                           order: int = 8):
    """Acceptance-weighted cross section for two detectors, in barns.

    xsec(omega1_kev, theta1, phi1, theta2, phi2) must return the
    triple-differential cross section in b/(keV sr^2) (vectorized).
    For small acceptances this is the midpoint product
    d^3(sigma) * dOmega1 * dOmega2 * domega1 with domega1 the detector-1
    bandwidth; when either solid angle exceeds flatness_threshold (sr)
    or the bandwidth exceeds 10%, a tensor Gauss-Legendre quadrature
    over both angular caps and the energy band is used instead.
    """
    for d in (det1, det2):
        if d.solid_angle_sr <= 0 or not 0 < d.fractional_bandwidth < 1:
            raise ValueError("detector solid angle and bandwidth must be positive")
    d_omega1 = det1.delta_omega_kev
    small = (det1.solid_angle_sr <= flatness_threshold
             and det2.solid_angle_sr <= flatness_threshold
             and det1.fractional_bandwidth <= 0.1)
    if small:
        val = xsec(det1.center_energy_kev, det1.theta_rad, det1.phi_rad,
                   det2.theta_rad, det2.phi_rad)
        return float(val) * det1.solid_angle_sr * det2.solid_angle_sr * d_omega1

    xs, ws = _gl(order)
    half = 0.5 * d_omega1
    w1 = det1.center_energy_kev + half * xs

    def cap_nodes(det):
        # uniform-measure cap around the detector axis
        c0 = 1.0 - det.solid_angle_sr / (2.0 * math.pi)
        ct = 0.5 * (1 + c0) + 0.5 * (1 - c0) * xs
        ph = math.pi * (xs + 1.0)
        jac = 0.5 * (1 - c0) * math.pi
        theta_loc = np.arccos(np.clip(ct, -1, 1))
        return theta_loc, ph, jac

    t1l, p1l, j1 = cap_nodes(det1)
    t2l, p2l, j2 = cap_nodes(det2)

    def rotate(theta_loc, phi_loc, theta_c, phi_c):
        st, ct = np.sin(theta_loc), np.cos(theta_loc)
        x = st * np.cos(phi_loc)
        y = st * np.sin(phi_loc)
        z = ct
        ct_c, st_c = math.cos(theta_c), math.sin(theta_c)
        xr = ct_c * x + st_c * z
        zr = -st_c * x + ct_c * z
        cp, sp = math.cos(phi_c), math.sin(phi_c)
        xf = cp * xr - sp * y
        yf = sp * xr + cp * y
        theta = np.arccos(np.clip(zr, -1, 1))
        phi = np.arctan2(yf, xf)
        return theta, phi

    E, T1, P1, T2, P2 = np.meshgrid(w1, t1l, p1l, t2l, p2l, indexing="ij")
    th1, ph1 = rotate(T1, P1, det1.theta_rad, det1.phi_rad)
    th2, ph2 = rotate(T2, P2, det2.theta_rad, det2.phi_rad)
    vals = xsec(E, th1, ph1, th2, ph2)
    wE = half * ws
    W = (wE[:, None, None, None, None]
         * ws[None, :, None, None, None] * ws[None, None, :, None, None]
         * ws[None, None, None, :, None] * ws[None, None, None, None, :])
    return float(np.sum(vals * W)) * j1 * j2


# ---------------------------------------------------------------------------
# grid generation


def _clamped_density(cfg_base: ScatterConfig, grid: GridSpec, mode_phi):
    """Evaluate the pair density on the grid with the IR clamp applied."""
    w1_kev = grid.omega1_axis_kev()
    thetas = grid.angle_axis()
    w1 = kev_to_natural(w1_kev)[:, None]
    th = thetas[None, :]
    phi1, phi2 = mode_phi
    eps = kev_to_natural(grid.ir_cutoff_kev)
    val, _, mask = dcs.xsec_density(cfg_base.omega, cfg_base.gamma,
                                    cfg_base.beta, cfg_base.alpha,
                                    w1, th, phi1, th, phi2, ir_cutoff=eps)
    return w1_kev, thetas, val, mask


def triple_xsec_grid(cfg_base: ScatterConfig, grid: GridSpec) -> GridResult:
    """Triple-differential cross section on an (omega1, theta) grid,
    both detectors at the same polar angle, azimuths per geometry mode."""
    w1_kev, thetas, val, mask = _clamped_density(cfg_base, grid,
                                                 (grid.phi1, grid.phi2))
    return GridResult(w1_kev, thetas, val, mask, "b/(keV sr^2)",
                      "triple_xsec", grid.floor_log10,
                      {"geometry_mode": grid.geometry_mode})


def pair_yield_grid(cfg_base: ScatterConfig, grid: GridSpec,
                    luminosity_per_electron_b: float) -> GridResult:
    """Per-electron pair yield: cross section times luminosity/electron."""
    res = triple_xsec_grid(cfg_base, grid)
    return GridResult(res.omega1_kev, res.angles,
                      res.values * luminosity_per_electron_b, res.mask,
                      "pairs/(keV sr^2 electron)", "pair_yield",
                      grid.floor_log10,
                      {**res.meta,
                       "luminosity_per_electron_b": luminosity_per_electron_b})


def photon2_integrated_grid(cfg_base: ScatterConfig, grid: GridSpec,
                            rel_tol: float = 1e-4) -> GridResult:
    """Grid of d^2(sigma)/(domega1 dOmega1'), photon 2 integrated out."""
    from concurrent.futures import ThreadPoolExecutor

    w1_kev = grid.omega1_axis_kev()
    thetas = grid.angle_axis()
    values = np.zeros((len(w1_kev), len(thetas)))
    mask = np.zeros_like(values, dtype=np.uint8)
    eps = kev_to_natural(grid.ir_cutoff_kev)

    def one_cell(idx):
        i, j = idx
        cfg = ScatterConfig(cfg_base.omega, cfg_base.alpha, float(thetas[j]),
                            grid.phi1, 0.0, 0.0, cfg_base.electron)
        w1 = kev_to_natural(float(w1_kev[i]))
        from .kinematics import omega1_max
        if w1 <= eps or w1 >= omega1_max(cfg) - eps:
            return i, j, 0.0, dcs.MASK_IR_CUT
        v, _ = integrate_photon2(cfg, w1, rel_tol=rel_tol)
        return i, j, v, dcs.MASK_OK

    cells = [(i, j) for i in range(len(w1_kev)) for j in range(len(thetas))]
    workers = max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(one_cell, cells))
    else:
        results = [one_cell(c) for c in cells]
    for i, j, v, m in results:
        values[i, j] = v
        mask[i, j] = m
    return GridResult(w1_kev, thetas, values, mask, "b/(keV sr)",
                      "photon2_integrated", grid.floor_log10,
                      {"rel_tol": rel_tol})


def single_compton_grid(cfg_base: ScatterConfig, grid: GridSpec,
                        tau_L_fs: float) -> GridResult:
    """Grid of the single-Compton d^2(sigma)/(domega dOmega'), b/(keV sr)."""
    w1_kev = grid.omega1_axis_kev()
    thetas = grid.angle_axis()
    values = np.zeros((len(w1_kev), len(thetas)))
    for j, th in enumerate(thetas):
        cfg = scs.SingleComptonConfig(cfg_base.omega, cfg_base.alpha,
                                      float(th), tau_L_fs, cfg_base.electron)
        values[:, j] = scs.single_double_diff(kev_to_natural(w1_kev), cfg)
    mask = np.zeros_like(values, dtype=np.uint8)
    return GridResult(w1_kev, thetas, values, mask, "b/(keV sr)",
                      "single_compton", grid.floor_log10,
                      {"tau_L_fs": tau_L_fs})
