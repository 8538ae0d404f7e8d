"""Monte Carlo generation of correlated photon pairs.

Events are drawn by rejection sampling against a piecewise-constant
envelope over (omega1, cos theta1', phi1', cos theta2', phi2'). The
envelope cell bounds are corner maxima of the density inflated near the
infrared clamp surface, times a safety factor; a proposal that beats
its cell bound aborts the run rather than silently biasing it.

Determinism: the event stream is generated in fixed-size blocks, each
from an independent generator seeded by SeedSequence((master_seed,
block_index)). The resulting event multiset does not depend on how
blocks are scheduled across workers.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import dcs
from .errors import EnvelopeViolationError
from .kinematics import (
    FourVector,
    ScatterConfig,
    photon_direction,
    reconstruct_final_electron,
)
from .units import kev_to_natural, natural_to_kev

EVENT_FIELDS = ("omega1_keV", "omega2_keV", "theta1", "phi1", "theta2",
                "phi2", "weight")


@dataclass
class PairEvent:
    """One sampled photon pair; angles are primed-frame (theta, phi)."""

    omega1_kev: float
    omega2_kev: float
    theta1p: float
    phi1p: float
    theta2p: float
    phi2p: float
    weight: float = 1.0

    def dir1(self):
        return photon_direction(self.theta1p, self.phi1p)

    def dir2(self):
        return photon_direction(self.theta2p, self.phi2p)

    def p_prime(self, cfg: ScatterConfig) -> FourVector:
        cfg_ev = ScatterConfig(cfg.omega, cfg.alpha, self.theta1p, self.phi1p,
                               self.theta2p, self.phi2p, cfg.electron)
        return reconstruct_final_electron(cfg_ev,
                                          kev_to_natural(self.omega1_kev),
                                          kev_to_natural(self.omega2_kev))


@dataclass
class SamplerConfig:
    """Scenario and tuning knobs for the pair sampler.

    scenario fixes the incident channel (its detector angles are
    ignored; the sampler scans the full sphere unless cos_theta bounds
    are narrowed). ir_cutoff_kev must be positive: the density is not
    normalizable at either soft-photon edge.
    """

    scenario: ScatterConfig
    n_events: int
    seed: int = 0
    ir_cutoff_kev: float = 0.1
    envelope_resolution: tuple = (32, 32, 32, 32, 32)
    safety: float = 1.2
    cos_theta1_range: tuple = (-1.0, 1.0)
    cos_theta2_range: tuple = (-1.0, 1.0)
    block_size: int = 16384
    max_proposal_batches: int = 4000

    def __post_init__(self):
        if self.ir_cutoff_kev <= 0:
            raise ValueError("ir_cutoff_kev must be positive")
        if self.n_events < 0:
            raise ValueError("n_events must be >= 0")
        if isinstance(self.envelope_resolution, int):
            self.envelope_resolution = (self.envelope_resolution,) * 5
        if len(self.envelope_resolution) != 5:
            raise ValueError("envelope_resolution needs 5 entries")


@dataclass
class Envelope:
    """Piecewise-constant bound of the density over the sampling box."""

    edges: list                 # 5 coordinate edge arrays
    bounds: np.ndarray          # flat cell bounds, b/(keV sr^2)
    cum_weights: np.ndarray     # cumulative bound*volume, for cell choice

    @property
    def mass_b(self) -> float:
        """Envelope integral in barns (bound * volume summed)."""
        return float(self.cum_weights[-1])


@dataclass
class SampleRun:
    """Events plus the bookkeeping needed to convert counts to rates."""

    events: list
    n_proposed: int
    envelope_mass_b: float
    seed: int
    acceptance_rate: float = field(init=False)

    def __post_init__(self):
        self.acceptance_rate = (len(self.events) / self.n_proposed
                                if self.n_proposed else 0.0)

    def total_xsec_b(self) -> float:
        """Rejection estimate of the restricted total cross section."""
        return self.envelope_mass_b * self.acceptance_rate

    def total_xsec_err_b(self) -> float:
        n, p = self.n_proposed, self.acceptance_rate
        if n == 0:
            return 0.0
        return self.envelope_mass_b * math.sqrt(max(p * (1 - p), 1e-30) / n)


def _density_and_omega2(sc: SamplerConfig, w1_kev, ct1, f1, ct2, f2):
    """Density in b/(keV sr^2) with the IR clamp (zero outside) plus the
    matching omega2 in keV (-1 where conservation fails)."""
    cfg = sc.scenario
    val, w2, mask = dcs.xsec_density(
        cfg.omega, cfg.gamma, cfg.beta, cfg.alpha,
        kev_to_natural(np.asarray(w1_kev, dtype=float)),
        np.arccos(np.clip(ct1, -1, 1)), f1,
        np.arccos(np.clip(ct2, -1, 1)), f2,
        ir_cutoff=kev_to_natural(sc.ir_cutoff_kev))
    w2_kev = np.where(mask != dcs.MASK_FORBIDDEN, natural_to_kev(w2), -1.0)
    return np.where(mask == dcs.MASK_OK, val, 0.0), w2_kev


def _corner_max(a: np.ndarray) -> np.ndarray:
    """Max over the 2^5 corners of every cell of a node-valued array."""
    out = a
    for axis in range(a.ndim):
        lo = [slice(None)] * a.ndim
        hi = [slice(None)] * a.ndim
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        out = np.maximum(out[tuple(lo)], out[tuple(hi)])
    return out


def build_envelope(sc: SamplerConfig) -> Envelope:
    """Tabulate cell bounds for rejection sampling.

    Nodes are evaluated on the cell-corner lattice; each cell takes the
    maximum over its corners. Cells crossing the omega2 = ir_cutoff
    surface hide the 1/omega2 spike in their interior, so their bound
    is additionally inflated by (smallest allowed corner omega2)/cutoff.
    """
    cfg = sc.scenario
    n = sc.envelope_resolution
    # sup of omega1_max over emission directions
    w1_hi = natural_to_kev(cfg.omega * (1.0 - cfg.beta * math.cos(cfg.alpha))
                           / (1.0 - cfg.beta))
    uniform = np.linspace(sc.ir_cutoff_kev, w1_hi, n[0] + 1)
    # log-refine the first uniform cell: the density runs like 1/omega1
    # there and a single flat bound would cost a factor ~cell/cutoff
    refine = np.geomspace(sc.ir_cutoff_kev, uniform[1], 9)
    edges = [
        np.unique(np.concatenate([refine, uniform[1:]])),
        np.linspace(*sc.cos_theta1_range, n[1] + 1),
        np.linspace(0.0, 2.0 * math.pi, n[2] + 1),
        np.linspace(*sc.cos_theta2_range, n[3] + 1),
        np.linspace(0.0, 2.0 * math.pi, n[4] + 1),
    ]
    grids = np.meshgrid(*edges[1:], indexing="ij", sparse=True)
    node_shape = tuple(len(e) for e in edges)
    dens = np.empty(node_shape, dtype=np.float32)
    w2 = np.empty(node_shape, dtype=np.float32)
    for i, w1 in enumerate(edges[0]):          # slab by slab to bound memory
        dens[i], w2[i] = _density_and_omega2(sc, float(w1), grids[0],
                                             grids[1], grids[2], grids[3])

    bounds = _corner_max(dens)
    # cells straddling the omega2 clamp surface hide a 1/omega2 spike in
    # their interior: bound those by the soft-photon coefficient
    # (density * omega2, smooth across the cell) divided by the cutoff
    eps = np.float32(sc.ir_cutoff_kev)
    soft_coeff = _corner_max(np.where(w2 > 0, dens * w2, 0.0))
    crossing = _corner_max((w2 < eps).astype(np.float32)) > 0
    bounds = np.where(crossing, np.maximum(bounds, soft_coeff / eps), bounds)
    bounds = (bounds * np.float32(sc.safety)).astype(np.float32)

    volumes = math.prod(float(e[1] - e[0]) for e in edges[1:]) * np.diff(edges[0])
    weights = bounds.reshape(len(edges[0]) - 1, -1) * volumes[:, None]
    cum = np.cumsum(weights.ravel(), dtype=np.float64)
    return Envelope(edges, bounds.ravel(), cum)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    """Documented split function: one independent stream per block."""
    return np.random.default_rng(np.random.SeedSequence((seed, block)))


def sample_pairs(sc: SamplerConfig, envelope: Envelope | None = None) -> SampleRun:
    """Draw n_events pairs distributed as the triple-differential cross
    section restricted above the infrared cutoff.

    Deterministic for a fixed (seed, config). Raises
    EnvelopeViolationError (with the offending cell) if the density
    exceeds its bound anywhere it is probed.
    """
    env = envelope if envelope is not None else build_envelope(sc)
    shape = tuple(len(e) - 1 for e in env.edges)
    lows = [e[:-1] for e in env.edges]
    widths = [np.diff(e) for e in env.edges]

    events = []
    n_proposed = 0
    block = 0
    warned = False
    batch = max(sc.block_size, 4096)
    while len(events) < sc.n_events:
        if block >= 10 and not warned and len(events) < 1e-4 * n_proposed:
            warnings.warn("sampler acceptance rate below 1e-4; consider a "
                          "finer envelope_resolution or narrower cos_theta "
                          "ranges", RuntimeWarning)
            warned = True
        if block >= sc.max_proposal_batches:
            raise EnvelopeViolationError(
                f"produced only {len(events)} of {sc.n_events} events after "
                f"{n_proposed} proposals; refine the envelope or relax the "
                "cutoff")
        rng = _block_rng(sc.seed, block)
        block += 1
        u = rng.random(batch) * env.cum_weights[-1]
        cells = np.searchsorted(env.cum_weights, u, side="right")
        cells = np.minimum(cells, len(env.bounds) - 1)
        idx = np.unravel_index(cells, shape)
        coords = [lows[d][idx[d]] + widths[d][idx[d]] * rng.random(batch)
                  for d in range(5)]
        bounds = env.bounds[cells]
        dens, w2 = _density_and_omega2(sc, coords[0], coords[1], coords[2],
                                       coords[3], coords[4])
        over = dens > bounds
        if np.any(over):
            j = int(np.argmax(over))
            raise EnvelopeViolationError(
                "density exceeds envelope bound",
                cell=tuple(int(ix[j]) for ix in idx),
                density=float(dens[j]), bound=float(bounds[j]))
        accept = rng.random(batch) * bounds < dens
        n_proposed += batch
        for j in np.nonzero(accept)[0]:
            if len(events) >= sc.n_events:
                break
            events.append(PairEvent(
                float(coords[0][j]), float(w2[j]),
                float(math.acos(min(1, max(-1, coords[1][j])))),
                float(coords[2][j]),
                float(math.acos(min(1, max(-1, coords[3][j])))),
                float(coords[4][j])))
    return SampleRun(events, n_proposed, env.mass_b, sc.seed)


@dataclass
class CoincidenceStats:
    """Counts of events landing in both detector acceptances."""

    n_events: int
    n_coincident: int
    fraction: float
    fraction_err: float
    rate: float | None = None
    rate_err: float | None = None


def coincidence_stats(run: SampleRun, det1, det2,
                      rate_scale_per_b: float | None = None,
                      apply_energy_window: bool = True) -> CoincidenceStats:
    """Count events with photon 1 in det1 and photon 2 in det2.

    A detector accepts a photon inside the cone of its solid angle
    around (theta_rad, phi_rad) with energy within its bandwidth window
    (skipped when apply_energy_window is False). rate_scale_per_b
    (e.g. flux * areal density) converts the accepted cross section
    into a rate.
    """
    events = run.events
    n = len(events)
    if n:
        cols = np.array([(ev.omega1_kev, ev.theta1p, ev.phi1p,
                          ev.omega2_kev, ev.theta2p, ev.phi2p)
                         for ev in events])
        in1 = _in_detector_mask(cols[:, 0], cols[:, 1], cols[:, 2], det1,
                                apply_energy_window)
        in2 = _in_detector_mask(cols[:, 3], cols[:, 4], cols[:, 5], det2,
                                apply_energy_window)
        hits = int(np.count_nonzero(in1 & in2))
    else:
        hits = 0
    # binomial error on the coincidence fraction of *proposals*
    p = hits / run.n_proposed if run.n_proposed else 0.0
    perr = (math.sqrt(max(p * (1 - p), 1e-30) / run.n_proposed)
            if run.n_proposed else 0.0)
    frac = hits / n if n else 0.0
    frac_err = math.sqrt(max(frac * (1 - frac), 1e-30) / n) if n else 0.0
    rate = rate_err = None
    if rate_scale_per_b is not None:
        accepted_xsec = p * run.envelope_mass_b
        rate = rate_scale_per_b * accepted_xsec
        rate_err = rate_scale_per_b * perr * run.envelope_mass_b
    return CoincidenceStats(n, hits, frac, frac_err, rate, rate_err)


def _in_detector_mask(omega_kev, theta, phi, det, apply_energy_window=True):
    ok = np.ones(np.shape(omega_kev), dtype=bool)
    if apply_energy_window:
        half = 0.5 * det.delta_omega_kev
        ok &= (omega_kev >= det.center_energy_kev - half) \
            & (omega_kev <= det.center_energy_kev + half)
    if det.solid_angle_sr >= 4.0 * math.pi * (1.0 - 1e-12):
        return ok
    cos_cone = 1.0 - det.solid_angle_sr / (2.0 * math.pi)
    axis = photon_direction(det.theta_rad, det.phi_rad)
    dots = (np.sin(theta) * np.cos(phi) * axis[0]
            + np.sin(theta) * np.sin(phi) * axis[1]
            + np.cos(theta) * axis[2])
    return ok & (dots >= cos_cone)


def _in_detector(omega_kev, direction, det, apply_energy_window=True) -> bool:
    theta = math.acos(min(1.0, max(-1.0, float(direction[2]))))
    phi = math.atan2(float(direction[1]), float(direction[0]))
    return bool(_in_detector_mask(np.asarray(omega_kev), theta, phi, det,
                                  apply_energy_window))


# ---------------------------------------------------------------------------
# event file I/O

SCHEMA_VERSION = 1


def write_events(path, run: SampleRun, scenario_name: str = "") -> None:
    """Write the newline-delimited event table with its schema header."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# schema={SCHEMA_VERSION} kind=events seed={run.seed}"
                 f" scenario={scenario_name or '-'}"
                 f" envelope_mass_b={run.envelope_mass_b:.9e}"
                 f" n_proposed={run.n_proposed}\n")
        fh.write(",".join(EVENT_FIELDS) + "\n")
        for ev in run.events:
            fh.write(",".join("%.17g" % v for v in (
                ev.omega1_kev, ev.omega2_kev, ev.theta1p, ev.phi1p,
                ev.theta2p, ev.phi2p, ev.weight)) + "\n")


def read_events(path):
    """Read an event file back into (header dict, list of PairEvent)."""
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline().strip()
        if not header_line.startswith("# "):
            raise ValueError("missing schema header line")
        header = dict(kv.split("=", 1) for kv in header_line[2:].split())
        columns = fh.readline().strip().split(",")
        if tuple(columns) != EVENT_FIELDS:
            raise ValueError(f"unexpected event columns {columns}")
        events = []
        for line in fh:
            vals = [float(v) for v in line.split(",")]
            events.append(PairEvent(*vals))
    return header, events
