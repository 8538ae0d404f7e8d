"""Machine-readable scenario reports.

A report is a key-value tree: an echo of the scenario inputs, derived
quantities (each tagged with its unit and the operation that produced
it), outputs, and provenance. Where a widely quoted headline value for
the scenario differs from the formula evaluation, both are reported.
"""

import math

from . import __version__, rates
from .kinematics import (
    ScatterConfig,
    omega1_max,
    omega1_max_approx,
    omega1_max_dressed,
)
from .scenario import Scenario
from .units import kev_to_natural, natural_to_kev


def _q(value, unit, op, note=""):
    entry = {"value": value, "unit": unit, "op": op}
    if note:
        entry["note"] = note
    return entry


def build_report(scn: Scenario, seed=None) -> dict:
    report = {
        "inputs": scn.raw,
        "derived": {},
        "outputs": {},
        "provenance": {
            "version": __version__,
            "scenario": scn.name,
            "seed": seed,
            "ir_cutoff_kev": scn.get("grid", "ir_cutoff",
                                     scn.get("sampler", "ir_cutoff", 0.1)),
        },
    }
    derived = report["derived"]
    base = scn.scatter_base()

    if scn.has("beam", "omega_L"):
        _inverse_block(scn, base, derived, report["outputs"])
    if scn.has("target"):
        _fixed_target_block(scn, base, derived, report["outputs"])
    return report


def _inverse_block(scn: Scenario, base: ScatterConfig, derived, outputs):
    g = base.gamma
    on_axis = ScatterConfig(base.omega, base.alpha, 0.0, 0.0, 0.0, 0.0,
                            base.electron)
    w1max = natural_to_kev(omega1_max(on_axis))
    derived["omega1_max_on_axis"] = _q(w1max, "keV", "kinematics.omega1_max")
    if g >= 10:
        approx = natural_to_kev(
            omega1_max_approx(g, base.omega, math.pi - base.alpha, 0.0))
        derived["omega1_max_on_axis_approx"] = _q(
            approx, "keV", "kinematics.omega1_max_approx")

    if scn.has("beam", "I_L"):
        b = scn.beam_params()
        E_L = rates.laser_field_strength(b.I_L_w_cm2)
        a_L = rates.aL_from_intensity(b.I_L_w_cm2, b.omega_L_ev)
        lam_L = rates.wavelength_from_energy(b.omega_L_ev)
        derived["laser_field_strength"] = _q(E_L, "V/m",
                                             "rates.laser_field_strength")
        derived["laser_wavelength"] = _q(lam_L, "m",
                                         "rates.wavelength_from_energy")
        derived["a_L_computed"] = _q(
            a_L, "", "rates.aL_from_intensity",
            "self-consistent with omega_L; see also the 1 um-convention value")
        a_L_1um = rates.laser_strength_aL(E_L, 1e-6)
        derived["a_L_quoted_1um_convention"] = _q(
            a_L_1um, "", "rates.laser_strength_aL(lambda=1um)",
            "headline value assumes a 1 um wavelength")
        derived["effective_mass_computed"] = _q(
            math.sqrt(1.0 + a_L**2), "m_e", "kinematics.quasimomentum")
        derived["effective_mass_quoted_aL"] = _q(
            math.sqrt(1.0 + a_L_1um**2), "m_e", "kinematics.quasimomentum")
        derived["unruh_temperature"] = _q(
            rates.unruh_temperature(a_L, b.omega_L_ev), "K",
            "rates.unruh_temperature")
        lum = rates.luminosity_per_electron(b)
        derived["luminosity_per_electron_formula"] = _q(
            lum, "1/b", "rates.luminosity_per_electron",
            "printed overlap formula I tau / (4 hbar omega)")
        derived["luminosity_per_electron_quoted"] = _q(
            rates.QUOTED_TABLETOP["luminosity_per_electron_b"], "1/b",
            "quoted", "Gaussian-overlap counting gives I tau / (2 hbar "
            "omega), about twice the formula value")
        if g >= 10:
            derived["omega1_max_dressed_on_axis"] = _q(
                natural_to_kev(omega1_max_dressed(g, base.omega, base.alpha,
                                                  0.0, a_L)),
                "keV", "kinematics.omega1_max_dressed")
        lam_U = rates.undulator_period_from_laser(
            lam_L, math.pi - base.alpha, base.electron.beta)
        derived["undulator_period"] = _q(
            lam_U, "m", "rates.undulator_period_from_laser")
        derived["undulator_fundamental"] = _q(
            rates.undulator_fundamental(a_L, g, lam_U), "eV",
            "rates.undulator_fundamental")
        if b.sigma_le_m > 0:
            derived["two_photon_pulse_duration"] = _q(
                rates.two_photon_pulse_duration_s(b), "s",
                "rates.two_photon_pulse_duration_s",
                "set by the electron bunch length, not tau_L")

        if scn.has("detectors"):
            det1, det2 = scn.detectors()
            cfg = ScatterConfig(base.omega, base.alpha, det1.theta_rad,
                                det1.phi_rad, det2.theta_rad, det2.phi_rad,
                                base.electron)
            y = rates.pair_yield_per_electron(
                cfg, kev_to_natural(det1.center_energy_kev), b)
            outputs["pair_yield_per_electron"] = _q(
                y, "pairs/(keV sr^2 electron)",
                "rates.pair_yield_per_electron")
            outputs["pairs_per_pulse_computed"] = _q(
                rates.pairs_per_pulse(y, b.N_e, det1, det2), "pairs/pulse",
                "rates.pairs_per_pulse",
                "computed cross section and formula luminosity")
            y_quoted = (rates.QUOTED_TABLETOP["peak_pair_xsec_b_kev_sr2"]
                        * rates.QUOTED_TABLETOP["luminosity_per_electron_b"])
            outputs["pairs_per_pulse_quoted_ingredients"] = _q(
                rates.pairs_per_pulse(y_quoted, b.N_e, det1, det2),
                "pairs/pulse", "rates.pairs_per_pulse",
                "8 mb/(keV sr^2) cross section and 0.06/b luminosity")


def _fixed_target_block(scn: Scenario, base: ScatterConfig, derived, outputs):
    target = scn.target()
    derived["areal_electron_density"] = _q(
        target.areal_electron_density_per_barn, "1/b",
        "rates.TargetConfig")
    if scn.has("detectors"):
        det_keys = ("theta1", "phi1", "theta2", "phi2", "solid_angle1",
                    "solid_angle2", "bandwidth")
        scn.require("detectors", *det_keys)
        center = scn.get("detectors", "center_energy")
        if center is None and scn.has("grid", "omega1_min"):
            center = 0.5 * (scn.get("grid", "omega1_min")
                            + scn.get("grid", "omega1_max"))
        if center is not None:
            det1, det2 = scn.detectors(center)
            cfg = ScatterConfig(base.omega, base.alpha, det1.theta_rad,
                                det1.phi_rad, det2.theta_rad, det2.phi_rad,
                                base.electron)
            derived["omega1_max_at_detector1"] = _q(
                natural_to_kev(omega1_max(cfg)), "keV",
                "kinematics.omega1_max")
            outputs["rate_at_center"] = _q(
                rates.fixed_target_rate(target, det1, det2, cfg), "pairs/s",
                "rates.fixed_target_rate")
            derived["collinear_amplification"] = _q(
                4.0 * math.pi / det1.solid_angle_sr, "",
                "dcs.same_direction_double_diff",
                "rate gain if the pair is detected in one solid angle")
