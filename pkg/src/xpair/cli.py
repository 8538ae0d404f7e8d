"""Command-line front end.

    xpair grid   --scenario FILE [--out PATH] [--tol X]
    xpair rates  --scenario FILE [--out PATH]
    xpair sample --scenario FILE [--out PATH] [--seed N] [-n N]
    xpair report --scenario FILE [--out PATH] [--seed N]

--scenario accepts a file path or a bundled preset name (fig2, fig3,
fig4a, fig4b, fig5, fig6, fig7). Delimited outputs carry a schema
header line; grid and rates runs also render a PNG next to the output
file. Exit codes: 0 success, 2 validation failure, 3 numerical failure,
4 I/O failure.
"""

import argparse
import json
import sys

from . import __version__, quadrature, rates, report, sampler
from .errors import ScenarioError, XpairError
from .kinematics import ScatterConfig
from .scenario import Scenario, load_scenario
from .units import kev_to_natural

SCHEMA_VERSION = 1


def _grid_header(kind, scn, units, quantity=""):
    parts = [f"# schema={SCHEMA_VERSION}", f"kind={kind}"]
    if quantity:
        parts.append(f"quantity={quantity}")
    parts.append(f"units={units.replace(' ', '')}")
    parts.append(f"scenario={scn.name or '-'}")
    parts.append(f"version={__version__}")
    return " ".join(parts)


def cmd_grid(scn: Scenario, out_path: str, rel_tol: float | None) -> int:
    base = scn.scatter_base()
    spec = scn.grid_spec()
    quantity = scn.get("grid", "quantity", "triple_xsec")
    tol = rel_tol if rel_tol is not None else scn.get("grid", "rel_tol", 1e-4)
    if quantity == "triple_xsec":
        result = quadrature.triple_xsec_grid(base, spec)
    elif quantity == "pair_yield":
        lum = rates.luminosity_per_electron(scn.beam_params())
        result = quadrature.pair_yield_grid(base, spec, lum)
    elif quantity == "photon2_integrated":
        result = quadrature.photon2_integrated_grid(base, spec, rel_tol=tol)
    else:
        result = quadrature.single_compton_grid(
            base, spec, scn.get("beam", "tau_L", 50.0))

    lg = result.log10_values()
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_grid_header("grid", scn, result.units, quantity) + "\n")
        fh.write("omega1_keV,theta_rad,value,log10_value,mask_code\n")
        for i, w1 in enumerate(result.omega1_kev):
            for j, th in enumerate(result.angles):
                fh.write(f"{w1:.10g},{th:.10g},{result.values[i, j]:.10e},"
                         f"{lg[i, j]:.6f},{int(result.mask[i, j])}\n")
    from .figures import render_grid_png
    render_grid_png(result, _png_path(out_path),
                    title=f"{scn.name or quantity}")
    print(f"grid: {result.values.shape[0]}x{result.values.shape[1]} cells, "
          f"{int((result.mask != 0).sum())} masked -> {out_path}")
    return 0


def _png_path(out_path: str) -> str:
    stem = out_path[:-4] if out_path.endswith(".csv") else out_path
    return stem + ".png"


def cmd_rates(scn: Scenario, out_path: str) -> int:
    scn.require("grid", "omega1_min", "omega1_max", "omega1_steps")
    import numpy as np

    w1_kev = np.linspace(scn.get("grid", "omega1_min"),
                         scn.get("grid", "omega1_max"),
                         scn.get("grid", "omega1_steps"))
    base = scn.scatter_base()
    fixed_target = scn.has("target")
    if fixed_target:
        target = scn.target()
        units = "pairs/s"
    else:
        beam = scn.beam_params()
        lum = rates.luminosity_per_electron(beam)
        units = "pairs/pulse"

    values = []
    for w1 in w1_kev:
        det1, det2 = scn.detectors(float(w1))
        cfg = ScatterConfig(base.omega, base.alpha, det1.theta_rad,
                            det1.phi_rad, det2.theta_rad, det2.phi_rad,
                            base.electron)
        if fixed_target:
            values.append(rates.fixed_target_rate(target, det1, det2, cfg))
        else:
            y = rates.pair_yield_per_electron(cfg, kev_to_natural(float(w1)),
                                              beam)
            values.append(rates.pairs_per_pulse(y, beam.N_e, det1, det2))

    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_grid_header("rates", scn, units) + "\n")
        fh.write(f"omega1_keV,rate_{units.replace('/', '_per_')}\n")
        for w1, r in zip(w1_kev, values):
            fh.write(f"{w1:.10g},{r:.10e}\n")
    from .figures import render_rates_png
    render_rates_png(w1_kev, values, units, _png_path(out_path),
                     title=scn.name or "pair rate")

    doc = report.build_report(scn)
    doc["outputs"]["rate_curve"] = {
        "omega1_kev": [float(w) for w in w1_kev],
        "values": values,
        "unit": units,
    }
    report_path = (out_path[:-4] if out_path.endswith(".csv") else out_path) \
        + ".report.json"
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
    print(f"rates: {len(values)} points ({units}), min={min(values):.3e} "
          f"max={max(values):.3e} -> {out_path}")
    return 0


def cmd_sample(scn: Scenario, out_path: str, n: int | None,
               seed: int | None) -> int:
    sc = scn.sampler_config(n_events=n, seed=seed)
    run = sampler.sample_pairs(sc)
    sampler.write_events(out_path, run, scn.name)
    print(f"sample: {len(run.events)} events, acceptance "
          f"{run.acceptance_rate:.3f}, restricted total cross section "
          f"{run.total_xsec_b():.4e} +- {run.total_xsec_err_b():.1e} b "
          f"-> {out_path}")
    return 0


def cmd_report(scn: Scenario, out_path: str | None, seed: int | None) -> int:
    doc = report.build_report(scn, seed=seed)
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(f"report -> {out_path}")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xpair",
        description="Double Compton photon-pair cross sections, rates, "
                    "grids, and event sampling.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_default):
        p.add_argument("--scenario", required=True,
                       help="scenario file or preset name")
        p.add_argument("--out", default=out_default, help="output path")

    p_grid = sub.add_parser("grid", help="evaluate an (omega1, theta) grid")
    common(p_grid, "grid.csv")
    p_grid.add_argument("--tol", type=float, default=None,
                        help="relative tolerance for integrated quantities")

    p_rates = sub.add_parser("rates", help="rate curve plus scalar report")
    common(p_rates, "rates.csv")

    p_sample = sub.add_parser("sample", help="draw correlated pair events")
    common(p_sample, "events.csv")
    p_sample.add_argument("-n", type=int, default=None,
                          help="number of events (overrides scenario)")
    p_sample.add_argument("--seed", type=int, default=None)

    p_report = sub.add_parser("report", help="derived-quantity report")
    p_report.add_argument("--scenario", required=True)
    p_report.add_argument("--out", default=None)
    p_report.add_argument("--seed", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scn = load_scenario(args.scenario)
        if args.command == "grid":
            return cmd_grid(scn, args.out, args.tol)
        if args.command == "rates":
            return cmd_rates(scn, args.out)
        if args.command == "sample":
            return cmd_sample(scn, args.out, args.n, args.seed)
        return cmd_report(scn, args.out, args.seed)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    except XpairError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
