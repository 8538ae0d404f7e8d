"""Matplotlib rendering of grids and rate curves to image files."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .quadrature import GridResult


def render_grid_png(result: GridResult, path, title: str = "") -> None:
    """Isodensity map of log10(value); masked cells drawn blank."""
    lg = result.log10_values()
    lg = np.where(result.mask == 0, lg, np.nan)
    finite = lg[np.isfinite(lg)]
    if finite.size:
        vmax = np.ceil(finite.max())
        vmin = max(np.floor(finite.min()), vmax - 8)
    else:
        vmin, vmax = -10, 0
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    mesh = ax.pcolormesh(result.omega1_kev, result.angles, lg.T,
                         shading="nearest", cmap="inferno",
                         vmin=vmin, vmax=vmax)
    cbar = fig.colorbar(mesh, ax=ax)
    cbar.set_label(f"log10 [{result.units}]")
    ax.set_xlabel("omega1 [keV]")
    ax.set_ylabel("theta [rad]")
    ax.set_title(title or result.quantity)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_rates_png(omega1_kev, rates, units: str, path,
                     title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.semilogy(omega1_kev, rates, "-", lw=1.5)
    ax.set_xlabel("omega1 [keV]")
    ax.set_ylabel(units)
    ax.set_title(title or "pair rate")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
