"""Curve data for the standard figure set (numbers 2 to 7).

Each figure is a list of :class:`Panel` objects holding named columns and a
dictionary of qualitative checks evaluated on the emitted data.  No plotting
happens here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .chd import chd_spectrum, h_split
from .dynamics import default_tau_grid
from .io import write_csv, write_json
from .model import AtomParams, build_liouvillian, eigenvalues
from .spectra import composite_omega_grid, noise_correlator_spectra, power_spectrum, squeezing_spectrum, variance

__all__ = ["Panel", "FIGURES", "figure_data", "write_figure", "dispersive_sideband", "sharp_peak_weight", "STANDARD_RATES"]

STANDARD_RATES = {"gamma_d": 0.05, "gamma_a": 0.015}
WEAK, SATURATING, STRONG = 0.1, 0.2625, 3.5
# relative sharp-peak weight thresholds for "present" and "absent"
SHARP, FLAT = 0.1, 0.05


@dataclass
class Panel:
    name: str
    params: dict
    columns: dict
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def _params(omega: float, **rates) -> AtomParams:
    kw = dict(STANDARD_RATES)
    kw.update(rates)
    return AtomParams(omega=omega, **kw)


def _describe(p: AtomParams) -> dict:
    return {"omega": p.omega, "gamma": p.gamma, "gamma_d": p.gamma_d, "gamma_a": p.gamma_a, "eta": p.eta}


def _sideband(p: AtomParams) -> float:
    """``|Im lambda_+|`` of the exact Bloch matrix."""
    return float(abs(eigenvalues(build_liouvillian(p)).lambda_plus.imag))


def _peaks_at(omega, values, p: AtomParams) -> bool:
    """Largest positive-frequency local maximum lies within ``3 gamma_plus/8`` of ``Im lambda_+``.

    The window is half the sideband half-width; overlap with the central
    feature pulls the maximum slightly inwards.
    """
    target = _sideband(p)
    pos = omega > 0.5 * target
    w, v = omega[pos], values[pos]
    interior = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])) + 1
    if interior.size == 0:
        return False
    best = interior[np.argmax(v[interior])]
    return abs(w[best] - target) <= 0.375 * p.gamma_plus


def sharp_peak_weight(omega, values, lam2: float, span: float = 20.0) -> float:
    """Weight of a central Lorentzian of half-width ``lam2``, relative to the curve maximum.

    Linear least squares over ``|w| <= span * lam2`` with an even sextic
    background for the broad structure.
    """
    mask = np.abs(omega) <= span * lam2
    x = omega[mask]
    basis = np.column_stack([lam2**2 / (x**2 + lam2**2), np.ones_like(x), x**2, x**4, x**6])
    coef, *_ = np.linalg.lstsq(basis, values[mask], rcond=None)
    return float(coef[0] / max(np.max(np.abs(values)), 1e-300))


def dispersive_sideband(omega, residual, p: AtomParams) -> bool:
    """Residual changes sign across ``Im lambda_+`` at offsets ``+/- 3 gamma_plus/8``."""
    target, eps = _sideband(p), 0.375 * p.gamma_plus
    lo, hi = np.interp(target - eps, omega, residual), np.interp(target + eps, omega, residual)
    return bool(lo * hi < 0)


def _lam2(p: AtomParams) -> float:
    return abs(eigenvalues(build_liouvillian(p)).lambda2.real)


def _spectrum_panel(name, p, omega, builder):
    two = p.two_level()
    cols = {
        "omega": omega,
        "exact": builder("exact", p, omega),
        "approx": builder("approximate", p, omega),
        "two_level": builder("exact", two, omega),
    }
    return Panel(name, _describe(p), cols)


def figure2() -> list[Panel]:
    panels = []
    for tag, om in (("a", SATURATING), ("b", STRONG)):
        p = _params(om)
        omega = composite_omega_grid(p)
        panel = _spectrum_panel(f"fig2{tag}", p, omega, lambda e, s, w: power_spectrum(e, s, w).values)
        lam2 = _lam2(p)
        panel.checks["sharp_peak_3la"] = sharp_peak_weight(omega, panel.columns["exact"], lam2) > SHARP
        panel.checks["no_sharp_peak_2la"] = abs(sharp_peak_weight(omega, panel.columns["two_level"], lam2)) < FLAT
        panel.checks["nonnegative"] = bool(np.min(panel.columns["exact"]) >= 0)
        if om == STRONG:
            panel.checks["sidebands_at_im_lambda"] = _peaks_at(omega, panel.columns["exact"], p)
        panels.append(panel)
    return panels


def figure3() -> list[Panel]:
    panels = []
    for tag, om in (("a", WEAK), ("b", SATURATING), ("c", STRONG)):
        p = _params(om)
        omega = composite_omega_grid(p)
        panel = _spectrum_panel(f"fig3{tag}", p, omega, lambda e, s, w: squeezing_spectrum(e, s, np.pi / 2, w).values)
        panel.columns["exact_phi0"] = squeezing_spectrum("exact", p, 0.0, omega).values
        lam2 = _lam2(p)
        panel.checks["sharp_peak_phi90"] = sharp_peak_weight(omega, panel.columns["exact"], lam2) > SHARP
        panel.checks["no_sharp_peak_phi0"] = abs(sharp_peak_weight(omega, panel.columns["exact_phi0"], lam2)) < FLAT
        panel.checks["no_sharp_peak_2la"] = abs(sharp_peak_weight(omega, panel.columns["two_level"], lam2)) < FLAT
        if om == WEAK:
            s = panel.columns["exact"]
            panel.checks["squeezed_sidebands"] = bool(np.interp(0.0, omega, s) > 0 and np.interp(0.3, omega, s) < 0 and np.interp(-0.3, omega, s) < 0)
        if om == STRONG:
            panel.checks["sidebands_at_im_lambda"] = _peaks_at(omega, np.abs(panel.columns["exact"]), p)
        panels.append(panel)
    return panels


def figure4() -> list[Panel]:
    p = _params(STRONG)
    omega = composite_omega_grid(p)
    s1, s2 = noise_correlator_spectra(p, omega)
    panel = Panel("fig4", _describe(p), {"omega": omega, "S1": s1.values, "S2": s2.values})
    lam2 = _lam2(p)
    diff, total = s2.values - s1.values, s2.values + s1.values
    panel.checks["sharp_peak_in_difference"] = sharp_peak_weight(omega, diff, lam2) > SHARP
    panel.checks["no_sharp_peak_in_sum"] = abs(sharp_peak_weight(omega, total, lam2)) < FLAT
    panel.checks["sidebands_at_im_lambda"] = _peaks_at(omega, s2.values, p)
    return [panel]


def figure5() -> list[Panel]:
    grid = np.linspace(0.0, 2.0, 401)
    three = [_params(w) for w in grid]
    two = [p.two_level() for p in three]
    cols = {
        "omega": grid,
        "V0_3la": np.array([variance(p, 0.0) for p in three]),
        "V90_3la": np.array([variance(p, np.pi / 2) for p in three]),
        "V0_2la": np.array([variance(p, 0.0) for p in two]),
        "V90_2la": np.array([variance(p, np.pi / 2) for p in two]),
    }
    panel = Panel("fig5", {"omega_min": 0.0, "omega_max": 2.0, "count": grid.size, **STANDARD_RATES, "eta": 1.0}, cols)
    v3, v2 = cols["V90_3la"], cols["V90_2la"]
    panel.checks["V0_nonnegative"] = bool(np.all(cols["V0_3la"] >= 0) and np.all(cols["V0_2la"] >= 0))
    panel.checks["squeezing_min_near_saturation"] = abs(grid[np.argmin(v3)] - SATURATING) <= 0.1 * SATURATING
    panel.checks["depth_reduced"] = bool(0 > np.min(v3) > np.min(v2))
    panel.checks["window_reduced"] = bool(np.count_nonzero(v3 < 0) < np.count_nonzero(v2 < 0))
    return [panel]


def figure6() -> list[Panel]:
    panels = []
    for tag, om in (("a", SATURATING), ("b", STRONG)):
        p = _params(om)
        tau = default_tau_grid(p)
        approx = h_split("approximate", p, tau)
        exact = h_split("exact", p, tau)
        cols = {"tau": tau, "h": approx.h, "one_plus_h2": 1.0 + approx.h2, "h3": approx.h3, "h_exact": exact.h}
        panel = Panel(f"fig6{tag}", _describe(p), cols)
        panel.checks["starts_at_zero"] = abs(exact.h[0]) < 1e-10
        panel.checks["asymptote_one"] = abs(approx.h[-1] - 1.0) < 1e-3 and abs(exact.h[-1] - 1.0) < 1e-3
        panel.checks["decomposition"] = bool(np.max(np.abs(approx.h - 1 - approx.h2 - approx.h3)) < 1e-10)
        panels.append(panel)
    return panels


def figure7() -> list[Panel]:
    panels = []
    for tag, om in (("a", WEAK), ("b", SATURATING), ("c", STRONG)):
        p = _params(om)
        two = p.two_level()
        omega = composite_omega_grid(p)
        cols = {
            "omega": omega,
            "chd_3la": chd_spectrum("approximate", p, np.pi / 2, omega).values,
            "chd_3la_exact": chd_spectrum("exact", p, np.pi / 2, omega).values,
            "chd_2la": chd_spectrum("approximate", two, np.pi / 2, omega).values,
            "order3_3la": chd_spectrum("exact", p, np.pi / 2, omega, "3").values,
            "order3_2la": chd_spectrum("exact", two, np.pi / 2, omega, "3").values,
        }
        panel = Panel(f"fig7{tag}", _describe(p), cols)
        lam2 = _lam2(p)
        panel.checks["sharp_peak_3la"] = sharp_peak_weight(omega, cols["chd_3la_exact"], lam2) > SHARP
        if om in (WEAK, SATURATING):
            panel.checks["order3_peak_negative"] = bool(np.interp(0.0, omega, cols["order3_3la"]) < 0)
        if om == STRONG:
            residual = cols["chd_3la_exact"] - chd_spectrum("exact", p, np.pi / 2, omega, "2").values
            panel.checks["dispersive_sidebands"] = dispersive_sideband(omega, residual, p)
        panels.append(panel)
    return panels


FIGURES = {2: figure2, 3: figure3, 4: figure4, 5: figure5, 6: figure6, 7: figure7}


def figure_data(number: int) -> list[Panel]:
    if number not in FIGURES:
        raise ValueError(f"figure must be one of {sorted(FIGURES)}, got {number}")
    return FIGURES[number]()


def write_figure(number: int, outdir, header: dict | None = None) -> tuple[list[Panel], list[Path]]:
    """Write one CSV per panel and a JSON manifest; returns the panels and paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    panels = figure_data(number)
    paths = []
    for panel in panels:
        meta = dict(header or {})
        meta.update({"figure": number, "panel": panel.name})
        meta.update(panel.params)
        paths.append(write_csv(outdir / f"{panel.name}.csv", panel.columns, meta))
    manifest = {
        "figure": number,
        "header": header or {},
        "panels": [{"name": pn.name, "params": pn.params, "checks": pn.checks, "file": f"{pn.name}.csv"} for pn in panels],
    }
    paths.append(write_json(outdir / f"fig{number}_manifest.json", manifest))
    return panels, paths
