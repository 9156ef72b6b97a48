"""Command-line front end.

Exit codes: 0 success, 1 parameter or usage error, 2 numerical failure,
3 validation failures (``validate`` only).
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .chd import chd_spectrum, h_correlation
from .dynamics import (
    corr_second_order,
    corr_third_order_fluct,
    corr_third_order_sandwich,
    evolve_approx,
    evolve_exact,
)
from .errors import DomainError, IntegrationError, ParameterError, SingularSystemError, ZeroDenominatorError
from .figures import FIGURES, write_figure
from .io import csv_text, json_text
from .model import COMPONENTS, AtomParams, build_liouvillian, eigenvalues, eigenvalues_approx, steady_state_analytic, steady_state_exact
from .spectra import composite_omega_grid, noise_correlator_spectra, power_spectrum, squeezing_spectrum, variance
from .validation import REPORT_NAME, ValidationReport, run_approximation_sweep, run_identity_suite

__all__ = ["main", "build_parser"]

LOGGER = logging.getLogger("flucto")

EXIT_OK, EXIT_PARAM, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3
ENGINE_FLAGS = {"exact": ("exact",), "approx": ("approximate",), "both": ("exact", "approximate")}
SUFFIX = {"exact": "exact", "approximate": "approx"}
PHI_FLAGS = {0: 0.0, 90: np.pi / 2}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors share exit code 1 with parameter errors; 2 is reserved for numerics
    def error(self, message):
        self.exit(EXIT_PARAM, f"{self.prog}: error: {message} (see '{self.prog} --help')\n")


# grids


def _grid(lo: float, hi: float, count: int, spacing: str, what: str) -> np.ndarray:
    if count < 2:
        raise UsageError(f"--{what}-count must be >= 2")
    if not hi > lo:
        raise UsageError(f"--{what}-max must exceed --{what}-min")
    if spacing == "linear":
        return np.linspace(lo, hi, count)
    if spacing == "geometric":
        if lo < 0:
            raise UsageError(f"geometric --{what} grid needs a non-negative minimum")
        if lo == 0:
            # keep tau = 0 and space the rest geometrically
            return np.concatenate(([0.0], np.geomspace(hi * 1e-4, hi, count - 1)))
        return np.geomspace(lo, hi, count)
    raise UsageError(f"unknown spacing {spacing!r}")


def tau_grid(args, params: AtomParams) -> np.ndarray:
    if args.tau_count < 2:
        raise UsageError("--tau-count must be >= 2")
    lam2 = abs(eigenvalues_approx(params).lambda2)
    hi = args.tau_max if args.tau_max is not None else (10.0 / lam2 if lam2 > 0 else 50.0 / params.gamma_plus)
    if args.tau_spacing == "composite":
        raise UsageError("composite spacing is only valid for omega grids")
    if args.tau_spacing == "geometric" and args.tau_min > 0:
        return _grid(args.tau_min, hi, args.tau_count, "geometric", "tau")
    if args.tau_spacing == "geometric":
        return np.concatenate(([0.0], np.geomspace(1e-3 / params.gamma, hi, args.tau_count - 1)))
    return _grid(args.tau_min, hi, args.tau_count, "linear", "tau")


def omega_grid(args, params: AtomParams) -> np.ndarray:
    if args.w_count is not None and args.w_count < 2:
        raise UsageError("--w-count must be >= 2")
    edge = 3.0 * (params.omega + params.gamma_plus)
    lo = args.w_min if args.w_min is not None else -edge
    hi = args.w_max if args.w_max is not None else edge
    if args.w_spacing == "composite":
        if args.w_count is not None:
            n = max(args.w_count, 4)
            grid = composite_omega_grid(params, inner=n // 2 + 1, outer=n)
        else:
            grid = composite_omega_grid(params)
        if args.w_min is None and args.w_max is None:
            return grid
        # explicit bounds clip the composite grid and pin its ends
        if not hi > lo:
            raise UsageError("--w-max must exceed --w-min")
        return np.unique(np.concatenate(([lo, hi], grid[(grid > lo) & (grid < hi)])))
    return _grid(lo, hi, args.w_count or 1001, args.w_spacing, "w")


# parser


def _add_params(p: argparse.ArgumentParser, omega_required: bool = True) -> None:
    g = p.add_argument_group("physical parameters (units of gamma)")
    g.add_argument("--omega", type=float, required=omega_required, help="Rabi frequency")
    g.add_argument("--gamma-d", type=float, default=0.05, help="decay e->a (default 0.05)")
    g.add_argument("--gamma-a", type=float, default=0.015, help="decay a->g (default 0.015)")
    g.add_argument("--eta", type=float, default=1.0, help="detection efficiency (default 1)")
    g.add_argument("--e-off", type=float, default=None, help="coherent offset for phi=0 CHD (default sqrt(alpha_ee))")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default="-", help="output file ('-' for stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_engine(p: argparse.ArgumentParser, default: str = "exact") -> None:
    p.add_argument("--engine", choices=tuple(ENGINE_FLAGS), default=default)


def _add_tau(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("tau grid")
    g.add_argument("--tau-min", type=float, default=0.0)
    g.add_argument("--tau-max", type=float, default=None, help="default 10/|lambda_2|")
    g.add_argument("--tau-count", type=int, default=400)
    g.add_argument("--tau-spacing", choices=("linear", "geometric", "composite"), default="geometric")


def _add_omega_grid(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("frequency grid")
    g.add_argument("--w-min", type=float, default=None)
    g.add_argument("--w-max", type=float, default=None)
    g.add_argument("--w-count", type=int, default=None)
    g.add_argument("--w-spacing", choices=("linear", "geometric", "composite"), default="composite")


def _phi(value: str) -> int:
    try:
        deg = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("--phi takes 0 or 90 (degrees)") from None
    if deg not in PHI_FLAGS:
        raise argparse.ArgumentTypeError("--phi takes 0 or 90 (degrees)")
    return deg


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flucto", description="Fluctuation spectra of shelved resonance fluorescence.")
    parser.add_argument("--version", action="version", version=f"flucto {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("steady", help="stationary moments")
    _add_params(p)
    _add_engine(p, "both")
    _add_output(p)

    p = sub.add_parser("eigen", help="decay rates of the Bloch matrix")
    _add_params(p)
    _add_engine(p, "both")
    _add_output(p)

    p = sub.add_parser("evolve", help="transient from the ground state")
    _add_params(p)
    _add_engine(p)
    _add_tau(p)
    _add_output(p)

    p = sub.add_parser("corr", help="two-time correlation functions")
    _add_params(p)
    _add_engine(p)
    p.add_argument("--kind", choices=("minus", "plus", "sandwich", "third"), default="minus",
                   help="<Dsig+ Dsig->, <Dsig+ Dsig+>, <sig+ s sig->, or <Dsig+ Ds Dsig->")
    _add_tau(p)
    _add_output(p)

    p = sub.add_parser("spectrum", help="power, squeezing and noise-correlator spectra")
    _add_params(p)
    _add_engine(p)
    p.add_argument("--kind", choices=("incoherent", "squeezing", "noise"), default="incoherent")
    p.add_argument("--phi", type=_phi, default=90, help="quadrature angle in degrees (0 or 90)")
    _add_omega_grid(p)
    _add_output(p)

    p = sub.add_parser("variance", help="normally ordered quadrature variance")
    _add_params(p)
    _add_engine(p, "both")
    p.add_argument("--phi", type=_phi, default=90)
    _add_output(p)

    p = sub.add_parser("chd", help="conditional homodyne correlation h(tau) or its spectrum")
    _add_params(p)
    _add_engine(p)
    p.add_argument("--phi", type=_phi, default=90)
    p.add_argument("--spectrum", action="store_true", help="emit the CHD spectrum and its orders instead of h(tau)")
    _add_tau(p)
    _add_omega_grid(p)
    _add_output(p)

    p = sub.add_parser("validate", help="identity suite (and optional approximation sweep)")
    _add_params(p, omega_required=False)
    p.add_argument("--sweep", action="store_true", help="also run the exact-vs-approximate sweep")
    p.add_argument("--out", default=REPORT_NAME, help=f"report path (default {REPORT_NAME})")

    p = sub.add_parser("figure", help="regenerate the data of one figure")
    p.add_argument("number", type=int, choices=sorted(FIGURES))
    p.add_argument("--out", default=".", help="output directory")
    return parser


# commands


def _params(args) -> AtomParams:
    return AtomParams(omega=args.omega, gamma_d=args.gamma_d, gamma_a=args.gamma_a, eta=args.eta, e_off=args.e_off)


def _header(args, params: AtomParams | None, **extra) -> dict:
    head = {"tool": f"flucto {__version__}", "command": args.command}
    if params is not None:
        head.update(gamma=params.gamma, gamma_d=params.gamma_d, gamma_a=params.gamma_a, omega=params.omega, eta=params.eta)
        if params.e_off is not None:
            head["e_off"] = params.e_off
    if getattr(args, "engine", None):
        head["engine"] = args.engine
    head.update(extra)
    return head


def _grid_note(grid: np.ndarray) -> str:
    return f"[{grid[0]:.6g}, {grid[-1]:.6g}] n={grid.size}"


def _emit(args, columns: dict, header: dict) -> None:
    text = json_text({"header": header, "columns": columns}) if args.format == "json" else csv_text(columns, header)
    if args.out == "-":
        sys.stdout.write(text)
        return
    path = Path(args.out)
    if path.parent and not path.parent.exists():
        raise UsageError(f"output directory {path.parent} does not exist")
    path.write_text(text)
    LOGGER.info("wrote %s", path)


def cmd_steady(args) -> int:
    params = _params(args)
    names = np.array(["alpha_minus_re", "alpha_minus_im", "alpha_ee", "alpha_gg", "alpha_aa"])
    cols: dict = {"quantity": names}
    for engine in ENGINE_FLAGS[args.engine]:
        ss = steady_state_exact(build_liouvillian(params)) if engine == "exact" else steady_state_analytic(params)
        cols[SUFFIX[engine]] = np.array([ss.alpha_minus.real, ss.alpha_minus.imag, ss.alpha_ee, ss.alpha_gg, ss.alpha_aa])
    _emit(args, cols, _header(args, params))
    return EXIT_OK


def cmd_eigen(args) -> int:
    params = _params(args)
    labels = ("lambda1", "lambda2", "lambda_plus", "lambda_minus")
    cols: dict = {"eigenvalue": np.array(labels)}
    for engine in ENGINE_FLAGS[args.engine]:
        es = eigenvalues(build_liouvillian(params)) if engine == "exact" else eigenvalues_approx(params)
        cols[SUFFIX[engine]] = np.array([getattr(es, name) for name in labels], dtype=complex)
    _emit(args, cols, _header(args, params))
    return EXIT_OK


def cmd_evolve(args) -> int:
    params = _params(args)
    tau = tau_grid(args, params)
    cols: dict = {"tau": tau}
    for engine in ENGINE_FLAGS[args.engine]:
        series = evolve_exact(build_liouvillian(params), tau=tau) if engine == "exact" else evolve_approx(params, tau)
        for k, name in enumerate(COMPONENTS):
            cols[f"{name}_{SUFFIX[engine]}"] = series.values[:, k]
    _emit(args, cols, _header(args, params, tau_grid=_grid_note(tau)))
    return EXIT_OK


def cmd_corr(args) -> int:
    params = _params(args)
    tau = tau_grid(args, params)
    cols: dict = {"tau": tau}
    engines = ENGINE_FLAGS[args.engine]
    if args.kind == "third" and "approximate" in engines:
        raise UsageError("the third-order fluctuation correlator has no closed form; use --engine exact")
    for engine in engines:
        sfx = SUFFIX[engine]
        if args.kind in ("minus", "plus"):
            cols[f"corr_{sfx}"] = corr_second_order(engine, params, args.kind, tau).values
        else:
            series = corr_third_order_sandwich(engine, params, tau) if args.kind == "sandwich" else corr_third_order_fluct(build_liouvillian(params), tau)
            for k, name in enumerate(COMPONENTS):
                cols[f"{name}_{sfx}"] = series.values[:, k]
    _emit(args, cols, _header(args, params, kind=args.kind, tau_grid=_grid_note(tau)))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    params = _params(args)
    omega = omega_grid(args, params)
    cols: dict = {"omega": omega}
    extra: dict = {"kind": args.kind, "omega_grid": _grid_note(omega)}
    for engine in ENGINE_FLAGS[args.engine]:
        sfx = SUFFIX[engine]
        if args.kind == "incoherent":
            s = power_spectrum(engine, params, omega)
            cols[f"S_{sfx}"] = s.values
            extra[f"coherent_weight_{sfx}"] = s.coherent_weight
        elif args.kind == "squeezing":
            cols[f"S_{sfx}"] = squeezing_spectrum(engine, params, PHI_FLAGS[args.phi], omega).values
            extra["phi_deg"] = args.phi
        else:
            s1, s2 = noise_correlator_spectra(params, omega, engine)
            cols[f"S1_{sfx}"], cols[f"S2_{sfx}"] = s1.values, s2.values
    _emit(args, cols, _header(args, params, **extra))
    return EXIT_OK


def cmd_variance(args) -> int:
    params = _params(args)
    phi = PHI_FLAGS[args.phi]
    cols: dict = {"phi_deg": np.array([float(args.phi)])}
    for engine in ENGINE_FLAGS[args.engine]:
        cols[f"V_{SUFFIX[engine]}"] = np.array([variance(params, phi, engine)])
    _emit(args, cols, _header(args, params))
    return EXIT_OK


def cmd_chd(args) -> int:
    params = _params(args)
    phi = PHI_FLAGS[args.phi]
    engines = ENGINE_FLAGS[args.engine]
    single = len(engines) == 1
    if args.spectrum:
        omega = omega_grid(args, params)
        cols: dict = {"omega": omega}
        for engine in engines:
            sfx = "" if single else f"_{SUFFIX[engine]}"
            for order, name in (("full", "S"), ("2", "S2"), ("3", "S3")):
                cols[name + sfx] = chd_spectrum(engine, params, phi, omega, order).values
        _emit(args, cols, _header(args, params, phi_deg=args.phi, omega_grid=_grid_note(omega)))
        return EXIT_OK
    tau = tau_grid(args, params)
    cols = {"tau": tau}
    for engine in engines:
        rec = h_correlation(engine, params, phi, tau, args.e_off)
        sfx = "" if single else f"_{SUFFIX[engine]}"
        cols["h" + sfx], cols["h2" + sfx], cols["h3" + sfx] = rec.h, rec.h2, rec.h3
    _emit(args, cols, _header(args, params, phi_deg=args.phi, tau_grid=_grid_note(tau)))
    return EXIT_OK


# points checked by a bare `validate`
DEFAULT_VALIDATION_POINTS = (
    dict(omega=0.1),
    dict(omega=0.2625),
    dict(omega=3.5),
    dict(omega=0.5, gamma_d=0.0, gamma_a=0.0),
)


def cmd_validate(args) -> int:
    report = ValidationReport()
    if args.omega is not None:
        points = [_params(args)]
    else:
        points = [AtomParams(eta=args.eta, **kw) for kw in DEFAULT_VALIDATION_POINTS]
    for p in points:
        LOGGER.info("identity suite at omega=%g gamma_d=%g gamma_a=%g", p.omega, p.gamma_d, p.gamma_a)
        report.extend(run_identity_suite(p))
    if args.sweep:
        LOGGER.info("approximation sweep")
        report.extend(run_approximation_sweep())
    path = report.write(args.out)
    s = report.summary
    print(f"{s['passed']}/{s['total']} cases passed; report written to {path}")
    for c in report.failures:
        print(f"FAIL {c.quantity} {c.metric} params={c.params} error={c.error:.3g} tol={c.tolerance:.3g} {c.note}".rstrip())
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_figure(args) -> int:
    start = time.perf_counter()
    panels, paths = write_figure(args.number, args.out, {"tool": f"flucto {__version__}"})
    elapsed = time.perf_counter() - start
    for panel in panels:
        for name, ok in panel.checks.items():
            print(f"{'PASS' if ok else 'FAIL'} {panel.name} {name}")
    print(f"figure {args.number}: {len(paths)} files in {args.out} ({elapsed:.2f} s)")
    return EXIT_OK if all(p.ok for p in panels) else EXIT_VALIDATION


COMMANDS = {
    "steady": cmd_steady,
    "eigen": cmd_eigen,
    "evolve": cmd_evolve,
    "corr": cmd_corr,
    "spectrum": cmd_spectrum,
    "variance": cmd_variance,
    "chd": cmd_chd,
    "validate": cmd_validate,
    "figure": cmd_figure,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ParameterError, DomainError, ZeroDenominatorError, UsageError) as exc:
        print(f"flucto: error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except OSError as exc:
        print(f"flucto: error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except (SingularSystemError, IntegrationError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"flucto: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
