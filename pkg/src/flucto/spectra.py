"""Power spectrum, spectra of squeezing and quadrature variances.

Exact spectra come from the resolvent ``(i w - M)^-1 g(0)`` applied to the
stationary fluctuation vector, which is the one-sided Fourier transform of
the regressed correlator.  Approximate spectra are Lorentzian sums built from
the analytic correlators; each carries its own component list.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import curve_fit

from . import normalization
from .dynamics import resolve_source, second_order_expsum, second_order_initial
from .errors import DomainError, IntegrationError, ParameterError, SingularSystemError
from .expsum import ExpSum, Term
from .model import AtomParams, LiouvillianSystem, eigenvalues_approx, steady_state_analytic, steady_state_exact

__all__ = [
    "SpectrumSeries",
    "SPECTRUM_KINDS",
    "PHI_VALUES",
    "check_phi",
    "composite_omega_grid",
    "resolvent",
    "cosine_transform",
    "real_part",
    "power_spectrum",
    "squeezing_spectrum",
    "noise_correlator_spectra",
    "variance",
    "integrate_spectrum",
    "integrated_squeezing_spectrum",
    "sharp_peak_halfwidth",
]

SPECTRUM_KINDS = (
    "incoherent_power",
    "squeezing_phi0",
    "squeezing_phi90",
    "noise_s1",
    "noise_s2",
    "chd_phi0",
    "chd_phi90",
    "chd_order2",
    "chd_order3",
)
PHI_VALUES = (0.0, np.pi / 2)
IMAG_TOL = 1e-10


@dataclass(frozen=True)
class SpectrumSeries:
    """Real spectrum sampled on a frequency grid (frequencies relative to the laser).

    ``coherent_weight`` is the area of the elastic delta line at ``w = 0``; it
    is never added to ``values``.  For approximate spectra ``components`` is the
    exponential sum whose cosine transform reproduces ``values``.
    """

    omega: np.ndarray
    values: np.ndarray
    kind: str
    engine: str
    coherent_weight: float | None = None
    components: ExpSum | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in SPECTRUM_KINDS:
            raise ValueError(f"unknown spectrum kind {self.kind!r}")
        if self.values.shape != self.omega.shape:
            raise ValueError("values and omega grid differ in shape")

    def component_sum(self, omega=None) -> np.ndarray:
        if self.components is None:
            raise ValueError("this spectrum carries no component breakdown")
        omega = self.omega if omega is None else omega
        return real_part(self.components.cosine_transform(omega), "component sum")


def check_phi(phi: float) -> float:
    for allowed in PHI_VALUES:
        if abs(phi - allowed) < 1e-12:
            return allowed
    raise ParameterError(f"phi must be 0 or pi/2, got {phi!r}")


def _phi_tag(phi: float) -> str:
    return "phi0" if phi == 0.0 else "phi90"


def real_part(values: np.ndarray, what: str = "spectrum") -> np.ndarray:
    """Drop the imaginary part after checking it is numerical residue only."""
    values = np.asarray(values)
    if np.iscomplexobj(values) and values.size:
        scale = max(1.0, float(np.max(np.abs(values.real))))
        residue = float(np.max(np.abs(values.imag)))
        if residue > IMAG_TOL * scale:
            raise SingularSystemError(f"{what} has imaginary residue {residue:.3g}")
    return np.ascontiguousarray(np.real(values), dtype=float)


def composite_omega_grid(params: AtomParams, inner: int = 401, outer: int = 600) -> np.ndarray:
    """Symmetric grid: dense panel ``|w| <= 10|lambda_2|`` plus a panel out to ``3(Omega + gamma_plus)``."""
    lam2 = abs(eigenvalues_approx(params).lambda2)
    edge = 3.0 * (params.omega + params.gamma_plus)
    core_edge = min(10.0 * lam2, edge / 2) if lam2 > 0 else edge / 20
    core = np.linspace(-core_edge, core_edge, inner)
    wing = np.linspace(core_edge, edge, outer // 2 + 1)[1:]
    return np.concatenate((-wing[::-1], core, wing))


def _check_omega(omega) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    if omega.ndim != 1 or omega.size < 1 or not np.all(np.isfinite(omega)):
        raise ParameterError("omega grid must be a finite, non-empty 1-D array")
    return omega


def resolvent(sys: LiouvillianSystem, g0, omega) -> np.ndarray:
    """``(i w - M)^-1 g0`` for every ``w``; equals ``int_0^inf e^{-i w t} e^{M t} g0 dt``.

    Returns
    -------
    ndarray, shape (len(omega), 4)
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    m = np.asarray(sys.m, dtype=complex)
    g0 = np.asarray(g0, dtype=complex).reshape(4)
    eye = np.eye(4)
    mats = 1j * omega[:, None, None] * eye[None] - m[None]
    if sys.conserves_population:
        # ee + gg is conserved, so c^T (i w - M) = i w c^T with c = (0, 0, 1, 1).
        # For c^T g0 = 0 the solution has c^T x = 0, and adding c c^T leaves it
        # unchanged while keeping the matrix regular at and near w = 0.
        conserved = np.array([0, 0, 1, 1], dtype=complex)
        if abs(conserved @ g0) <= 1e-12 * max(1.0, np.linalg.norm(g0)):
            mats = mats + np.outer(conserved, conserved)[None]
        elif np.any(omega == 0.0):
            raise DomainError("resolvent diverges at w = 0: initial vector has a conserved component")
    out = np.linalg.solve(mats, g0[None, :, None])[..., 0]
    if not np.all(np.isfinite(out)):
        raise SingularSystemError("resolvent produced non-finite values")
    return out


def cosine_transform(sys: LiouvillianSystem, g0, omega) -> np.ndarray:
    """``int_0^inf cos(w t) e^{M t} g0 dt`` via the resolvent at ``+w`` and ``-w``."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    return 0.5 * (resolvent(sys, g0, omega) + resolvent(sys, g0, -omega))


# spectra


def power_spectrum(engine: str, source, omega=None, *, sys: LiouvillianSystem | None = None) -> SpectrumSeries:
    """Incoherent power spectrum plus the weight of the coherent line.

    Examples
    --------
    >>> p = AtomParams(omega=0.2625)
    >>> s = power_spectrum("exact", p, [0.0, 0.5])
    >>> bool(s.values[0] > s.values[1] > 0)
    True
    """
    params, sys = resolve_source(source, engine, sys)
    if omega is None:
        omega = composite_omega_grid(params)
    omega = _check_omega(omega)
    if engine == "exact":
        ss = steady_state_exact(sys)
        _require_drive(ss)
        raw = resolvent(sys, second_order_initial(ss), omega)[:, 0]
        values = normalization.incoherent(ss.alpha_ee) * raw.real
        return SpectrumSeries(omega, values, "incoherent_power", engine, ss.coherence_squared / (np.pi * ss.alpha_ee))
    _require_drive(steady_state_analytic(params))
    comps = second_order_expsum(params, "minus").scaled(normalization.incoherent(steady_state_analytic(params).alpha_ee))
    values = real_part(comps.cosine_transform(omega), "incoherent spectrum")
    weight = 1.0 / (np.pi * params.denominator)
    return SpectrumSeries(omega, values, "incoherent_power", engine, weight, comps)


def _require_drive(ss) -> None:
    if ss.alpha_ee <= 0:
        raise DomainError("spectra need a driven atom (omega > 0)")


def _quadrature_expsum(params: AtomParams, phi: float) -> ExpSum:
    """``Re[e^{-i phi} <Dsig+(0) Dsig_phi(t)>]`` for phi in {0, pi/2} as an exponential sum."""
    minus = second_order_expsum(params, "minus")
    plus = second_order_expsum(params, "plus")
    if phi == 0.0:
        return (minus + plus).scaled(0.5)
    return (minus - plus).scaled(0.5)


def _merge(terms: ExpSum) -> ExpSum:
    """Combine terms sharing a rate and power; drops exact cancellations."""
    merged: dict[tuple[complex, int], complex] = {}
    for t in terms.terms:
        key = (complex(t.rate), t.power)
        merged[key] = merged.get(key, 0.0) + t.coefficient
    return ExpSum(tuple(Term(c, r, p) for (r, p), c in merged.items() if c != 0))


def squeezing_spectrum(engine: str, source, phi: float, omega=None, *, sys: LiouvillianSystem | None = None):
    """Spectrum of squeezing of the ``phi`` quadrature (balanced homodyne detection)."""
    phi = check_phi(phi)
    params, sys = resolve_source(source, engine, sys)
    if omega is None:
        omega = composite_omega_grid(params)
    omega = _check_omega(omega)
    kind = f"squeezing_{_phi_tag(phi)}"
    if engine == "exact":
        ss = steady_state_exact(sys)
        _require_drive(ss)
        ct = cosine_transform(sys, second_order_initial(ss), omega)
        ct_minus = real_part(ct[:, 0], "cosine transform")
        ct_plus = real_part(ct[:, 1], "cosine transform")
        quad_ct = 0.5 * (ct_minus + np.cos(2 * phi) * ct_plus)
        return SpectrumSeries(omega, normalization.squeezing(params) * quad_ct, kind, engine)
    _require_drive(steady_state_analytic(params))
    comps = _merge(_quadrature_expsum(params, phi).scaled(normalization.squeezing(params)))
    return SpectrumSeries(omega, real_part(comps.cosine_transform(omega)), kind, engine, None, comps)


def noise_correlator_spectra(params: AtomParams, omega=None, engine: str = "exact"):
    """Spectra ``S1`` of ``<Dsig+(0) Dsig+(t)>`` and ``S2`` of ``<Dsig+(0) Dsig-(t)>``.

    ``S2 + S1`` is the in-phase spectrum of squeezing and ``S2 - S1`` the
    out-of-phase one.
    """
    params, sys = resolve_source(params, engine)
    if omega is None:
        omega = composite_omega_grid(params)
    omega = _check_omega(omega)
    scale = normalization.noise_correlator(params)
    if engine == "exact":
        ss = steady_state_exact(sys)
        _require_drive(ss)
        ct = cosine_transform(sys, second_order_initial(ss), omega)
        s1 = SpectrumSeries(omega, scale * real_part(ct[:, 1]), "noise_s1", engine)
        s2 = SpectrumSeries(omega, scale * real_part(ct[:, 0]), "noise_s2", engine)
        return s1, s2
    _require_drive(steady_state_analytic(params))
    out = []
    for sign, kind in (("plus", "noise_s1"), ("minus", "noise_s2")):
        comps = second_order_expsum(params, sign).scaled(scale)
        out.append(SpectrumSeries(omega, real_part(comps.cosine_transform(omega)), kind, engine, None, comps))
    return tuple(out)


def variance(params: AtomParams, phi: float, engine: str = "approximate") -> float:
    """Normally ordered quadrature variance; negative values certify squeezing.

    The approximate engine evaluates the closed forms (which are exact on
    resonance); the exact engine reads the stationary fluctuation vector.
    """
    phi = check_phi(phi)
    if engine == "exact":
        _, sys = resolve_source(params, engine)
        g0 = second_order_initial(steady_state_exact(sys))
        # 2 Re[e^{-i phi} <Dsig+ Dsig_phi>]
        return float((g0[0] + np.exp(-2j * phi) * g0[1]).real)
    if engine != "approximate":
        raise ParameterError(f"unknown engine {engine!r}")
    y2, d, q = params.y2, params.denominator, params.q
    if phi == 0.0:
        return 0.5 * y2 / d
    return 0.5 * y2 / ((1.0 + y2) * d**2) * (y2**2 * (1.0 + 0.5 * q) + 0.5 * q * y2 - 1.0)


# integration


def integrate_spectrum(func, params: AtomParams, tol: float = 1e-10) -> float:
    """Integrate an even spectrum over the real line.

    The half-line is split at the sharp-peak shoulder ``10|lambda_2|``, the
    sideband region ``3(Omega + gamma_plus)``, and infinity.
    """
    lam2 = abs(eigenvalues_approx(params).lambda2)
    edge = 3.0 * (params.omega + params.gamma_plus)
    breaks = [0.0]
    if lam2 > 0:
        breaks += [lam2, 10.0 * lam2]
    breaks += [max(params.omega - params.gamma_plus, 0.0), params.omega + params.gamma_plus, edge]
    breaks = sorted(set(b for b in breaks))
    total = 0.0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi <= lo:
            continue
        value, err, *rest = quad(lambda w: float(func(np.array([w]))[0]), lo, hi, epsabs=tol, epsrel=tol, limit=400, full_output=1)
        if len(rest) > 1 and rest[0]["last"] >= 400:
            raise IntegrationError(f"quadrature on [{lo}, {hi}] did not converge (error {err:.3g})")
        total += value
    tail, err = quad(lambda w: float(func(np.array([w]))[0]), breaks[-1], np.inf, epsabs=tol, epsrel=tol, limit=400)
    if not np.isfinite(tail):
        raise IntegrationError("quadrature of the spectral tail diverged")
    return 2.0 * (total + tail)


def integrated_squeezing_spectrum(params: AtomParams, phi: float, method: str = "quadrature") -> float:
    """Area under the spectrum of squeezing.

    ``method='closed'`` returns ``4 pi gamma_plus eta V_phi``; ``'quadrature'``
    integrates the exact spectrum numerically; ``'lorentzian'`` sums the areas
    of the analytic components.
    """
    phi = check_phi(phi)
    if method == "closed":
        return normalization.squeezing_area(params) * variance(params, phi)
    if method == "lorentzian":
        comps = squeezing_spectrum("approximate", params, phi, [0.0]).components
        # each simple term c e^{lam t} integrates to pi c over the real w axis
        return float((np.pi * comps.at_zero()).real)
    if method != "quadrature":
        raise ParameterError(f"unknown method {method!r}")
    _, sys = resolve_source(params, "exact")
    return integrate_spectrum(lambda w: squeezing_spectrum("exact", params, phi, w, sys=sys).values, params)


def sharp_peak_halfwidth(params: AtomParams, engine: str = "exact", points: int = 801) -> float:
    """Fit the central narrow feature of the incoherent spectrum.

    Model: Lorentzian of half-width ``G`` on a quartic background, fitted over
    ``|w| <= 10 |lambda_2|``.
    """
    lam2 = abs(eigenvalues_approx(params).lambda2)
    if lam2 == 0 or params.q == 0:
        raise DomainError("no sharp peak without shelving")
    omega = np.linspace(-10 * lam2, 10 * lam2, points)
    values = power_spectrum(engine, params, omega).values

    def model(w, amp, width, c0, c2, c4):
        return amp * width / (w**2 + width**2) + c0 + c2 * w**2 + c4 * w**4

    peak = values[points // 2] - values[0]
    guess = (peak * lam2, lam2, values[0], 0.0, 0.0)
    popt, _ = curve_fit(model, omega, values, p0=guess, maxfev=20000)
    return float(abs(popt[1]))
