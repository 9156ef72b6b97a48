"""One-time expectations and two-time correlations of the atomic operators.

Two engines are provided.  The *exact* engine propagates the Bloch matrix
(eigendecomposition, or an adaptive ODE when the matrix is defective) and
uses the quantum regression theorem.  The *approximate* engine evaluates the
closed-form transients valid for ``gamma >> gamma_d, gamma_a``.

Regression bookkeeping: a correlator ``<A(0) s(tau) B(0)>`` obeys the same
equations as ``<s(t)>`` but the inhomogeneous term is weighted by
``<B A>_st`` (the trace of ``B rho_st A``).  Correlators of fluctuation
operators carry zero weight, so they evolve homogeneously.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import EngineMismatchError, IntegrationError, ParameterError
from .expsum import ExpSum, Term, hyperbolic_pair
from .model import (
    COMPONENTS,
    AtomParams,
    LiouvillianSystem,
    SteadyState,
    build_liouvillian,
    eigenvalues_approx,
    steady_state_analytic,
    steady_state_exact,
)

__all__ = [
    "BlochVector",
    "CorrelationSeries",
    "ENGINES",
    "default_tau_grid",
    "propagate",
    "evolve_exact",
    "evolve_approx",
    "second_order_initial",
    "third_order_initial",
    "second_order_expsum",
    "corr_second_order",
    "corr_third_order_sandwich",
    "corr_third_order_fluct",
    "quadrature",
    "resolve_source",
]

LOGGER = logging.getLogger(__name__)

ENGINES = ("exact", "approximate")
CORRELATION_KINDS = (
    "expectation",
    "second_order_fluct_minus",
    "second_order_fluct_plus",
    "third_order_sandwich",
    "third_order_fluct",
)

#: eigenvector condition number above which the matrix is treated as defective
DEFECTIVE_COND = 1e6


@dataclass(frozen=True)
class BlochVector:
    s_minus: complex
    s_plus: complex
    s_ee: complex
    s_gg: complex

    @classmethod
    def ground(cls) -> "BlochVector":
        return cls(0.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, values) -> "BlochVector":
        return cls(*(complex(v) for v in np.asarray(values).ravel()))

    def as_array(self) -> np.ndarray:
        return np.array([self.s_minus, self.s_plus, self.s_ee, self.s_gg], dtype=complex)

    def is_physical(self, atol: float = 1e-12) -> bool:
        ee, gg = self.s_ee, self.s_gg
        return (
            abs(self.s_plus - np.conj(self.s_minus)) < atol
            and abs(ee.imag) < atol
            and abs(gg.imag) < atol
            and -atol <= ee.real <= 1 + atol
            and -atol <= gg.real <= 1 + atol
            and ee.real + gg.real <= 1 + atol
        )


@dataclass(frozen=True)
class CorrelationSeries:
    """Values of a correlator on a tau grid.

    ``values`` has shape ``(n,)`` for a single correlator or ``(n, 4)`` when
    all four components of the atomic vector are carried.
    """

    tau: np.ndarray
    values: np.ndarray
    kind: str
    engine: str

    def __post_init__(self):
        if self.kind not in CORRELATION_KINDS:
            raise ValueError(f"unknown correlation kind {self.kind!r}")
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.values.shape[0] != self.tau.shape[0]:
            raise ValueError("values and tau grid differ in length")

    def component(self, name: str) -> np.ndarray:
        if self.values.ndim == 1:
            raise ValueError("scalar series has no components")
        return self.values[:, COMPONENTS.index(name)]

    def quadrature(self, phi: float) -> np.ndarray:
        return quadrature(self.values, phi)


def quadrature(values: np.ndarray, phi: float) -> np.ndarray:
    """Combine ``sigma_-`` and ``sigma_+`` components into ``sigma_phi``."""
    values = np.asarray(values)
    return 0.5 * (np.exp(1j * phi) * values[..., 0] + np.exp(-1j * phi) * values[..., 1])


def check_tau_grid(tau) -> np.ndarray:
    tau = np.asarray(tau, dtype=float)
    if tau.ndim != 1 or tau.size < 1:
        raise ParameterError("tau grid must be a non-empty 1-D array")
    if np.any(tau < 0) or not np.all(np.isfinite(tau)):
        raise ParameterError("tau grid must be finite and non-negative")
    if np.any(np.diff(tau) <= 0):
        raise ParameterError("tau grid must be strictly increasing")
    return tau


def default_tau_grid(params: AtomParams, count: int = 400) -> np.ndarray:
    """Zero followed by geometric spacing from ``1e-3/gamma`` to ``10/|lambda_2|``."""
    lam2 = abs(eigenvalues_approx(params).lambda2)
    upper = 10.0 / lam2 if lam2 > 0 else 100.0 / params.gamma_plus
    return np.concatenate(([0.0], np.geomspace(1e-3 / params.gamma, upper, count - 1)))


def resolve_source(source, engine: str, sys: LiouvillianSystem | None = None):
    """Return ``(params, sys)`` from an ``AtomParams`` or ``LiouvillianSystem``.

    ``sys`` may be supplied alongside ``params``; the two must then agree.
    """
    if engine not in ENGINES:
        raise ParameterError(f"engine must be one of {ENGINES}, got {engine!r}")
    if isinstance(source, LiouvillianSystem):
        if sys is not None and sys is not source:
            raise EngineMismatchError("two different systems supplied")
        sys = source
        params = source.params
    elif isinstance(source, AtomParams):
        params = source
        if sys is not None and not np.allclose(sys.m, build_liouvillian(params).m, rtol=0, atol=1e-14):
            raise EngineMismatchError("system matrix does not match the supplied parameters")
    else:
        raise ParameterError(f"expected AtomParams or LiouvillianSystem, got {type(source).__name__}")
    if engine == "exact" and sys is None:
        sys = build_liouvillian(params)
    if engine == "approximate" and params is None:
        raise EngineMismatchError("approximate engine needs AtomParams; the system carries none")
    return params, sys


# exact engine


def _particular(sys: LiouvillianSystem, weight: complex) -> np.ndarray:
    forcing = weight * np.asarray(sys.b)
    if not np.any(forcing):
        return np.zeros(4, dtype=complex)
    return -np.linalg.solve(np.asarray(sys.m), forcing)


def _propagate_ode(sys: LiouvillianSystem, weight: complex, g0: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """Implicit (Radau) integration of the deviation from the particular solution."""
    m = np.asarray(sys.m, dtype=complex)
    gp = _particular(sys, weight)
    mr = np.block([[m.real, -m.imag], [m.imag, m.real]])
    d0 = g0 - gp
    if tau[-1] == 0:
        return np.tile(g0, (tau.size, 1))
    sol = solve_ivp(
        lambda _t, y: mr @ y,
        (0.0, tau[-1]),
        np.concatenate((d0.real, d0.imag)),
        method="Radau",
        jac=mr,
        t_eval=tau,
        rtol=1e-10,
        atol=1e-13,
    )
    if not sol.success:
        raise IntegrationError(f"ODE integration failed: {sol.message}")
    y = sol.y.T
    return gp[None, :] + y[:, :4] + 1j * y[:, 4:]


def propagate(sys: LiouvillianSystem, g0, tau, weight: complex = 0.0, backend: str = "auto") -> np.ndarray:
    """Solve ``dg/dtau = m g + weight * b`` from ``g(0) = g0``.

    Parameters
    ----------
    sys : LiouvillianSystem
    g0 : array_like, shape (4,)
        Initial vector; need not be physical.
    tau : array_like
        Non-negative, strictly increasing times.
    weight : complex
        Multiplier of the inhomogeneous term.  ``1`` for expectation values,
        ``0`` for fluctuation correlators.
    backend : {'auto', 'eig', 'ode'}
        ``auto`` diagonalizes unless the eigenvector matrix is ill-conditioned.

    Returns
    -------
    ndarray, shape (len(tau), 4)
    """
    tau = check_tau_grid(tau)
    m = np.asarray(sys.m, dtype=complex)
    g0 = np.asarray(g0, dtype=complex).reshape(4)
    if backend not in ("auto", "eig", "ode"):
        raise ParameterError(f"unknown backend {backend!r}")
    if backend != "ode":
        lam, vecs = np.linalg.eig(m)
        cond = np.linalg.cond(vecs)
        if backend == "eig" or cond <= DEFECTIVE_COND:
            gp = _particular(sys, weight)
            coeff = np.linalg.solve(vecs, g0 - gp)
            return gp[None, :] + (np.exp(np.outer(tau, lam)) * coeff[None, :]) @ vecs.T
        LOGGER.info("Bloch matrix is nearly defective (eigenvector cond %.3g); using ODE backend", cond)
    return _propagate_ode(sys, weight, g0, tau)


def evolve_exact(sys: LiouvillianSystem, s0=None, tau=None, weight: complex = 1.0) -> CorrelationSeries:
    """Exact ``<s(t)>`` from ``s0`` (default: ground state)."""
    if s0 is None:
        s0 = BlochVector.ground()
    g0 = s0.as_array() if isinstance(s0, BlochVector) else np.asarray(s0, dtype=complex)
    if tau is None:
        tau = default_tau_grid(_need_params(sys))
    tau = check_tau_grid(tau)
    return CorrelationSeries(tau, propagate(sys, g0, tau, weight=weight), "expectation", "exact")


def _need_params(sys: LiouvillianSystem) -> AtomParams:
    if sys.params is None:
        raise ParameterError("a tau grid is required when the system carries no parameters")
    return sys.params


# approximate engine


def _damped_hyperbolics(params: AtomParams, tau: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``exp(mu t) cosh(delta t)`` and ``exp(mu t) sinh(delta t)/delta`` with ``mu = -3 gamma_plus/4``."""
    mu = -0.75 * params.gamma_plus
    if params.degenerate:
        decay = np.exp(mu * tau)
        return decay.astype(complex), (tau * decay).astype(complex)
    delta = params.delta
    ep = np.exp((mu + delta) * tau)
    em = np.exp((mu - delta) * tau)
    return 0.5 * (ep + em), 0.5 * (ep - em) / delta


def evolve_approx(params: AtomParams, tau=None) -> CorrelationSeries:
    """Closed-form transient from the ground state, written with hyperbolic functions."""
    if tau is None:
        tau = default_tau_grid(params)
    tau = check_tau_grid(tau)
    y, y2, gp = params.y, params.y2, params.gamma_plus
    ss = steady_state_analytic(params)
    lam2 = eigenvalues_approx(params).lambda2.real
    e2 = np.exp(lam2 * tau)
    ch, shc = _damped_hyperbolics(params, tau)
    bracket = e2 - (ch + 0.75 * gp * shc)
    dipole = (y / np.sqrt(2.0)) / (1.0 + y2) * bracket + np.sqrt(2.0) * y * (gp / 4.0) * shc
    pop = (0.5 * y2) / (1.0 + y2) * bracket
    out = np.empty((tau.size, 4), dtype=complex)
    out[:, 0] = -1j * dipole + ss.alpha_minus * (1.0 - e2)
    out[:, 1] = 1j * dipole + ss.alpha_plus * (1.0 - e2)
    out[:, 2] = pop + ss.alpha_ee * (1.0 - e2)
    out[:, 3] = e2 - pop + ss.alpha_gg * (1.0 - e2)
    return CorrelationSeries(tau, out, "expectation", "approximate")


# regression initial vectors


def second_order_initial(ss: SteadyState) -> np.ndarray:
    """``<Delta sigma_+ Delta s>_st`` for the vector ``s``."""
    am, ap, ee, gg = ss.alpha_minus, ss.alpha_plus, ss.alpha_ee, ss.alpha_gg
    return np.array([ee - ap * am, -ap**2, -ap * ee, ap * (1.0 - gg)], dtype=complex)


def third_order_initial(ss: SteadyState) -> np.ndarray:
    """``<Delta sigma_+ Delta s Delta sigma_->_st`` for the vector ``s``."""
    am, ap, ee, gg = ss.alpha_minus, ss.alpha_plus, ss.alpha_ee, ss.alpha_gg
    pp = ap * am
    return np.array(
        [2 * am * (pp - ee), 2 * ap * (pp - ee), ee * (2 * pp - ee), (gg - 1.0) * (2 * pp - ee)],
        dtype=complex,
    )


def second_order_expsum(params: AtomParams, sign: str) -> ExpSum:
    """Analytic ``<Delta sigma_+(0) Delta sigma_-/+(tau)>`` as a sum of exponentials.

    ``sign='minus'`` gives ``C1 e1 - C+ e+ - C- e- + C2 e2`` and ``sign='plus'``
    flips the signs of every term except the first.
    """
    if sign not in ("minus", "plus"):
        raise ParameterError(f"sign must be 'minus' or 'plus', got {sign!r}")
    y2, d, q, gp = params.y2, params.denominator, params.q, params.gamma_plus
    eig = eigenvalues_approx(params)
    c1 = 0.25 * y2 / d
    c2 = 0.25 * q * y2**2 / ((1.0 + y2) * d**2)
    k = y2 / ((1.0 + y2) * d)
    # C+ e^{lam+ tau} + C- e^{lam- tau}, kept regular at delta = 0;
    # C+ (slow pole at weak drive) carries the "+(1 - 5Y^2) gamma_plus/(4 delta)" branch
    pair = hyperbolic_pair(
        0.25 * k * (1.0 - y2),
        0.25 * k * (1.0 - 5.0 * y2) * gp / 4.0,
        -0.75 * gp,
        params.delta,
        params.degenerate,
    )
    s = 1.0 if sign == "plus" else -1.0
    return ExpSum((Term(c1, eig.lambda1),)) + pair.scaled(s) + ExpSum((Term(-s * c2, eig.lambda2),))


# correlators


def _fluct_kind(sign: str) -> str:
    return f"second_order_fluct_{sign}"


def corr_second_order(engine: str, source, sign: str, tau=None, *, sys: LiouvillianSystem | None = None):
    """``<Delta sigma_+(0) Delta sigma_-/+(tau)>_st``.

    The exact engine evolves the stationary fluctuation vector homogeneously and
    reads off the ``sigma_-`` (``sign='minus'``) or ``sigma_+`` component.
    """
    if sign not in ("minus", "plus"):
        raise ParameterError(f"sign must be 'minus' or 'plus', got {sign!r}")
    params, sys = resolve_source(source, engine, sys)
    if tau is None:
        tau = default_tau_grid(params)
    tau = check_tau_grid(tau)
    if engine == "exact":
        g0 = second_order_initial(steady_state_exact(sys))
        values = propagate(sys, g0, tau)[:, 0 if sign == "minus" else 1]
    else:
        values = second_order_expsum(params, sign)(tau)
    return CorrelationSeries(tau, values, _fluct_kind(sign), engine)


def corr_third_order_sandwich(engine: str, source, tau=None, *, sys: LiouvillianSystem | None = None):
    """``<sigma_+(0) s(tau) sigma_-(0)>_st = alpha_ee <s(tau)>`` from the ground state."""
    params, sys = resolve_source(source, engine, sys)
    if tau is None:
        tau = default_tau_grid(params)
    tau = check_tau_grid(tau)
    if engine == "exact":
        ee = steady_state_exact(sys).alpha_ee
        values = ee * propagate(sys, BlochVector.ground().as_array(), tau, weight=1.0)
    else:
        values = steady_state_analytic(params).alpha_ee * evolve_approx(params, tau).values
    return CorrelationSeries(tau, values, "third_order_sandwich", engine)


def corr_third_order_fluct(sys, tau=None) -> CorrelationSeries:
    """``<Delta sigma_+(0) Delta s(tau) Delta sigma_-(0)>_st`` (exact engine only)."""
    _, sys = resolve_source(sys, "exact")
    if tau is None:
        tau = default_tau_grid(_need_params(sys))
    tau = check_tau_grid(tau)
    g0 = third_order_initial(steady_state_exact(sys))
    return CorrelationSeries(tau, propagate(sys, g0, tau), "third_order_fluct", "exact")
