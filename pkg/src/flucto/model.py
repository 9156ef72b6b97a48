"""Three-level atom model: parameters, Bloch matrix, steady states, eigenvalues.

The driven ``g <-> e`` transition decays at rate ``gamma``; the excited state
also leaks into the shelving level ``a`` at ``gamma_d``, which returns to the
ground state at ``gamma_a``.  Eliminating the ``a`` population leaves a closed
linear system for the vector ``(sigma_-, sigma_+, sigma_ee, sigma_gg)``::

    d/dt rho = M rho + b

All rates are in units of ``gamma`` (``gamma = 1`` by default) and the laser is
on resonance.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DomainError, ParameterError, SingularSystemError

__all__ = [
    "AtomParams",
    "LiouvillianSystem",
    "SteadyState",
    "EigenSet",
    "COMPONENTS",
    "DEGENERACY_TOL",
    "build_liouvillian",
    "steady_state_exact",
    "steady_state_analytic",
    "eigenvalues",
    "eigenvalues_approx",
    "bright_dark_times",
]

#: Ordering of the atomic vector used everywhere in the package.
COMPONENTS = ("s_minus", "s_plus", "s_ee", "s_gg")

#: |8Y^2 - 1| below this switches the analytic formulas to their delta -> 0 limits.
DEGENERACY_TOL = 1e-8


@dataclass(frozen=True, kw_only=True)
class AtomParams:
    """Physical rates and drive of one system instance.

    Parameters
    ----------
    omega : float
        Rabi frequency of the driving laser.
    gamma_d : float
        Decay rate ``e -> a`` into the shelving level.
    gamma_a : float
        Decay rate ``a -> g`` out of the shelving level.
    gamma : float
        Decay rate of the driven ``e -> g`` transition; sets the unit.
    eta : float
        Combined collection and detection efficiency, ``0 < eta <= 1``.
    e_off : float or None
        Coherent offset amplitude for the in-phase CHD quadrature.  ``None``
        selects the signal-matched offset ``e_off**2 = alpha_ee``.
    """

    omega: float
    gamma_d: float = 0.05
    gamma_a: float = 0.015
    gamma: float = 1.0
    eta: float = 1.0
    e_off: float | None = None

    def __post_init__(self):
        for name in ("omega", "gamma_d", "gamma_a", "gamma", "eta"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
        if self.gamma <= 0:
            raise ParameterError(f"gamma must be > 0, got {self.gamma}")
        if self.gamma_d < 0:
            raise ParameterError(f"gamma_d must be >= 0, got {self.gamma_d}")
        if self.gamma_a < 0:
            raise ParameterError(f"gamma_a must be >= 0, got {self.gamma_a}")
        if self.gamma_d > 0 and self.gamma_a <= 0:
            raise ParameterError("gamma_a must be > 0 when gamma_d > 0 (the shelf needs an exit)")
        if self.omega < 0:
            raise ParameterError(f"omega must be >= 0, got {self.omega}")
        if not 0 < self.eta <= 1:
            raise ParameterError(f"eta must lie in (0, 1], got {self.eta}")
        if self.e_off is not None and not (np.isfinite(self.e_off) and self.e_off >= 0):
            raise ParameterError(f"e_off must be >= 0, got {self.e_off}")

    # derived quantities

    @property
    def gamma_plus(self) -> float:
        return self.gamma + self.gamma_d

    @property
    def gamma_minus(self) -> float:
        return self.gamma - self.gamma_a

    @property
    def q(self) -> float:
        """Shelving ratio ``gamma_d / gamma_a`` (0 for the two-level atom)."""
        if self.gamma_d == 0:
            return 0.0
        return self.gamma_d / self.gamma_a

    @property
    def y(self) -> float:
        """Saturation parameter ``Y = sqrt(2) Omega / gamma_plus``."""
        return np.sqrt(2.0) * self.omega / self.gamma_plus

    @property
    def y2(self) -> float:
        return 2.0 * self.omega**2 / self.gamma_plus**2

    @property
    def denominator(self) -> float:
        """The recurring factor ``1 + Y^2 + (q/2) Y^2``."""
        return 1.0 + self.y2 + 0.5 * self.q * self.y2

    @property
    def delta_squared(self) -> float:
        return (self.gamma_plus / 4.0) ** 2 * (1.0 - 8.0 * self.y2)

    @property
    def delta(self) -> complex:
        """``(gamma_plus/4) sqrt(1 - 8 Y^2)``; purely imaginary above saturation."""
        return complex(self.gamma_plus / 4.0 * np.sqrt(complex(1.0 - 8.0 * self.y2)))

    @property
    def degenerate(self) -> bool:
        """True at the critical drive ``Omega = gamma_plus/4`` where delta vanishes."""
        return abs(8.0 * self.y2 - 1.0) < DEGENERACY_TOL

    @property
    def offset_amplitude(self) -> float:
        if self.e_off is None:
            return float(np.sqrt(steady_state_analytic(self).alpha_ee))
        return self.e_off

    def replace(self, **changes) -> "AtomParams":
        return dataclasses.replace(self, **changes)

    def two_level(self) -> "AtomParams":
        """Same drive with the shelving channel switched off (``q = 0``).

        ``gamma_a`` is kept so that the decoupled shelf mode stays damped and
        every resolvent remains regular at zero frequency.
        """
        return self.replace(gamma_d=0.0)


@dataclass(frozen=True)
class LiouvillianSystem:
    """The coefficient matrix ``m`` and inhomogeneity ``b`` of the Bloch equations."""

    m: np.ndarray
    b: np.ndarray
    params: AtomParams | None = None

    @property
    def conserves_population(self) -> bool:
        """True when ``b = 0``, i.e. ``gamma_a = 0`` and ``ee + gg`` is conserved."""
        return not np.any(self.b)


@dataclass(frozen=True)
class SteadyState:
    alpha_minus: complex
    alpha_plus: complex
    alpha_ee: float
    alpha_gg: float
    alpha_aa: float

    def as_vector(self) -> np.ndarray:
        return np.array([self.alpha_minus, self.alpha_plus, self.alpha_ee, self.alpha_gg], dtype=complex)

    @property
    def coherence_squared(self) -> float:
        """``|alpha_+|^2``."""
        return float(abs(self.alpha_plus) ** 2)

    def quadrature(self, phi: float) -> float:
        """Stationary mean of ``sigma_phi = (sigma_- e^{i phi} + sigma_+ e^{-i phi}) / 2``."""
        value = 0.5 * (self.alpha_minus * np.exp(1j * phi) + self.alpha_plus * np.exp(-1j * phi))
        return float(value.real)


@dataclass(frozen=True)
class EigenSet:
    lambda1: complex
    lambda2: complex
    lambda_plus: complex
    lambda_minus: complex
    source: str

    def as_dict(self) -> dict[str, complex]:
        return {
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "lambda_plus": self.lambda_plus,
            "lambda_minus": self.lambda_minus,
        }

    @property
    def values(self) -> np.ndarray:
        """All four rates sorted by descending real part, then ascending imaginary part."""
        return _sort_eigenvalues(np.array(list(self.as_dict().values()), dtype=complex))


def build_liouvillian(params: AtomParams) -> LiouvillianSystem:
    """Assemble the 4x4 Bloch matrix for the vector ``(sigma_-, sigma_+, sigma_ee, sigma_gg)``."""
    if not isinstance(params, AtomParams):
        raise ParameterError(f"expected AtomParams, got {type(params).__name__}")
    gp = params.gamma_plus
    gm = params.gamma_minus
    h = 0.5j * params.omega
    m = np.array(
        [
            [-gp / 2, 0, h, -h],
            [0, -gp / 2, -h, h],
            [h, -h, -gp, 0],
            [-h, h, gm, -params.gamma_a],
        ],
        dtype=complex,
    )
    b = np.array([0, 0, 0, params.gamma_a], dtype=complex)
    m.flags.writeable = False
    b.flags.writeable = False
    return LiouvillianSystem(m=m, b=b, params=params)


def steady_state_exact(sys: LiouvillianSystem) -> SteadyState:
    """Solve ``m rho + b = 0`` directly.

    When ``b`` vanishes (``gamma_a = 0``) the ``sigma_gg`` row is replaced by the
    normalization ``rho_ee + rho_gg = 1``.
    """
    m = np.array(sys.m, dtype=complex)
    rhs = -np.array(sys.b, dtype=complex)
    if sys.conserves_population:
        m[3] = [0, 0, 1, 1]
        rhs[3] = 1.0
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularSystemError(f"steady-state system is singular (condition number {cond:.3g})")
    rho = np.linalg.solve(m, rhs)
    residual = np.linalg.norm(sys.m @ rho + sys.b)
    if residual > 1e-12 * max(1.0, np.linalg.norm(sys.m)):
        raise SingularSystemError(f"steady-state residual {residual:.3g} too large (condition number {cond:.3g})")
    ee = float(rho[2].real)
    gg = float(rho[3].real)
    return SteadyState(
        alpha_minus=complex(rho[0]),
        alpha_plus=complex(rho[1]),
        alpha_ee=ee,
        alpha_gg=gg,
        alpha_aa=1.0 - ee - gg,
    )


def steady_state_analytic(params: AtomParams) -> SteadyState:
    """Closed-form stationary moments; exact on resonance."""
    y, y2, d, q = params.y, params.y2, params.denominator, params.q
    a_minus = -1j * (y / np.sqrt(2.0)) / d
    ee = 0.5 * y2 / d
    return SteadyState(
        alpha_minus=complex(a_minus),
        alpha_plus=complex(np.conj(a_minus)),
        alpha_ee=ee,
        alpha_gg=(1.0 + 0.5 * y2) / d,
        alpha_aa=q * ee,
    )


def _sort_eigenvalues(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    # round away eigensolver noise so conjugate pairs order deterministically
    order = np.lexsort((np.round(values.imag, 12), -np.round(values.real, 12)))
    return values[order]


def eigenvalues_approx(params: AtomParams) -> EigenSet:
    """Analytic decay rates valid for ``gamma >> gamma_d, gamma_a``.

    The shelving rate uses ``gamma**2`` (not ``gamma_plus**2``) in its
    denominator, exactly matching the bright/dark period formula.
    """
    gp = params.gamma_plus
    w2 = params.omega**2
    lam2 = -params.gamma_a * (1.0 + params.q * w2 / (2.0 * w2 + params.gamma**2))
    delta = 0.0 if params.degenerate else params.delta
    return EigenSet(
        lambda1=complex(-gp / 2),
        lambda2=complex(lam2),
        lambda_plus=complex(-0.75 * gp + delta),
        lambda_minus=complex(-0.75 * gp - delta),
        source="approximate",
    )


def eigenvalues(sys: LiouvillianSystem) -> EigenSet:
    """Exact eigenvalues of ``m``, labelled by nearest match to the analytic set.

    Labels are assigned by a minimum-total-distance matching in the complex
    plane.  Without attached parameters the labels follow the sort order.
    """
    values = np.linalg.eigvals(np.asarray(sys.m))
    if not np.all(np.isfinite(values)):
        raise SingularSystemError("eigensolver returned non-finite values")
    values = _sort_eigenvalues(values)
    names = ("lambda1", "lambda2", "lambda_plus", "lambda_minus")
    if sys.params is None:
        labelled = dict(zip(("lambda2", "lambda1", "lambda_plus", "lambda_minus"), values))
    else:
        approx = eigenvalues_approx(sys.params).as_dict()
        cost = np.abs(values[:, None] - np.array([approx[n] for n in names])[None, :])
        rows, cols = linear_sum_assignment(cost)
        labelled = {names[c]: values[r] for r, c in zip(rows, cols)}
    return EigenSet(source="exact", **{k: complex(v) for k, v in labelled.items()})


def bright_dark_times(params: AtomParams) -> tuple[float, float, float]:
    """Mean bright and dark period lengths and the sharp-peak width.

    Returns
    -------
    t_bright, t_dark, gamma_ep : float
        ``gamma_ep = 1/t_bright + 1/t_dark`` equals minus the analytic shelving
        eigenvalue.
    """
    if params.gamma_d == 0:
        raise DomainError("bright periods are infinite without shelving (gamma_d = 0)")
    if params.omega == 0:
        raise DomainError("bright periods are infinite without drive (omega = 0)")
    w2 = params.omega**2
    t_bright = (2.0 * w2 + params.gamma**2) / (params.gamma_d * w2)
    t_dark = 1.0 / params.gamma_a
    return t_bright, t_dark, 1.0 / t_bright + 1.0 / t_dark
