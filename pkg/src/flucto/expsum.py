"""Sums of damped exponentials ``sum_k c_k tau^p_k exp(lambda_k tau)``.

Every analytic correlator in the package is such a sum, and its cosine
transform is a sum of (generalized) Lorentzians.  Terms with ``power = 1``
appear only at the critical drive where two decay rates coalesce.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

__all__ = ["Term", "ExpSum", "hyperbolic_pair"]


@dataclass(frozen=True)
class Term:
    coefficient: complex
    rate: complex
    power: int = 0

    def scaled(self, factor: complex) -> "Term":
        return Term(self.coefficient * factor, self.rate, self.power)


@dataclass(frozen=True)
class ExpSum:
    terms: tuple[Term, ...] = ()

    def __add__(self, other: "ExpSum") -> "ExpSum":
        return ExpSum(self.terms + other.terms)

    def __sub__(self, other: "ExpSum") -> "ExpSum":
        return self + other.scaled(-1.0)

    def scaled(self, factor: complex) -> "ExpSum":
        return ExpSum(tuple(t.scaled(factor) for t in self.terms))

    def conjugate(self) -> "ExpSum":
        return ExpSum(tuple(Term(np.conj(t.coefficient), np.conj(t.rate), t.power) for t in self.terms))

    def _live(self) -> tuple[Term, ...]:
        # zero-weight terms may sit on a zero rate (two-level limit)
        return tuple(t for t in self.terms if t.coefficient != 0)

    def __call__(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        out = np.zeros(tau.shape, dtype=complex)
        for t in self._live():
            out += t.coefficient * tau**t.power * np.exp(t.rate * tau)
        return out

    def at_zero(self) -> complex:
        return complex(sum(t.coefficient for t in self.terms if t.power == 0))

    def cosine_transform(self, omega) -> np.ndarray:
        """``int_0^inf cos(omega tau) f(tau) dtau`` in closed form.

        Uses ``(1/2) p! [(i omega - lam)^-(p+1) + (-i omega - lam)^-(p+1)]``,
        which reduces to ``-lam / (omega^2 + lam^2)`` for simple terms.
        """
        omega = np.asarray(omega, dtype=float)
        out = np.zeros(omega.shape, dtype=complex)
        for t in self._live():
            n = t.power + 1
            kernel = 0.5 * factorial(t.power) * ((1j * omega - t.rate) ** -n + (-1j * omega - t.rate) ** -n)
            out += t.coefficient * kernel
        return out

    def fourier_half(self, omega) -> np.ndarray:
        """``int_0^inf exp(-i omega tau) f(tau) dtau``."""
        omega = np.asarray(omega, dtype=float)
        out = np.zeros(omega.shape, dtype=complex)
        for t in self._live():
            out += t.coefficient * factorial(t.power) * (1j * omega - t.rate) ** -(t.power + 1)
        return out

    def integral(self) -> complex:
        """``int_0^inf f(tau) dtau``; all rates must have negative real part."""
        return complex(sum(t.coefficient * factorial(t.power) * (-t.rate) ** -(t.power + 1) for t in self._live()))


def hyperbolic_pair(c_cosh: complex, c_sinhc: complex, mu: float, delta: complex, degenerate: bool) -> ExpSum:
    """Expand ``exp(mu tau) [c_cosh cosh(delta tau) + c_sinhc sinh(delta tau)/delta]``.

    Away from degeneracy this is two simple exponentials at ``mu +/- delta``.
    At ``delta = 0`` it is ``exp(mu tau) (c_cosh + c_sinhc tau)``.
    """
    if degenerate:
        return ExpSum((Term(c_cosh, mu, 0), Term(c_sinhc, mu, 1)))
    return ExpSum(
        (
            Term(0.5 * c_cosh + 0.5 * c_sinhc / delta, mu + delta),
            Term(0.5 * c_cosh - 0.5 * c_sinhc / delta, mu - delta),
        )
    )
