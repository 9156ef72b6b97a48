"""Prefactors that turn correlator transforms into measured spectra.

Kept in one place so the spectra and CHD modules cannot drift apart.
``alpha_ee`` is always the exact stationary excited population.
"""

from __future__ import annotations

import numpy as np

from .model import AtomParams

__all__ = [
    "incoherent",
    "squeezing",
    "noise_correlator",
    "chd",
    "squeezing_area",
    "chd_area",
]


def incoherent(alpha_ee: float) -> float:
    """``S_inc = incoherent * Re int exp(-i w t) <Dsig+ Dsig->``."""
    return 1.0 / (np.pi * alpha_ee)


def squeezing(params: AtomParams) -> float:
    """``S_phi = squeezing * int cos(w t) Re[e^{-i phi} <Dsig+ Dsig_phi>]``."""
    return 8.0 * params.gamma_plus * params.eta


def noise_correlator(params: AtomParams) -> float:
    """Prefactor of the two noise-correlator spectra; their sum and difference give ``S_0`` and ``S_pi/2``."""
    return 4.0 * params.gamma_plus * params.eta


def chd(params: AtomParams, alpha_ee: float) -> float:
    """``S_chd = chd * int cos(w t) [h(t) - 1]``."""
    return 4.0 * params.gamma_plus * alpha_ee


def squeezing_area(params: AtomParams) -> float:
    """``int S_phi dw = squeezing_area * V_phi``."""
    return 4.0 * np.pi * params.gamma_plus * params.eta


def chd_area(params: AtomParams, alpha_ee: float) -> float:
    return 4.0 * np.pi * params.gamma_plus * alpha_ee
