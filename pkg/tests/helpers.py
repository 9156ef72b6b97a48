"""Shared strategies and comparison helpers."""

import numpy as np
from hypothesis import strategies as st

from flucto import AtomParams

omegas = st.floats(0.01, 10.0)
shelf_rates = st.tuples(st.floats(0.0, 0.1), st.floats(1e-3, 0.1))


@st.composite
def atom_params(draw, omega=omegas, rates=shelf_rates):
    gamma_d, gamma_a = draw(rates)
    return AtomParams(omega=draw(omega), gamma_d=gamma_d, gamma_a=gamma_a)


def rel_err(reference, value) -> float:
    """Max deviation relative to the max of ``reference``."""
    reference, value = np.asarray(reference), np.asarray(value)
    return float(np.max(np.abs(reference - value)) / np.max(np.abs(reference)))
