import numpy as np
from hypothesis import strategies as st

from fockcontext.fock_core import BosonicState
from fockcontext.optics import bosonic_state_from_unit_vector


def random_unit_vector(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_real_state(rng):
    return bosonic_state_from_unit_vector(random_unit_vector(rng))


def random_complex_state(rng, basis):
    amps = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    return BosonicState.from_unnormalized(basis, amps)


angles = st.tuples(
    st.floats(0.0, np.pi, allow_nan=False),
    st.floats(0.0, 2 * np.pi, allow_nan=False, exclude_max=True),
)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []
