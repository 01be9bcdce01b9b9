import numpy as np
import pytest
from hypothesis import strategies as st

from switchthermo.qmat import DensityMatrix


def random_hermitian(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (a + a.conj().T)


def random_state(rng, dim=2, rank=None):
    """Ginibre-distributed density matrix of the given rank."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m / np.trace(m).real)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@st.composite
def bloch_states(draw):
    x, y, z = (draw(st.floats(-1, 1)) for _ in range(3))
    norm = max(1.0, (x * x + y * y + z * z) ** 0.5)
    return DensityMatrix.from_bloch(x / norm, y / norm, z / norm)


unit = st.floats(0.0, 1.0)
open_bath = st.floats(0.5, 1.0, exclude_min=True, exclude_max=True)
