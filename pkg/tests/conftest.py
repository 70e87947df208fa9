import numpy as np
import pytest

from qnokey import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger kernel compilation once, so timed tests measure algebra, not JIT."""
    amp = np.zeros(8, dtype=np.complex128)
    amp[0] = 1.0
    table = np.array([0, 1], dtype=np.int64)
    _kernels.apply_table_xor(amp, table, 2, 1, 0)
    _kernels.apply_index_xor(amp, 1)
    _kernels.apply_table_substitute(amp, table, 2, 1)
    _kernels.hadamard_register(amp, np.array([1, 0], dtype=np.int64))
    _kernels.zero_probability(amp, 0, 1)
    _kernels.register_probs(amp, 0, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_state_amplitudes(dim, rng):
    amp = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return amp / np.linalg.norm(amp)
