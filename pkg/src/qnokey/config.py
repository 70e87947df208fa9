"""Size limits and environment knobs."""

import os

DEFAULT_MAX_QUBITS = 24
ENV_MAX_QUBITS = "QNOKEY_MAX_QUBITS"

# "auto" uses the numba kernels when numba imports, else pure numpy.
ENV_BACKEND = "QNOKEY_BACKEND"

MAX_ARITY = 16
TRACE_DISTANCE_MAX_DIM = 1 << 12
REDUCED_STATE_MAX_QUBITS = 12
EXACT_ENUMERATION_LIMIT = 1 << 20
DEFAULT_TRIALS = 10_000

ATOL_INVARIANT = 1e-9
ATOL_INPUT = 1e-6


def max_qubits() -> int:
    """Register cap; overridable via QNOKEY_MAX_QUBITS."""
    raw = os.environ.get(ENV_MAX_QUBITS)
    if raw is None:
        return DEFAULT_MAX_QUBITS
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{ENV_MAX_QUBITS} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"{ENV_MAX_QUBITS} must be >= 1, got {value}")
    return value
