"""Hot-kernel backend selection.

QNOKEY_BACKEND=numpy forces the pure-numpy path, =numba requires the
compiled path; unset (or "auto") prefers numba when it imports. Callers
pass contiguous complex128 amplitude arrays and int64 tables/positions.
"""

import os

from .. import config
from . import numpy_impl

try:
    from . import numba_impl

    _HAS_NUMBA = True
except ImportError:
    numba_impl = None
    _HAS_NUMBA = False

_KERNEL_NAMES = (
    "apply_table_xor",
    "apply_index_xor",
    "apply_table_substitute",
    "hadamard_register",
    "zero_probability",
    "register_probs",
)


def available_backends():
    return ("numpy", "numba") if _HAS_NUMBA else ("numpy",)


def _resolve(name):
    if name == "numpy":
        return numpy_impl
    if name == "numba":
        if not _HAS_NUMBA:
            raise RuntimeError("QNOKEY_BACKEND=numba but numba is not importable")
        return numba_impl
    if name == "auto":
        return numba_impl if _HAS_NUMBA else numpy_impl
    raise ValueError(f"unknown kernel backend {name!r} (numpy, numba, auto)")


_impl = _resolve(os.environ.get(config.ENV_BACKEND, "auto").lower())


def use_backend(name: str) -> None:
    """Switch kernel backend at runtime (benchmarks and tests)."""
    global _impl
    _impl = _resolve(name)


def backend_name() -> str:
    return "numba" if _impl is numba_impl else "numpy"


def __getattr__(name):
    if name in _KERNEL_NAMES:
        return getattr(_impl, name)
    raise AttributeError(name)
