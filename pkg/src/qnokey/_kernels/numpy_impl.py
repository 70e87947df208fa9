"""Pure-numpy implementations of the hot statevector kernels.

Reference semantics for the numba backend; every function here must stay
drop-in interchangeable with numba_impl. Permutation kernels move amplitudes
without arithmetic, so both backends agree bit-for-bit; Hadamard and the
probability reductions agree to float round-off only (summation order
differs).
"""

import numpy as np

_ISQ2 = 1.0 / np.sqrt(2.0)


def apply_table_xor(amp, table, src_shift, src_mask, tgt_shift):
    """amp'[i ^ (table[src(i)] << tgt_shift)] = amp[i], src(i) = (i>>src_shift)&src_mask."""
    idx = np.arange(amp.shape[0], dtype=np.int64)
    dest = idx ^ (table[(idx >> src_shift) & src_mask] << tgt_shift)
    out = np.empty_like(amp)
    out[dest] = amp
    return out


def apply_index_xor(amp, xor_mask):
    """amp'[i ^ xor_mask] = amp[i]."""
    idx = np.arange(amp.shape[0], dtype=np.int64)
    return amp[idx ^ xor_mask]


def apply_table_substitute(amp, table, shift, mask):
    """Replace the register value v at `shift` by table[v]; table must be a bijection."""
    idx = np.arange(amp.shape[0], dtype=np.int64)
    dest = (idx & ~(mask << shift)) | (table[(idx >> shift) & mask] << shift)
    out = np.empty_like(amp)
    out[dest] = amp
    return out


def hadamard_register(amp, positions):
    """Single-qubit Hadamard on every bit position in `positions` (LSB = 0)."""
    out = amp.copy()
    n = out.shape[0]
    for p in positions:
        post = 1 << p
        view = out.reshape(n // (2 * post), 2, post)
        x0 = view[:, 0, :].copy()
        x1 = view[:, 1, :].copy()
        view[:, 0, :] = (x0 + x1) * _ISQ2
        view[:, 1, :] = (x0 - x1) * _ISQ2
    return out


def zero_probability(amp, shift, width):
    """Total Born probability of the register at `shift` reading all zeros."""
    n = amp.shape[0]
    size = 1 << width
    post = 1 << shift
    p = amp.real * amp.real + amp.imag * amp.imag
    return float(p.reshape(n // (size * post), size, post)[:, 0, :].sum())


def register_probs(amp, shift, width):
    """Born probabilities of every value of the register at `shift`."""
    n = amp.shape[0]
    size = 1 << width
    post = 1 << shift
    p = amp.real * amp.real + amp.imag * amp.imag
    return p.reshape(n // (size * post), size, post).sum(axis=(0, 2))
