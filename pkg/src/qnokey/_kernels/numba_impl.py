"""Numba-compiled statevector kernels.

Same contracts as numpy_impl; single pass over the amplitude array, no
index temporaries. If numba is unavailable this module fails to import
and the package falls back to numpy_impl (see __init__).
"""

import numpy as np
from numba import njit

_ISQ2 = 1.0 / np.sqrt(2.0)


@njit(cache=True)
def apply_table_xor(amp, table, src_shift, src_mask, tgt_shift):
    out = np.empty_like(amp)
    for i in range(amp.shape[0]):
        v = table[(i >> src_shift) & src_mask]
        out[i ^ (v << tgt_shift)] = amp[i]
    return out


@njit(cache=True)
def apply_index_xor(amp, xor_mask):
    out = np.empty_like(amp)
    for i in range(amp.shape[0]):
        out[i] = amp[i ^ xor_mask]
    return out


@njit(cache=True)
def apply_table_substitute(amp, table, shift, mask):
    out = np.empty_like(amp)
    keep = ~(mask << shift)
    for i in range(amp.shape[0]):
        dest = (i & keep) | (table[(i >> shift) & mask] << shift)
        out[dest] = amp[i]
    return out


@njit(cache=True)
def hadamard_register(amp, positions):
    out = amp.copy()
    n = out.shape[0]
    for k in range(positions.shape[0]):
        post = 1 << positions[k]
        for base in range(0, n, 2 * post):
            for off in range(post):
                i = base + off
                j = i + post
                a = out[i]
                b = out[j]
                out[i] = (a + b) * _ISQ2
                out[j] = (a - b) * _ISQ2
    return out


@njit(cache=True)
def zero_probability(amp, shift, width):
    mask = (1 << width) - 1
    acc = 0.0
    for i in range(amp.shape[0]):
        if (i >> shift) & mask == 0:
            a = amp[i]
            acc += a.real * a.real + a.imag * a.imag
    return acc


@njit(cache=True)
def register_probs(amp, shift, width):
    size = 1 << width
    mask = size - 1
    probs = np.zeros(size, dtype=np.float64)
    for i in range(amp.shape[0]):
        a = amp[i]
        probs[(i >> shift) & mask] += a.real * a.real + a.imag * a.imag
    return probs
