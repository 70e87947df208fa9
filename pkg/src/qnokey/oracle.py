"""Unitary actions on register states.

The central operation is the XOR oracle |m>|y> -> |m>|y ^ F(m)>: a pure
basis-index permutation, applied exactly (amplitudes are moved, never
combined, so no round-off enters). Hadamards, constant basis shifts, value
permutations, register attach/detach, and a gate-level compilation of the
oracle live here too.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, config
from .boolfn import BooleanFunction, is_permutation
from .config import ATOL_INVARIANT
from .statevector import QuantumState, reduced_density_matrix, zero_probability


class EntangledRegisterError(ValueError):
    """Raised when a detach would discard an entangled, non-cleared register."""


def apply_oracle(state: QuantumState, f: BooleanFunction, source: str, target: str) -> QuantumState:
    """XOR f(source register) into the target register."""
    layout = state.layout
    if source == target:
        raise ValueError("source and target registers must differ")
    if layout.width(source) != f.arity:
        raise ValueError(
            f"register {source!r} has width {layout.width(source)}, function arity is {f.arity}"
        )
    if layout.width(target) != f.width:
        raise ValueError(
            f"register {target!r} has width {layout.width(target)}, function width is {f.width}"
        )
    amp = _kernels.apply_table_xor(
        state.amplitudes,
        f.table_array(),
        layout.shift(source),
        layout.mask(source),
        layout.shift(target),
    )
    return state.replace_amplitudes(amp)


def apply_hadamard(state: QuantumState, register: str) -> QuantumState:
    """Hadamard on every qubit of the register."""
    layout = state.layout
    positions = np.asarray(layout.bit_positions(register), dtype=np.int64)
    return state.replace_amplitudes(_kernels.hadamard_register(state.amplitudes, positions))


def xor_constant(state: QuantumState, register: str, value) -> QuantumState:
    """XOR a constant bit pattern into the register (maps |v> to |v ^ value>)."""
    layout = state.layout
    v = int(value, 2) if isinstance(value, str) else int(value)
    if not 0 <= v <= layout.mask(register):
        raise ValueError(f"value {value!r} out of range for register {register!r}")
    amp = _kernels.apply_index_xor(state.amplitudes, v << layout.shift(register))
    return state.replace_amplitudes(amp)


def apply_permutation(state: QuantumState, register: str, s: BooleanFunction) -> QuantumState:
    """Map the register value v to s(v); s must be a bijection."""
    layout = state.layout
    if s.arity != layout.width(register) or s.width != layout.width(register):
        raise ValueError(
            f"register {register!r} has width {layout.width(register)}, "
            f"function is {s.arity}->{s.width}"
        )
    if not is_permutation(s):
        raise ValueError("scheme requires bijective s")
    amp = _kernels.apply_table_substitute(
        state.amplitudes, s.table_array(), layout.shift(register), layout.mask(register)
    )
    return state.replace_amplitudes(amp)


def attach_register(state: QuantumState, name: str, width: int) -> QuantumState:
    """Append a fresh |0> register after the existing ones."""
    layout = state.layout.with_register(name, width)
    amp = np.zeros(layout.dimension, dtype=np.complex128)
    amp[:: 1 << width] = state.amplitudes
    return QuantumState._adopt(layout, amp)


def _slice_register(state: QuantumState, name: str, value: int) -> np.ndarray:
    layout = state.layout
    size = 1 << layout.width(name)
    post = 1 << layout.shift(name)
    view = state.amplitudes.reshape(layout.dimension // (size * post), size, post)
    return view[:, value, :].ravel().copy()


def detach_register(state: QuantumState, name: str) -> QuantumState:
    """Remove a register that is |0> with certainty, or unentangled.

    Dropping an entangled, non-cleared register is refused: that is exactly
    the situation where the remaining registers are not in a pure state.
    """
    layout = state.layout
    zp = zero_probability(state, name)
    if zp >= 1.0 - ATOL_INVARIANT:
        rest = _slice_register(state, name, 0)
        rest /= np.sqrt(zp)
        return QuantumState._adopt(layout.without(name), rest)
    width = layout.width(name)
    if width <= config.REDUCED_STATE_MAX_QUBITS:
        rho = reduced_density_matrix(state, {name})
        if abs(rho.purity() - 1.0) <= ATOL_INVARIANT:
            probs = np.real(np.diag(rho.entries))
            value = int(np.argmax(probs))
            rest = _slice_register(state, name, value)
            rest /= np.linalg.norm(rest)
            return QuantumState._adopt(layout.without(name), rest)
    raise EntangledRegisterError(
        f"register {name!r} is entangled with the rest of the state "
        f"(all-zero probability {zp:.6g}); refusing to detach"
    )


@dataclass(frozen=True)
class Gate:
    """X / CX / multi-controlled X on global qubit indices."""

    kind: str
    controls: tuple[int, ...]
    target: int

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        object.__setattr__(self, "target", int(self.target))
        expected = {"X": (0, 0), "CX": (1, 1), "MCX": (2, None)}
        if self.kind not in expected:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        lo, hi = expected[self.kind]
        if len(self.controls) < lo or (hi is not None and len(self.controls) > hi):
            raise ValueError(f"{self.kind} gate got {len(self.controls)} controls")
        if len(set(self.controls)) != len(self.controls):
            raise ValueError("duplicate control qubits")
        if self.target in self.controls:
            raise ValueError("controls must be disjoint from the target")


def _controlled_x(controls: tuple[int, ...], target: int) -> Gate:
    if not controls:
        return Gate("X", (), target)
    if len(controls) == 1:
        return Gate("CX", controls, target)
    return Gate("MCX", controls, target)


def compile_oracle(f: BooleanFunction, source_qubits, target_qubits) -> list[Gate]:
    """Minterm decomposition of the XOR oracle.

    For each target bit, one multi-controlled X per input assignment on which
    that bit of f is set, with X-conjugation realizing the 0-controls. A
    constant-one output bit collapses to a single X on its target.
    """
    source_qubits = tuple(int(q) for q in source_qubits)
    target_qubits = tuple(int(q) for q in target_qubits)
    if len(source_qubits) != f.arity:
        raise ValueError(f"need {f.arity} source qubits, got {len(source_qubits)}")
    if len(target_qubits) != f.width:
        raise ValueError(f"need {f.width} target qubits, got {len(target_qubits)}")
    if set(source_qubits) & set(target_qubits):
        raise ValueError("source and target qubits must be disjoint")
    k, n = f.arity, f.width
    gates: list[Gate] = []
    for j in range(n):
        rows = [m for m in range(1 << k) if (f.table[m] >> (n - 1 - j)) & 1]
        if len(rows) == 1 << k:
            gates.append(Gate("X", (), target_qubits[j]))
            continue
        for m in rows:
            flips = [source_qubits[i] for i in range(k) if not ((m >> (k - 1 - i)) & 1)]
            gates.extend(Gate("X", (), q) for q in flips)
            gates.append(_controlled_x(source_qubits, target_qubits[j]))
            gates.extend(Gate("X", (), q) for q in reversed(flips))
    return gates


def apply_gates(state: QuantumState, gates) -> QuantumState:
    """Play a gate list; each gate is a basis permutation, applied exactly."""
    total = state.layout.total_width
    amp = state.amplitudes
    idx = np.arange(state.layout.dimension, dtype=np.int64)
    for gate in gates:
        for q in (*gate.controls, gate.target):
            if not 0 <= q < total:
                raise ValueError(f"qubit {q} outside the {total}-qubit layout")
        target_bit = 1 << (total - 1 - gate.target)
        if gate.kind == "X":
            amp = _kernels.apply_index_xor(amp, target_bit)
            continue
        ctrl_mask = 0
        for c in gate.controls:
            ctrl_mask |= 1 << (total - 1 - c)
        dest = np.where((idx & ctrl_mask) == ctrl_mask, idx ^ target_bit, idx)
        out = np.empty_like(amp)
        out[dest] = amp
        amp = out
    return state.replace_amplitudes(amp)


def gates_to_jsonable(gates) -> list:
    return [
        {"gate": g.kind, "controls": list(g.controls), "target": g.target} for g in gates
    ]


def gates_from_jsonable(data) -> list[Gate]:
    return [Gate(d["gate"], tuple(d["controls"]), d["target"]) for d in data]
