"""Dense pure states over named qubit registers.

Basis-index convention (used everywhere in this package): the integer index
of a basis state is the concatenation of the register contents in layout
order, with the FIRST register occupying the MOST significant bits. Within a
register, the first bit is the most significant. Equivalently, a register's
value sits at ``(index >> shift) & mask`` where ``shift`` is the total width
of all registers that come after it.

Global qubit indices count from the most significant bit: qubit 0 is the
first bit of the first register, so qubit q lives at bit position
``total_width - 1 - q``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, config
from .config import ATOL_INPUT, ATOL_INVARIANT


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered named registers; immutable."""

    registers: tuple[tuple[str, int], ...]

    def __post_init__(self):
        regs = tuple((str(name), int(width)) for name, width in self.registers)
        object.__setattr__(self, "registers", regs)
        if not regs:
            raise ValueError("layout needs at least one register")
        names = [name for name, _ in regs]
        if len(set(names)) != len(names):
            raise ValueError(f"register names must be unique, got {names}")
        for name, width in regs:
            if not name:
                raise ValueError("register names must be non-empty")
            if width < 1:
                raise ValueError(f"register {name!r} must have width >= 1, got {width}")
        cap = config.max_qubits()
        if self.total_width > cap:
            raise ValueError(
                f"layout has {self.total_width} qubits, exceeding the cap of {cap} "
                f"(override with {config.ENV_MAX_QUBITS})"
            )

    @property
    def total_width(self) -> int:
        return sum(width for _, width in self.registers)

    @property
    def dimension(self) -> int:
        return 1 << self.total_width

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.registers)

    def _position(self, name: str) -> int:
        for i, (reg, _) in enumerate(self.registers):
            if reg == name:
                return i
        raise KeyError(f"no register named {name!r} in layout {self.names()}")

    def width(self, name: str) -> int:
        return self.registers[self._position(name)][1]

    def shift(self, name: str) -> int:
        """Bit offset of the register: total width of all registers after it."""
        pos = self._position(name)
        return sum(width for _, width in self.registers[pos + 1 :])

    def mask(self, name: str) -> int:
        return (1 << self.width(name)) - 1

    def extract(self, index: int, name: str) -> int:
        return (index >> self.shift(name)) & self.mask(name)

    def bits(self, name: str, value: int) -> str:
        return format(value, f"0{self.width(name)}b")

    def bit_positions(self, name: str) -> tuple[int, ...]:
        """Bit positions of the register's qubits, most significant first."""
        shift = self.shift(name)
        return tuple(range(shift + self.width(name) - 1, shift - 1, -1))

    def qubits(self, name: str) -> tuple[int, ...]:
        """Global qubit indices of the register, first qubit first."""
        total = self.total_width
        return tuple(total - 1 - p for p in self.bit_positions(name))

    def with_register(self, name: str, width: int) -> RegisterLayout:
        if name in self.names():
            raise ValueError(f"register {name!r} already present")
        return RegisterLayout(self.registers + ((name, width),))

    def without(self, name: str) -> RegisterLayout:
        pos = self._position(name)
        if len(self.registers) == 1:
            raise ValueError("cannot remove the last register")
        return RegisterLayout(self.registers[:pos] + self.registers[pos + 1 :])

    def renamed(self, old: str, new: str) -> RegisterLayout:
        pos = self._position(old)
        if new in self.names():
            raise ValueError(f"register {new!r} already present")
        regs = list(self.registers)
        regs[pos] = (new, regs[pos][1])
        return RegisterLayout(tuple(regs))

    def to_jsonable(self) -> list:
        return [[name, width] for name, width in self.registers]

    @classmethod
    def from_jsonable(cls, data) -> RegisterLayout:
        return cls(tuple((str(n), int(w)) for n, w in data))


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Normalized complex amplitude vector over a register layout."""

    layout: RegisterLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.ascontiguousarray(self.amplitudes, dtype=np.complex128).copy()
        object.__setattr__(self, "amplitudes", amp)
        self._validate_and_freeze()

    def _validate_and_freeze(self):
        amp = self.amplitudes
        if amp.ndim != 1 or amp.shape[0] != self.layout.dimension:
            raise ValueError(
                f"expected {self.layout.dimension} amplitudes for layout "
                f"{self.layout.names()}, got shape {amp.shape}"
            )
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > ATOL_INVARIANT:
            raise ValueError(f"state norm {norm!r} deviates from 1 by more than {ATOL_INVARIANT}")
        amp.flags.writeable = False

    @classmethod
    def _adopt(cls, layout: RegisterLayout, amplitudes: np.ndarray) -> QuantumState:
        """Adopt a complex128 array without the public constructor's defensive
        copy: the array must be fresh (sole reference) or already frozen by
        another state."""
        self = object.__new__(cls)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "amplitudes", amplitudes)
        self._validate_and_freeze()
        return self

    def replace_amplitudes(self, amplitudes: np.ndarray) -> QuantumState:
        """Same layout, fresh amplitude array (ownership transfers)."""
        return QuantumState._adopt(self.layout, amplitudes)

    def probabilities(self) -> np.ndarray:
        a = self.amplitudes
        return a.real * a.real + a.imag * a.imag


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian trace-one matrix; positivity is a tested property, not a
    constructor check (the eigendecomposition would dominate construction)."""

    entries: np.ndarray

    def __post_init__(self):
        mat = np.ascontiguousarray(self.entries, dtype=np.complex128).copy()
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {mat.shape}")
        if not np.allclose(mat, mat.conj().T, atol=ATOL_INVARIANT, rtol=0.0):
            raise ValueError("density matrix is not Hermitian within tolerance")
        if abs(np.trace(mat).real - 1.0) > ATOL_INVARIANT or abs(np.trace(mat).imag) > ATOL_INVARIANT:
            raise ValueError(f"density matrix trace {np.trace(mat)} is not 1 within tolerance")
        mat.flags.writeable = False
        object.__setattr__(self, "entries", mat)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    register: str
    value: str
    probability: float
    post_state: QuantumState


def make_state(layout: RegisterLayout, message_amplitudes, ancillas_zero: bool = True) -> QuantumState:
    """Prepare a state with the given amplitudes on the first register and all
    other registers |0>. With ancillas_zero=False the sequence is interpreted
    as amplitudes over the whole layout instead."""
    amp = np.asarray(message_amplitudes, dtype=np.complex128).ravel()
    first_name, first_width = layout.registers[0]
    expected = layout.dimension if not ancillas_zero else (1 << first_width)
    if amp.shape[0] != expected:
        raise ValueError(
            f"expected {expected} amplitudes "
            f"({'full layout' if not ancillas_zero else f'register {first_name!r}'}), "
            f"got {amp.shape[0]}"
        )
    norm = np.linalg.norm(amp)
    if norm == 0.0:
        raise ValueError("amplitude vector is all zeros")
    if abs(norm - 1.0) > ATOL_INPUT:
        raise ValueError(f"amplitude norm {norm} deviates from 1 by more than {ATOL_INPUT}")
    amp = (amp / norm).astype(np.complex128)
    if not ancillas_zero:
        return QuantumState._adopt(layout, amp)
    rest = layout.total_width - first_width
    full = np.zeros(layout.dimension, dtype=np.complex128)
    full[np.arange(amp.shape[0], dtype=np.int64) << rest] = amp
    return QuantumState._adopt(layout, full)


def fidelity(a: QuantumState, b: QuantumState) -> float:
    """|<a|b>|^2; layouts must match."""
    if a.layout != b.layout:
        raise ValueError(f"layout mismatch: {a.layout.names()} vs {b.layout.names()}")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def zero_probability(state: QuantumState, register: str) -> float:
    """Exact probability that the register reads all zeros; no state change."""
    layout = state.layout
    return float(
        _kernels.zero_probability(state.amplitudes, layout.shift(register), layout.width(register))
    )


def register_probabilities(state: QuantumState, register: str) -> np.ndarray:
    """Born probabilities for every value of one register."""
    layout = state.layout
    return _kernels.register_probs(
        state.amplitudes, layout.shift(register), layout.width(register)
    )


def project_register(state: QuantumState, register: str, value: int) -> tuple[float, QuantumState | None]:
    """Probability of the register reading `value`, and the renormalized
    projection (None when the probability is zero)."""
    layout = state.layout
    shift = layout.shift(register)
    mask = layout.mask(register)
    idx = np.arange(layout.dimension, dtype=np.int64)
    keep = ((idx >> shift) & mask) == value
    amp = state.amplitudes
    prob = float(np.sum(amp.real[keep] ** 2 + amp.imag[keep] ** 2))
    if prob == 0.0:
        return 0.0, None
    projected = np.where(keep, amp, 0.0) / np.sqrt(prob)
    return prob, QuantumState._adopt(layout, projected)


def measure_register(state: QuantumState, register: str, rng_seed) -> MeasurementOutcome:
    """Born-rule measurement of one register in the computational basis.

    Deterministic given the seed; accepts an int seed or a numpy Generator.
    """
    layout = state.layout
    probs = register_probabilities(state, register)
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    value = int(rng.choice(probs.shape[0], p=probs / probs.sum()))
    prob, post = project_register(state, register, value)
    return MeasurementOutcome(register, layout.bits(register, value), prob, post)


def reduced_density_matrix(state: QuantumState, keep) -> DensityMatrix:
    """Partial trace keeping the named registers (in layout order)."""
    keep = set([keep]) if isinstance(keep, str) else set(keep)
    if not keep:
        raise ValueError("keep must name at least one register")
    layout = state.layout
    names = layout.names()
    unknown = keep - set(names)
    if unknown:
        raise KeyError(f"unknown registers {sorted(unknown)}; layout has {names}")
    kept_width = sum(layout.width(n) for n in keep)
    if kept_width > config.REDUCED_STATE_MAX_QUBITS:
        raise ValueError(
            f"kept registers span {kept_width} qubits; reduced states are limited to "
            f"{config.REDUCED_STATE_MAX_QUBITS}"
        )
    dims = [width for _, width in layout.registers]
    tensor = state.amplitudes.reshape([1 << w for w in dims])
    kept_axes = [i for i, (n, _) in enumerate(layout.registers) if n in keep]
    traced_axes = [i for i in range(len(dims)) if i not in kept_axes]
    tensor = tensor.transpose(kept_axes + traced_axes).reshape(1 << kept_width, -1)
    rho = tensor @ tensor.conj().T
    return DensityMatrix(rho)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Half the trace norm of a-b."""
    if a.dimension != b.dimension:
        raise ValueError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    if a.dimension > config.TRACE_DISTANCE_MAX_DIM:
        raise ValueError(
            f"trace distance limited to dimension {config.TRACE_DISTANCE_MAX_DIM}, "
            f"got {a.dimension}"
        )
    eigvals = np.linalg.eigvalsh(a.entries - b.entries)
    return float(0.5 * np.sum(np.abs(eigvals)))


def rename_register(state: QuantumState, old: str, new: str) -> QuantumState:
    """Relabel a register; the frozen amplitude array is shared."""
    return QuantumState._adopt(state.layout.renamed(old, new), state.amplitudes)


def message_fidelity(state: QuantumState, message_amplitudes, register: str = "I") -> float:
    """Fidelity of one register against a target pure state: |<m|psi>|^2 when
    the register is the whole state, else <m|rho|m> of the reduced state."""
    target = np.asarray(message_amplitudes, dtype=np.complex128).ravel()
    target = target / np.linalg.norm(target)
    if state.layout.names() == (register,):
        return float(abs(np.vdot(target, state.amplitudes)) ** 2)
    rho = reduced_density_matrix(state, {register})
    return float(np.real(target.conj() @ (rho.entries @ target)))


def state_to_dict(state: QuantumState) -> dict:
    """JSON-ready snapshot: {"layout": [[name,width],...], "amplitudes": [[re,im],...]}."""
    return {
        "layout": state.layout.to_jsonable(),
        "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes],
    }


def state_digest(state: QuantumState, chunk: int = 1 << 18) -> str:
    """SHA-256 of the canonical snapshot JSON, streamed in chunks.

    Byte-identical to hashing serialize.canonical_json(state_to_dict(state))
    but without materializing the JSON text, so digest-mode transcripts stay
    cheap at the 24-qubit cap. Relies on canonical key order: "amplitudes"
    sorts before "layout". Cached on the (immutable) state.
    """
    import hashlib

    from .serialize import canonical_json

    cached = getattr(state, "_digest", None)
    if cached is not None:
        return cached
    h = hashlib.sha256()
    h.update(b'{"amplitudes":[')
    amp = state.amplitudes + 0.0  # turn -0.0 into 0.0, matching canonical_json
    for start in range(0, amp.shape[0], chunk):
        block = amp[start : start + chunk]
        body = ",".join(f"[{z.real:.12g},{z.imag:.12g}]" for z in block)
        if start:
            h.update(b",")
        h.update(body.encode("ascii"))
    tail = '],"layout":' + canonical_json(state.layout.to_jsonable()) + "}"
    h.update(tail.encode("ascii"))
    digest = h.hexdigest()
    object.__setattr__(state, "_digest", digest)
    return digest


def state_from_dict(data: dict) -> QuantumState:
    layout = RegisterLayout.from_jsonable(data["layout"])
    amp = np.array([complex(re, im) for re, im in data["amplitudes"]], dtype=np.complex128)
    return QuantumState(layout, amp)


def format_state(state: QuantumState, precision: int = 6, eps: float = 1e-12) -> str:
    """Human-readable ket sum, register values comma-separated."""
    layout = state.layout
    names = layout.names()
    terms = []
    for i, a in enumerate(state.amplitudes):
        if abs(a) <= eps:
            continue
        if abs(a.imag) <= eps:
            coef = f"{a.real:.{precision}f}"
        else:
            coef = f"({a.real:.{precision}f}{a.imag:+.{precision}f}j)"
        bits = ",".join(layout.bits(n, layout.extract(i, n)) for n in names)
        terms.append(f"{coef}|{bits}>")
    return " + ".join(terms) if terms else "0"
