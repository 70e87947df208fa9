"""Three-pass protocol drivers and the alternative schemes.

Every driver is a pure function from inputs (plus an optional channel hook
and check policy) to a ProtocolTranscript. The channel hook is the seam the
adversary module plugs into: it receives each in-flight state and may return
it modified; honest runs use the identity.

Check policies:
  "abort"       decide on the exact all-zero probability (honest default);
  "measure"     projectively measure the check register (needs a seed);
  "post-select" continue on the renormalized accepting branch (exact attack
                analysis; the recorded flag still reflects the honest
                decision rule).

Check labels are a stable interface: "alice-verify" and "bob-verify" are the
authentication checkpoints (authenticated protocol only, abort on failure),
"*-clear-*" are informational tag-clear records, and "bob-recover" carries
the probability of decoding the sent classical message.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .boolfn import BooleanFunction, inverse_permutation, is_permutation, random_function, serialize
from .config import ATOL_INVARIANT
from .oracle import (
    apply_hadamard,
    apply_oracle,
    apply_permutation,
    attach_register,
    detach_register,
    xor_constant,
)
from .statevector import (
    QuantumState,
    RegisterLayout,
    make_state,
    measure_register,
    message_fidelity,
    project_register,
    register_probabilities,
    rename_register,
    state_digest,
    state_to_dict,
    zero_probability,
)

ChannelHook = Callable[[int, str, QuantumState], QuantumState]

ALT_SCHEMES = ("alt-19", "alt-20", "alt-keystring", "alt-21", "alt-22")
PROTOCOLS = ("basic", "classical", "authenticated") + ALT_SCHEMES

_WEAKNESS = {
    "alt-19": "no authentication possible",
    "alt-20": "no combined encryption and authentication",
    "alt-keystring": "no authentication possible; a known message reveals the key",
    "alt-21": "no authentication possible",
    "alt-22": "no authentication possible",
}


@dataclass(frozen=True)
class PartySecrets:
    """One party's session function and (for authenticated runs) id key."""

    session_fn: BooleanFunction
    id_key: BooleanFunction | None = None

    def __post_init__(self):
        if self.id_key is not None:
            if (self.session_fn.arity, self.session_fn.width) != (
                self.id_key.arity,
                self.id_key.width,
            ):
                raise ValueError("session function and id key must share arity and width")


@dataclass
class Pass:
    index: int
    label: str
    direction: str
    state: QuantumState


@dataclass
class Check:
    label: str
    zero_probability: float
    accepted: bool


@dataclass
class ProtocolTranscript:
    protocol_id: str
    passes: list[Pass] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    outcome_state: QuantumState | None = None
    outcome_message: str | None = None
    delivered_fidelity: float | None = None
    aborted_at: str | None = None
    weakness: str | None = None
    functions: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    check_policy: str = "abort"

    @property
    def completed(self) -> bool:
        return self.aborted_at is None

    def check_value(self, label: str) -> float:
        for c in self.checks:
            if c.label == label:
                return c.zero_probability
        raise KeyError(f"no check labeled {label!r}")

    def check_accepted(self, label: str) -> bool:
        for c in self.checks:
            if c.label == label:
                return c.accepted
        raise KeyError(f"no check labeled {label!r}")

    def to_dict(self, digest: bool = False) -> dict:
        def snap(state: QuantumState):
            if digest:
                return {"digest": state_digest(state)}
            return state_to_dict(state)

        return {
            "protocol_id": self.protocol_id,
            "check_policy": self.check_policy,
            "weakness": self.weakness,
            "functions": dict(self.functions),
            "seeds": dict(self.seeds),
            "passes": [
                {"index": p.index, "label": p.label, "direction": p.direction, "snapshot": snap(p.state)}
                for p in self.passes
            ],
            "checks": [
                {"label": c.label, "zero_probability": c.zero_probability, "accepted": c.accepted}
                for c in self.checks
            ],
            "aborted_at": self.aborted_at,
            "outcome_message": self.outcome_message,
            "outcome_state": snap(self.outcome_state) if self.outcome_state is not None else None,
            "delivered_fidelity": self.delivered_fidelity,
        }


class _Engine:
    """Pass bookkeeping, channel invocation, and check policy handling."""

    def __init__(self, protocol_id, channel, check_policy, rng_seed):
        if check_policy not in ("abort", "measure", "post-select"):
            raise ValueError(f"unknown check policy {check_policy!r}")
        if check_policy == "measure" and rng_seed is None:
            raise ValueError("check policy 'measure' needs rng_seed")
        self.channel = channel
        self.policy = check_policy
        self.rng = (
            rng_seed
            if isinstance(rng_seed, np.random.Generator) or rng_seed is None
            else np.random.default_rng(rng_seed)
        )
        self.transcript = ProtocolTranscript(protocol_id, check_policy=check_policy)
        if rng_seed is not None and not isinstance(rng_seed, np.random.Generator):
            self.transcript.seeds["checks"] = int(rng_seed)

    def send(self, index: int, label: str, direction: str, state: QuantumState) -> QuantumState:
        self.transcript.passes.append(Pass(index, label, direction, state))
        if self.channel is not None:
            state = self.channel(index, direction, state)
            if not isinstance(state, QuantumState):
                raise TypeError("channel hook must return a QuantumState")
        return state

    def verify(self, label: str, state: QuantumState, register: str):
        """Authentication checkpoint. Returns (proceed, state)."""
        p = zero_probability(state, register)
        if self.policy == "measure":
            outcome = measure_register(state, register, self.rng)
            accepted = set(outcome.value) <= {"0"}
            state = outcome.post_state if accepted else state
        elif self.policy == "post-select":
            accepted = p > 0.0
            if accepted:
                _, state = project_register(state, register, 0)
        else:
            accepted = p >= 1.0 - ATOL_INVARIANT
        self.transcript.checks.append(Check(label, p, accepted))
        return accepted, state

    def clear(self, label: str, state: QuantumState, register: str, holder: str) -> QuantumState:
        """Informational clear for unauthenticated runs: detach when the
        register is certainly zero, otherwise keep it under a held label."""
        p = zero_probability(state, register)
        accepted = p >= 1.0 - ATOL_INVARIANT
        self.transcript.checks.append(Check(label, p, accepted))
        if accepted:
            return detach_register(state, register)
        held = f"{register}!held-{holder}"
        while held in state.layout.names():
            held += "'"
        return rename_register(state, register, held)

    def abort(self, label: str) -> ProtocolTranscript:
        self.transcript.aborted_at = label
        return self.transcript

    def finish(self, *, state=None, message=None, fidelity=None) -> ProtocolTranscript:
        self.transcript.outcome_state = state
        self.transcript.outcome_message = message
        self.transcript.delivered_fidelity = fidelity
        return self.transcript


def _validate_pair(fa: BooleanFunction, fb: BooleanFunction):
    if (fa.arity, fa.width) != (fb.arity, fb.width):
        raise ValueError(
            f"function shapes differ: {fa.arity}->{fa.width} vs {fb.arity}->{fb.width}"
        )


def _three_pass_core(eng: _Engine, state: QuantumState, fa: BooleanFunction, fb: BooleanFunction):
    """Passes 1-3 of the unauthenticated exchange, ending after the receiver
    clears his tag register."""
    n = fa.width
    state = apply_oracle(state, fa, "I", "II")
    state = eng.send(1, "alice-encrypt", "A->B", state)
    state = attach_register(state, "III", n)
    state = apply_oracle(state, fb, "I", "III")
    state = eng.send(2, "bob-tag", "B->A", state)
    state = apply_oracle(state, fa, "I", "II")
    state = eng.clear("alice-clear-II", state, "II", "alice")
    state = eng.send(3, "alice-return", "A->B", state)
    state = apply_oracle(state, fb, "I", "III")
    state = eng.clear("bob-clear-III", state, "III", "bob")
    return state


def run_basic_protocol(
    message,
    fa: BooleanFunction,
    fb: BooleanFunction,
    channel: ChannelHook | None = None,
    check_policy: str = "abort",
    rng_seed=None,
) -> ProtocolTranscript:
    """Quantum-message exchange: both parties XOR-tag the message register
    with secret functions and strip their own tag one pass later."""
    _validate_pair(fa, fb)
    eng = _Engine("basic", channel, check_policy, rng_seed)
    eng.transcript.functions = {"fa": serialize(fa), "fb": serialize(fb)}
    layout = RegisterLayout((("I", fa.arity), ("II", fa.width)))
    message = np.asarray(message, dtype=np.complex128)
    state = make_state(layout, message)
    state = _three_pass_core(eng, state, fa, fb)
    return eng.finish(state=state, fidelity=message_fidelity(state, message, "I"))


def run_classical_protocol(
    m_prime: str,
    fa: BooleanFunction,
    fb: BooleanFunction,
    channel: ChannelHook | None = None,
    check_policy: str = "abort",
    rng_seed=None,
) -> ProtocolTranscript:
    """Classical k-bit message: encode |m'> through a register Hadamard, run
    the three-pass core, decode with another Hadamard and read the register."""
    _validate_pair(fa, fb)
    k = fa.arity
    if len(m_prime) != k or set(m_prime) - {"0", "1"}:
        raise ValueError(f"message must be a {k}-bit string, got {m_prime!r}")
    eng = _Engine("classical", channel, check_policy, rng_seed)
    eng.transcript.functions = {"fa": serialize(fa), "fb": serialize(fb)}
    layout = RegisterLayout((("I", k), ("II", fa.width)))
    amplitudes = np.zeros(1 << k, dtype=np.complex128)
    amplitudes[int(m_prime, 2)] = 1.0
    state = make_state(layout, amplitudes)
    state = apply_hadamard(state, "I")
    state = _three_pass_core(eng, state, fa, fb)
    state = apply_hadamard(state, "I")

    probs = register_probabilities(state, "I")
    p_sent = float(probs[int(m_prime, 2)])
    if eng.policy == "measure":
        outcome = measure_register(state, "I", eng.rng)
        recovered = outcome.value
        eng.transcript.checks.append(Check("bob-recover", p_sent, recovered == m_prime))
    else:
        recovered = state.layout.bits("I", int(np.argmax(probs)))
        eng.transcript.checks.append(Check("bob-recover", p_sent, p_sent >= 1.0 - ATOL_INVARIANT))
    return eng.finish(message=recovered, fidelity=p_sent)


def run_authenticated_protocol(
    message,
    alice: PartySecrets,
    bob: PartySecrets,
    channel: ChannelHook | None = None,
    check_policy: str = "abort",
    rng_seed=None,
) -> ProtocolTranscript:
    """Three-pass exchange with preshared id keys: each direction is tagged
    with the receiver-verifiable key, and each party checks that its own tag
    register comes back cleared before proceeding."""
    if alice.id_key is None or bob.id_key is None:
        raise ValueError("authenticated protocol needs id keys on both parties")
    fa, sa = alice.session_fn, alice.id_key
    fb, sb = bob.session_fn, bob.id_key
    _validate_pair(fa, fb)
    _validate_pair(sa, sb)
    _validate_pair(fa, sa)
    if sa.table == sb.table:
        raise ValueError("id keys must differ (s_A != s_B)")
    eng = _Engine("authenticated", channel, check_policy, rng_seed)
    eng.transcript.functions = {
        "fa": serialize(fa),
        "fb": serialize(fb),
        "sa": serialize(sa),
        "sb": serialize(sb),
    }
    k, n = fa.arity, fa.width
    layout = RegisterLayout((("I", k), ("II", n)))
    message = np.asarray(message, dtype=np.complex128)
    state = make_state(layout, message)

    state = apply_oracle(state, fa, "I", "II")
    state = eng.send(1, "alice-encrypt", "A->B", state)

    state = apply_oracle(state, sb, "I", "II")
    state = attach_register(state, "III", n)
    state = apply_oracle(state, fb, "I", "III")
    state = eng.send(2, "bob-tag", "B->A", state)

    state = apply_oracle(state, sb, "I", "II")
    state = apply_oracle(state, fa, "I", "II")
    ok, state = eng.verify("alice-verify", state, "II")
    if not ok:
        return eng.abort("alice-verify")
    state = detach_register(state, "II")
    state = apply_oracle(state, sa, "I", "III")
    state = eng.send(3, "alice-return", "A->B", state)

    state = apply_oracle(state, sa, "I", "III")
    state = apply_oracle(state, fb, "I", "III")
    ok, state = eng.verify("bob-verify", state, "III")
    if not ok:
        return eng.abort("bob-verify")
    state = detach_register(state, "III")
    return eng.finish(state=state, fidelity=message_fidelity(state, message, "I"))


def run_alt_scheme(
    scheme_id: str,
    message,
    *,
    sa=None,
    sb=None,
    s=None,
    fa: BooleanFunction | None = None,
    fb: BooleanFunction | None = None,
    channel: ChannelHook | None = None,
    check_policy: str = "abort",
    rng_seed=None,
) -> ProtocolTranscript:
    """The alternative no-key-style schemes.

    alt-19        interactive basis shifts with bit strings sa, sb;
    alt-20        one shared auxiliary register carrying fa, then fa^fb, then fb;
    alt-keystring one-pass basis shift with a preshared bit string s;
    alt-21        one-pass value permutation with a bijective function s;
    alt-22        one-pass tag register carrying s(m), cleared by the receiver.
    """
    if scheme_id not in ALT_SCHEMES:
        raise ValueError(f"unknown scheme {scheme_id!r}; expected one of {ALT_SCHEMES}")
    eng = _Engine(scheme_id, channel, check_policy, rng_seed)
    eng.transcript.weakness = _WEAKNESS[scheme_id]
    message = np.asarray(message, dtype=np.complex128)
    k = int(message.shape[0]).bit_length() - 1
    if 1 << k != message.shape[0]:
        raise ValueError("message length must be a power of two")

    if scheme_id == "alt-19":
        if sa is None or sb is None:
            raise ValueError("alt-19 needs bit strings sa and sb")
        sa_v = int(sa, 2) if isinstance(sa, str) else int(sa)
        sb_v = int(sb, 2) if isinstance(sb, str) else int(sb)
        eng.transcript.functions = {"sa": format(sa_v, f"0{k}b"), "sb": format(sb_v, f"0{k}b")}
        layout = RegisterLayout((("I", k),))
        state = make_state(layout, message)
        state = xor_constant(state, "I", sa_v)
        state = eng.send(1, "alice-shift", "A->B", state)
        state = xor_constant(state, "I", sb_v)
        state = eng.send(2, "bob-shift", "B->A", state)
        state = xor_constant(state, "I", sa_v)
        state = eng.send(3, "alice-unshift", "A->B", state)
        state = xor_constant(state, "I", sb_v)

    elif scheme_id == "alt-20":
        if fa is None or fb is None:
            raise ValueError("alt-20 needs functions fa and fb")
        _validate_pair(fa, fb)
        if fa.arity != k:
            raise ValueError(f"message has {k} bits but functions have arity {fa.arity}")
        eng.transcript.functions = {"fa": serialize(fa), "fb": serialize(fb)}
        layout = RegisterLayout((("I", k), ("II", fa.width)))
        state = make_state(layout, message)
        state = apply_oracle(state, fa, "I", "II")
        state = eng.send(1, "alice-tag", "A->B", state)
        state = apply_oracle(state, fb, "I", "II")
        state = eng.send(2, "bob-tag", "B->A", state)
        state = apply_oracle(state, fa, "I", "II")
        state = eng.send(3, "alice-untag", "A->B", state)
        state = apply_oracle(state, fb, "I", "II")
        state = eng.clear("bob-clear-II", state, "II", "bob")

    elif scheme_id == "alt-keystring":
        if s is None:
            raise ValueError("alt-keystring needs a bit string s")
        s_v = int(s, 2) if isinstance(s, str) else int(s)
        eng.transcript.functions = {"s": format(s_v, f"0{k}b")}
        layout = RegisterLayout((("I", k),))
        state = make_state(layout, message)
        state = xor_constant(state, "I", s_v)
        state = eng.send(1, "alice-shift", "A->B", state)
        state = xor_constant(state, "I", s_v)

    elif scheme_id == "alt-21":
        if not isinstance(s, BooleanFunction):
            raise ValueError("alt-21 needs a Boolean function s")
        if s.arity != s.width or not is_permutation(s):
            raise ValueError("scheme requires bijective s")
        if s.arity != k:
            raise ValueError(f"message has {k} bits but s has arity {s.arity}")
        eng.transcript.functions = {"s": serialize(s)}
        layout = RegisterLayout((("I", k),))
        state = make_state(layout, message)
        state = apply_permutation(state, "I", s)
        state = eng.send(1, "alice-permute", "A->B", state)
        state = apply_permutation(state, "I", inverse_permutation(s))

    else:  # alt-22
        if not isinstance(s, BooleanFunction):
            raise ValueError("alt-22 needs a Boolean function s")
        if s.arity != k:
            raise ValueError(f"message has {k} bits but s has arity {s.arity}")
        eng.transcript.functions = {"s": serialize(s)}
        layout = RegisterLayout((("I", k), ("II", s.width)))
        state = make_state(layout, message)
        state = apply_oracle(state, s, "I", "II")
        state = eng.send(1, "alice-tag", "A->B", state)
        state = apply_oracle(state, s, "I", "II")
        state = eng.clear("bob-clear-II", state, "II", "bob")

    return eng.finish(state=state, fidelity=message_fidelity(state, message, "I"))


def run_sequence(
    messages,
    key_policy: str = "fresh",
    *,
    fa: BooleanFunction | None = None,
    fb: BooleanFunction | None = None,
    n: int | None = None,
    rng_seed=None,
    channel: ChannelHook | None = None,
) -> list[ProtocolTranscript]:
    """Send a sequence of quantum messages through the basic protocol.

    key_policy "fresh" draws new session functions per state; "reused" draws
    once (or uses the given fa/fb throughout).
    """
    if key_policy not in ("fresh", "reused"):
        raise ValueError(f"key policy must be 'fresh' or 'reused', got {key_policy!r}")
    messages = [np.asarray(m, dtype=np.complex128) for m in messages]
    if not messages:
        return []
    length = messages[0].shape[0]
    if any(m.shape[0] != length for m in messages):
        raise ValueError("mixed dimensions in message sequence")
    k = length.bit_length() - 1
    n = k if n is None else n
    rng = np.random.default_rng(rng_seed)
    if key_policy == "reused" and fa is None:
        fa, fb = random_function(k, n, rng), random_function(k, n, rng)
    transcripts = []
    for m in messages:
        if key_policy == "fresh":
            fa_i, fb_i = random_function(k, n, rng), random_function(k, n, rng)
        else:
            fa_i, fb_i = fa, fb
        t = run_basic_protocol(m, fa_i, fb_i, channel=channel)
        if rng_seed is not None:
            t.seeds["sequence"] = int(rng_seed)
        transcripts.append(t)
    return transcripts
