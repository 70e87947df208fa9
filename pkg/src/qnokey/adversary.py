"""Eve's channel strategies and exact security metrics.

Every strategy acts through quantum-legal operations on the in-flight
registers plus ancillas Eve injects herself; there is no amplitude-copying
primitive anywhere in the package, so physical legality is structural.

Exact mode evolves states and reads acceptance probabilities off the
authentication checks (continuing on the post-selected accepting branch), so
bob_accept_prob is conditional on Alice accepting and delivered fidelity is
conditional on all checks accepting. Monte-Carlo mode samples measured runs
and reports the matching conditional frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import config
from .boolfn import BooleanFunction, all_functions, random_function, serialize
from .oracle import apply_hadamard, apply_oracle, attach_register, detach_register, xor_constant
from .protocol import (
    PROTOCOLS,
    PartySecrets,
    ProtocolTranscript,
    run_alt_scheme,
    run_authenticated_protocol,
    run_basic_protocol,
    run_classical_protocol,
)
from .statevector import (
    DensityMatrix,
    QuantumState,
    RegisterLayout,
    make_state,
    measure_register,
    message_fidelity,
    project_register,
    register_probabilities,
    rename_register,
    trace_distance,
    zero_probability,
)

STRATEGY_KINDS = (
    "passive-inspect",
    "intercept-measure-resend",
    "substitute-oracle",
    "bitflip",
    "full-mitm",
)


@dataclass(frozen=True)
class EveStrategy:
    kind: str
    fe: BooleanFunction | None = None
    fe2: BooleanFunction | None = None
    target_register: str = "II"
    registers: tuple[str, ...] = ()
    mask: int = 0
    pass_index: int = 2
    keep_original: bool = True
    basis: str = "computational"

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        object.__setattr__(self, "registers", tuple(self.registers))
        if self.kind == "substitute-oracle" and self.fe is None:
            raise ValueError("substitute-oracle needs Eve's function fe")
        if self.kind == "intercept-measure-resend":
            if not self.registers:
                raise ValueError("intercept-measure-resend needs target registers")
            if self.basis != "computational":
                raise ValueError("only computational-basis interception is supported")
        if self.kind == "bitflip" and not self.registers:
            raise ValueError("bitflip needs a target register")

    @classmethod
    def passive(cls) -> EveStrategy:
        return cls("passive-inspect")

    @classmethod
    def substitute_oracle(cls, fe, pass_index=2, target_register="II", keep_original=True):
        return cls(
            "substitute-oracle",
            fe=fe,
            pass_index=pass_index,
            target_register=target_register,
            keep_original=keep_original,
        )

    @classmethod
    def bitflip(cls, register, mask, pass_index):
        return cls("bitflip", registers=(register,), mask=mask, pass_index=pass_index)

    @classmethod
    def intercept_measure_resend(cls, registers, pass_index=1):
        return cls("intercept-measure-resend", registers=tuple(registers), pass_index=pass_index)

    @classmethod
    def full_mitm(cls, fe=None, fe2=None):
        return cls("full-mitm", fe=fe, fe2=fe2)

    def to_jsonable(self) -> dict:
        out = {"kind": self.kind, "pass_index": self.pass_index}
        if self.fe is not None:
            out["fe"] = serialize(self.fe)
        if self.fe2 is not None:
            out["fe2"] = serialize(self.fe2)
        if self.kind == "substitute-oracle":
            out["target_register"] = self.target_register
            out["keep_original"] = self.keep_original
        if self.registers:
            out["registers"] = list(self.registers)
        if self.kind == "bitflip":
            out["mask"] = self.mask
        return out


def _clamp_prob(p: float | None) -> float | None:
    """Squash float round-off; anything further out of [0,1] is a bug."""
    if p is None:
        return None
    if not -1e-9 <= p <= 1.0 + 1e-9:
        raise AssertionError(f"probability {p} outside [0,1] beyond tolerance")
    return min(max(p, 0.0), 1.0)


@dataclass
class AttackReport:
    strategy: EveStrategy
    alice_accept_prob: float | None
    bob_accept_prob: float | None
    delivered_fidelity: float | None
    eve_distinguishability: float | None = None
    eve_recovered_message: str | None = None
    trials: int = 0
    seeds: list = field(default_factory=list)
    mode: str = "exact"
    protocol_id: str = ""

    def __post_init__(self):
        self.alice_accept_prob = _clamp_prob(self.alice_accept_prob)
        self.bob_accept_prob = _clamp_prob(self.bob_accept_prob)
        self.delivered_fidelity = _clamp_prob(self.delivered_fidelity)

    def to_dict(self) -> dict:
        return {
            "protocol_id": self.protocol_id,
            "strategy": self.strategy.to_jsonable(),
            "mode": self.mode,
            "alice_accept_prob": self.alice_accept_prob,
            "bob_accept_prob": self.bob_accept_prob,
            "delivered_fidelity": self.delivered_fidelity,
            "eve_distinguishability": self.eve_distinguishability,
            "eve_recovered_message": self.eve_recovered_message,
            "trials": self.trials,
            "seeds": [int(s) for s in self.seeds],
        }


def _unique_name(layout, base: str) -> str:
    name = base
    while name in layout.names():
        name += "'"
    return name


def _strategy_channel(strategy: EveStrategy, rng=None):
    """Build the channel hook realizing the strategy (full-mitm excluded)."""
    if strategy.kind == "passive-inspect":
        return None
    if strategy.kind == "bitflip":
        def hook(i, direction, state):
            if i != strategy.pass_index:
                return state
            return xor_constant(state, strategy.registers[0], strategy.mask)

        return hook
    if strategy.kind == "substitute-oracle":
        def hook(i, direction, state):
            if i != strategy.pass_index:
                return state
            tgt = strategy.target_register
            if strategy.keep_original:
                state = rename_register(state, tgt, _unique_name(state.layout, "E"))
            else:
                state = detach_register(state, tgt)
            state = attach_register(state, tgt, strategy.fe.width)
            return apply_oracle(state, strategy.fe, "I", tgt)

        return hook
    if strategy.kind == "intercept-measure-resend":
        if rng is None:
            raise ValueError("intercept-measure-resend needs an rng in sampled mode")

        def hook(i, direction, state):
            if i != strategy.pass_index:
                return state
            for reg in strategy.registers:
                state = measure_register(state, reg, rng).post_state
            return state

        return hook
    raise ValueError(f"strategy {strategy.kind!r} has no channel realization")


def _make_runner(protocol_id, inputs):
    """Close over the honest inputs; returns fn(channel, policy, rng) -> transcript."""
    if protocol_id == "classical":
        if inputs.get("m_prime") is None:
            raise ValueError("the classical protocol needs m_prime (a bit string)")
    elif inputs.get("message") is None:
        raise ValueError(f"protocol {protocol_id!r} needs an amplitude message")
    if protocol_id == "basic":
        def run(channel, policy, rng):
            return run_basic_protocol(
                inputs["message"], inputs["fa"], inputs["fb"],
                channel=channel, check_policy=policy, rng_seed=rng,
            )
    elif protocol_id == "classical":
        def run(channel, policy, rng):
            return run_classical_protocol(
                inputs["m_prime"], inputs["fa"], inputs["fb"],
                channel=channel, check_policy=policy, rng_seed=rng,
            )
    elif protocol_id == "authenticated":
        alice = PartySecrets(inputs["fa"], inputs["sa"])
        bob = PartySecrets(inputs["fb"], inputs["sb"])

        def run(channel, policy, rng):
            return run_authenticated_protocol(
                inputs["message"], alice, bob,
                channel=channel, check_policy=policy, rng_seed=rng,
            )
    elif protocol_id in PROTOCOLS:
        def run(channel, policy, rng):
            return run_alt_scheme(
                protocol_id, inputs["message"],
                sa=inputs.get("sa_bits"), sb=inputs.get("sb_bits"), s=inputs.get("s"),
                fa=inputs.get("fa"), fb=inputs.get("fb"),
                channel=channel, check_policy=policy, rng_seed=rng,
            )
    else:
        raise ValueError(f"unknown protocol {protocol_id!r}")
    return run


def _check_prob(transcript: ProtocolTranscript, label: str) -> float | None:
    for c in transcript.checks:
        if c.label == label:
            return c.zero_probability
    return None


def _combine_exact(protocol_id, branches):
    """Weighted combination of post-selected branch transcripts."""
    has_auth = protocol_id == "authenticated"
    alice_acc = 0.0
    bob_num = 0.0
    fid_num = 0.0
    fid_den = 0.0
    recovered: set[str] = set()
    for weight, t in branches:
        p_alice = _check_prob(t, "alice-verify") if has_auth else 1.0
        alice_acc += weight * p_alice
        if p_alice == 0.0:
            continue
        p_bob = _check_prob(t, "bob-verify") if has_auth else 1.0
        if p_bob is None:
            continue
        bob_num += weight * p_alice * p_bob
        if t.delivered_fidelity is not None and p_bob > 0.0:
            fid_num += weight * p_alice * p_bob * t.delivered_fidelity
            fid_den += weight * p_alice * p_bob
        if t.outcome_message is not None:
            recovered.add(t.outcome_message)
    bob_acc = bob_num / alice_acc if alice_acc > 0.0 else None
    fidelity = fid_num / fid_den if fid_den > 0.0 else None
    message = recovered.pop() if len(recovered) == 1 else None
    return alice_acc, bob_acc, fidelity, message


def _exact_branches(protocol_id, runner, strategy):
    if strategy.kind != "intercept-measure-resend":
        channel = _strategy_channel(strategy)
        return [(1.0, runner(channel, "post-select", None))]
    # Enumerate Eve's measurement outcomes exactly: capture the in-flight
    # state, split it into computational branches, rerun each.
    captured = {}

    def capture(i, direction, state):
        if i == strategy.pass_index:
            captured["state"] = state
        return state

    runner(capture, "post-select", None)
    if "state" not in captured:
        raise ValueError(f"protocol {protocol_id!r} has no pass {strategy.pass_index}")
    splits = [(1.0, captured["state"])]
    for reg in strategy.registers:
        nxt = []
        for w, st in splits:
            probs = register_probabilities(st, reg)
            for v, pv in enumerate(probs):
                if pv > 1e-15:
                    _, proj = project_register(st, reg, int(v))
                    nxt.append((w * float(pv), proj))
        splits = nxt
    branches = []
    for w, st in splits:
        def replace(i, direction, state, _st=st):
            return _st if i == strategy.pass_index else state

        branches.append((w, runner(replace, "post-select", None)))
    return branches


def attack(
    protocol_id: str,
    strategy: EveStrategy,
    *,
    message=None,
    m_prime: str | None = None,
    fa: BooleanFunction | None = None,
    fb: BooleanFunction | None = None,
    sa: BooleanFunction | None = None,
    sb: BooleanFunction | None = None,
    s=None,
    sa_bits=None,
    sb_bits=None,
    mode: str = "exact",
    trials: int = config.DEFAULT_TRIALS,
    seed: int = 0,
) -> AttackReport:
    """Run one attack configuration and report exact or sampled metrics."""
    if protocol_id not in PROTOCOLS:
        raise ValueError(f"unknown protocol {protocol_id!r}")
    if strategy.kind == "full-mitm":
        if protocol_id not in ("basic", "classical", "authenticated"):
            raise ValueError("full-mitm applies to basic, classical, authenticated")
        return mitm_demo(
            m_prime, seed, protocol=protocol_id, message=message,
            fa=fa, fb=fb, sa=sa, sb=sb, fe=strategy.fe, fe2=strategy.fe2,
            mode=mode, trials=trials,
        )
    if strategy.kind == "substitute-oracle" and protocol_id not in (
        "basic", "classical", "authenticated",
    ):
        raise ValueError(f"substitute-oracle does not apply to {protocol_id!r}")
    inputs = {
        "message": message, "m_prime": m_prime, "fa": fa, "fb": fb,
        "sa": sa, "sb": sb, "s": s, "sa_bits": sa_bits, "sb_bits": sb_bits,
    }
    runner = _make_runner(protocol_id, inputs)

    if mode == "exact":
        branches = _exact_branches(protocol_id, runner, strategy)
        alice_acc, bob_acc, fidelity, recovered = _combine_exact(protocol_id, branches)
        return AttackReport(
            strategy, alice_acc, bob_acc, fidelity,
            eve_recovered_message=None if protocol_id != "classical" else recovered,
            mode="exact", protocol_id=protocol_id,
        )
    if mode != "monte-carlo":
        raise ValueError(f"mode must be 'exact' or 'monte-carlo', got {mode!r}")

    has_auth = protocol_id == "authenticated"
    children = np.random.SeedSequence(seed).spawn(trials)
    alice_seen = alice_ok = bob_seen = bob_ok = 0
    fid_sum = 0.0
    fid_count = 0
    for child in children:
        rng = np.random.default_rng(child)
        channel = _strategy_channel(strategy, rng)
        t = runner(channel, "measure", rng)
        if has_auth:
            alice_seen += 1
            if not t.check_accepted("alice-verify"):
                continue
            alice_ok += 1
            bob_seen += 1
            if not t.check_accepted("bob-verify"):
                continue
            bob_ok += 1
        if t.delivered_fidelity is not None:
            fid_sum += t.delivered_fidelity
            fid_count += 1
    if has_auth:
        alice_acc = alice_ok / alice_seen if alice_seen else None
        bob_acc = bob_ok / bob_seen if bob_seen else None
    else:
        alice_acc = bob_acc = 1.0
    fidelity = fid_sum / fid_count if fid_count else None
    return AttackReport(
        strategy, alice_acc, bob_acc, fidelity,
        trials=trials, seeds=[seed], mode="monte-carlo", protocol_id=protocol_id,
    )


# ---------------------------------------------------------------------------
# Eve's view: averaged density matrices of in-flight passes


@dataclass
class EveView:
    protocol_id: str
    pass_index: int
    labels: tuple
    views: tuple[DensityMatrix, ...]
    trace_dist: float | None
    tuple_count: int
    sampled: bool

    def to_dict(self) -> dict:
        def mat(d: DensityMatrix):
            return [[[float(z.real), float(z.imag)] for z in row] for row in d.entries]

        return {
            "protocol_id": self.protocol_id,
            "pass_index": self.pass_index,
            "labels": [str(l) for l in self.labels],
            "views": [mat(v) for v in self.views],
            "trace_distance": self.trace_dist,
            "tuple_count": self.tuple_count,
            "sampled": self.sampled,
        }


def _function_choices(k, n, explicit):
    if explicit is not None:
        return list(explicit)
    count = 1 << (n * (1 << k))
    if count > config.EXACT_ENUMERATION_LIMIT:
        raise ValueError(
            f"function space has {count} members, beyond the exact enumeration limit; "
            "pass explicit choices or sample"
        )
    return list(all_functions(k, n))


def _guard_tuple_count(upper_bound: int):
    if upper_bound > config.EXACT_ENUMERATION_LIMIT:
        raise ValueError(
            f"{upper_bound} secret tuples exceed the exact enumeration limit; pass sample="
        )


def _secret_tuples(protocol_id, pass_index, k, n, fa_choices, fb_choices, sa_choices, sb_choices):
    """Enumerate the secrets that can influence the given pass."""
    fas = _function_choices(k, n, fa_choices)
    if protocol_id in ("basic", "classical"):
        if pass_index == 1:
            return [{"fa": fa} for fa in fas], len(fas)
        fbs = _function_choices(k, n, fb_choices)
        _guard_tuple_count(len(fas) * len(fbs))
        tuples = [{"fa": fa, "fb": fb} for fa in fas for fb in fbs]
        return tuples, len(tuples)
    if protocol_id == "authenticated":
        if pass_index == 1:
            return [{"fa": fa} for fa in fas], len(fas)
        fbs = _function_choices(k, n, fb_choices)
        sas = _function_choices(k, n, sa_choices)
        sbs = _function_choices(k, n, sb_choices)
        _guard_tuple_count(len(fas) * len(fbs) * len(sas) * len(sbs))
        tuples = [
            {"fa": fa, "fb": fb, "sa": sa, "sb": sb}
            for fa in fas
            for fb in fbs
            for sa in sas
            for sb in sbs
            if sa.table != sb.table
        ]
        return tuples, len(tuples)
    raise ValueError(f"eve_view does not support protocol {protocol_id!r}")


def _pass_state(protocol_id, pass_index, message, secrets, k, n) -> QuantumState:
    # Secrets absent from the tuple cannot influence the requested pass, so
    # any placeholder works; constants keep the run honest and cheap.
    zero = BooleanFunction(k, n, (0,) * (1 << k))
    one = BooleanFunction(k, n, (1,) * (1 << k))
    fa = secrets["fa"]
    fb = secrets.get("fb", zero)
    if protocol_id == "basic":
        t = run_basic_protocol(message, fa, fb)
    elif protocol_id == "classical":
        t = run_classical_protocol(message, fa, fb)
    else:
        sa = secrets.get("sa", zero)
        sb = secrets.get("sb", one)
        t = run_authenticated_protocol(message, PartySecrets(fa, sa), PartySecrets(fb, sb))
    if pass_index < 1 or pass_index > len(t.passes):
        raise ValueError(f"protocol {protocol_id!r} has no pass {pass_index}")
    return t.passes[pass_index - 1].state


def eve_view(
    protocol_id: str,
    pass_index: int,
    messages,
    *,
    k: int,
    n: int | None = None,
    fa_choices=None,
    fb_choices=None,
    sa_choices=None,
    sb_choices=None,
    known_message: str | None = None,
    sample: tuple[int, int] | None = None,
) -> EveView:
    """Average in-flight density matrix over the secret distribution.

    `messages` is one message or a pair; a pair additionally yields the trace
    distance, an exact upper bound on Eve's single-pass distinguishing
    advantage. For alt-keystring, `messages` names the two candidate key
    strings and `known_message` the message Eve already knows.
    """
    n = k if n is None else n
    if protocol_id == "alt-keystring":
        if known_message is None:
            raise ValueError("alt-keystring analysis needs known_message")
        if not isinstance(messages, (tuple, list)) or len(messages) != 2:
            raise ValueError("pass the two candidate key strings to compare")
        views = []
        for s_bits in messages:
            t = run_alt_scheme("alt-keystring", _basis_amplitudes(known_message), s=s_bits)
            st = t.passes[0].state
            views.append(DensityMatrix(np.outer(st.amplitudes, st.amplitudes.conj())))
        td = trace_distance(views[0], views[1])
        return EveView(protocol_id, 1, tuple(messages), tuple(views), td, len(messages), False)

    pair = isinstance(messages, (tuple, list)) and len(messages) == 2 and not np.isscalar(messages[0])
    if protocol_id == "classical":
        pair = isinstance(messages, (tuple, list)) and not isinstance(messages, str)
    msgs = list(messages) if pair else [messages]

    if sample is None:
        tuples, count = _secret_tuples(
            protocol_id, pass_index, k, n, fa_choices, fb_choices, sa_choices, sb_choices
        )
        sampled = False
    else:
        draws, sample_seed = sample
        rng = np.random.default_rng(sample_seed)
        tuples = []
        for _ in range(draws):
            secrets = {"fa": random_function(k, n, rng)}
            if pass_index > 1 or protocol_id == "authenticated":
                secrets["fb"] = random_function(k, n, rng)
            if protocol_id == "authenticated":
                sa = random_function(k, n, rng)
                sb = random_function(k, n, rng)
                while sb.table == sa.table:
                    sb = random_function(k, n, rng)
                secrets.update(sa=sa, sb=sb)
            tuples.append(secrets)
        count = draws
        sampled = True

    views = []
    for msg in msgs:
        rho = None
        for secrets in tuples:
            st = _pass_state(protocol_id, pass_index, msg, secrets, k, n)
            proj = np.outer(st.amplitudes, st.amplitudes.conj())
            rho = proj if rho is None else rho + proj
        views.append(DensityMatrix(rho / len(tuples)))
    td = trace_distance(views[0], views[1]) if len(views) == 2 else None
    labels = tuple(str(m) for m in msgs)
    return EveView(protocol_id, pass_index, labels, tuple(views), td, count, sampled)


def _basis_amplitudes(bits: str) -> np.ndarray:
    amp = np.zeros(1 << len(bits), dtype=np.complex128)
    amp[int(bits, 2)] = 1.0
    return amp


def _hadamard_amplitudes(bits: str) -> np.ndarray:
    k = len(bits)
    layout = RegisterLayout((("I", k),))
    state = make_state(layout, _basis_amplitudes(bits))
    return np.asarray(apply_hadamard(state, "I").amplitudes)


# ---------------------------------------------------------------------------
# Full man-in-the-middle demonstration


def _distinct_pairs(funcs):
    return [(a, b) for a in funcs for b in funcs if a.table != b.table]


def _auth_session1_accept(message, fa, sb_true, sb_guess, fe1, k, n) -> float:
    """Alice <-> Eve-as-Bob: probability Alice's tag check accepts."""
    layout = RegisterLayout((("I", k), ("II", n)))
    st = make_state(layout, message)
    st = apply_oracle(st, fa, "I", "II")
    st = apply_oracle(st, sb_guess, "I", "II")
    st = attach_register(st, "III", n)
    st = apply_oracle(st, fe1, "I", "III")
    st = apply_oracle(st, sb_true, "I", "II")
    st = apply_oracle(st, fa, "I", "II")
    return zero_probability(st, "II")


def _auth_session2(message, fb, sa_true, sb_true, sa_guess, sb_guess, fe2, k, n):
    """Eve-as-Alice <-> Bob: (bob accept probability, conditional fidelity)."""
    layout = RegisterLayout((("I", k), ("II", n)))
    st = make_state(layout, message)
    st = apply_oracle(st, fe2, "I", "II")
    st = apply_oracle(st, sb_true, "I", "II")
    st = attach_register(st, "III", n)
    st = apply_oracle(st, fb, "I", "III")
    st = apply_oracle(st, sb_guess, "I", "II")
    st = apply_oracle(st, fe2, "I", "II")
    st = rename_register(st, "II", _unique_name(st.layout, "E"))
    st = apply_oracle(st, sa_guess, "I", "III")
    st = apply_oracle(st, sa_true, "I", "III")
    st = apply_oracle(st, fb, "I", "III")
    p = zero_probability(st, "III")
    if p == 0.0:
        return 0.0, None
    _, proj = project_register(st, "III", 0)
    rest = detach_register(proj, "III")
    return p, message_fidelity(rest, message, "I")


def mitm_demo(
    classical_message: str | None = None,
    seed: int = 0,
    *,
    protocol: str = "basic",
    message=None,
    fa: BooleanFunction | None = None,
    fb: BooleanFunction | None = None,
    sa: BooleanFunction | None = None,
    sb: BooleanFunction | None = None,
    fe: BooleanFunction | None = None,
    fe2: BooleanFunction | None = None,
    k: int | None = None,
    n: int | None = None,
    eve_knows_keys: bool = False,
    mode: str = "exact",
    trials: int = config.DEFAULT_TRIALS,
) -> AttackReport:
    """Eve completes the protocol with each party while impersonating the other.

    Against the unauthenticated (basic/classical) exchange this succeeds
    silently: Eve finishes Alice's session as a fake Bob, reads the message,
    and re-sends it to Bob as a fake Alice. Against the authenticated
    exchange Eve must guess the id keys; exact mode averages Alice's (and
    Bob's) acceptance over all guess tuples, also over the honest keys when
    those are not pinned. Classical messages ride the authenticated protocol
    Hadamard-encoded, matching the classical-message flow.
    """
    rng = np.random.default_rng(seed)
    if protocol in ("basic", "classical"):
        if classical_message is None:
            raise ValueError("the unauthenticated demo transmits a classical message")
        k = len(classical_message) if k is None else k
        n = k if n is None else n
        fa = fa or random_function(k, n, rng)
        fb = fb or random_function(k, n, rng)
        fe1 = fe or random_function(k, n, rng)
        fe_2 = fe2 or random_function(k, n, rng)
        session1 = run_classical_protocol(classical_message, fa, fe1)
        eve_recovered = session1.outcome_message
        session2 = run_classical_protocol(eve_recovered, fe_2, fb)
        completed = session1.completed and session2.completed
        strategy = EveStrategy.full_mitm(fe1, fe_2)
        return AttackReport(
            strategy,
            1.0 if completed else None,
            1.0 if completed else None,
            session2.delivered_fidelity,
            eve_recovered_message=eve_recovered,
            seeds=[seed],
            mode=mode,
            protocol_id=protocol,
        )

    if protocol != "authenticated":
        raise ValueError(f"mitm_demo supports basic, classical, authenticated; got {protocol!r}")
    if (sa is None) != (sb is None):
        raise ValueError("pin both id keys or neither")
    if message is None:
        if classical_message is None:
            raise ValueError("authenticated demo needs a message")
        k = len(classical_message) if k is None else k
        message = _hadamard_amplitudes(classical_message)
    else:
        message = np.asarray(message, dtype=np.complex128)
        k = message.shape[0].bit_length() - 1 if k is None else k
    n = k if n is None else n

    if eve_knows_keys:
        if fa is None or fb is None or sa is None or sb is None:
            fa = fa or random_function(k, n, rng)
            fb = fb or random_function(k, n, rng)
            sa = sa or random_function(k, n, rng)
            sb = sb or random_function(k, n, rng)
            while sb.table == sa.table:
                sb = random_function(k, n, rng)
        fe1 = fe or random_function(k, n, rng)
        fe_2 = fe2 or random_function(k, n, rng)
        p_alice = _auth_session1_accept(message, fa, sb, sb, fe1, k, n)
        p_bob, fid = _auth_session2(message, fb, sa, sb, sa, sb, fe_2, k, n)
        return AttackReport(
            EveStrategy.full_mitm(fe1, fe_2), p_alice, p_bob, fid,
            seeds=[seed], mode=mode, protocol_id=protocol,
        )

    if mode == "exact":
        funcs = _function_choices(k, n, None)
        pairs = _distinct_pairs(funcs) if sa is None else [(sa, sb)]
        honest_fa = funcs if fa is None else [fa]
        honest_fb = funcs if fb is None else [fb]
        guesses = funcs if fe is None else [fe]
        total = len(honest_fa) * len(pairs) * len(funcs) * len(guesses)
        if total > config.EXACT_ENUMERATION_LIMIT:
            raise ValueError(
                f"{total} key/guess tuples exceed the exact enumeration limit; "
                "use monte-carlo mode"
            )
        alice_sum = 0.0
        count = 0
        for fa_h in honest_fa:
            for sa_h, sb_h in pairs:
                for sb_g in funcs:
                    for fe1 in guesses:
                        alice_sum += _auth_session1_accept(message, fa_h, sb_h, sb_g, fe1, k, n)
                        count += 1
        alice_acc = alice_sum / count

        bob_num = 0.0
        fid_num = 0.0
        bob_count = 0
        for fb_h in honest_fb:
            for sa_h, sb_h in pairs:
                for sa_g in funcs:
                    for sb_g in funcs:
                        for fe_g in funcs if fe2 is None else [fe2]:
                            p, fid = _auth_session2(
                                message, fb_h, sa_h, sb_h, sa_g, sb_g, fe_g, k, n
                            )
                            bob_num += p
                            if fid is not None:
                                fid_num += p * fid
                            bob_count += 1
        bob_acc = bob_num / bob_count
        fidelity = fid_num / bob_num if bob_num > 0 else None
        return AttackReport(
            EveStrategy.full_mitm(fe, fe2), alice_acc, bob_acc, fidelity,
            seeds=[seed], mode="exact", protocol_id=protocol,
        )

    if mode != "monte-carlo":
        raise ValueError(f"mode must be 'exact' or 'monte-carlo', got {mode!r}")
    children = np.random.SeedSequence(seed).spawn(trials)
    alice_ok = bob_seen = bob_ok = 0
    fid_sum = 0.0
    fid_n = 0
    for child in children:
        trial_rng = np.random.default_rng(child)
        fa_h = fa or random_function(k, n, trial_rng)
        fb_h = fb or random_function(k, n, trial_rng)
        if sa is None:
            sa_h = random_function(k, n, trial_rng)
            sb_h = random_function(k, n, trial_rng)
            while sb_h.table == sa_h.table:
                sb_h = random_function(k, n, trial_rng)
        else:
            sa_h, sb_h = sa, sb
        sb_g = random_function(k, n, trial_rng)
        sa_g = random_function(k, n, trial_rng)
        fe1 = fe or random_function(k, n, trial_rng)
        fe_g2 = fe2 or random_function(k, n, trial_rng)
        p_alice = _auth_session1_accept(message, fa_h, sb_h, sb_g, fe1, k, n)
        if trial_rng.random() >= p_alice:
            continue
        alice_ok += 1
        bob_seen += 1
        p_bob, fid = _auth_session2(message, fb_h, sa_h, sb_h, sa_g, sb_g, fe_g2, k, n)
        if trial_rng.random() >= p_bob:
            continue
        bob_ok += 1
        if fid is not None:
            fid_sum += fid
            fid_n += 1
    return AttackReport(
        EveStrategy.full_mitm(fe, fe2),
        alice_ok / trials,
        bob_ok / bob_seen if bob_seen else None,
        fid_sum / fid_n if fid_n else None,
        trials=trials,
        seeds=[seed],
        mode="monte-carlo",
        protocol_id=protocol,
    )
