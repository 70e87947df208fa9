"""Acceptance suite: each test enforces one exit criterion at its stated
tolerance and prints a single pass/fail line (run with -s to see them)."""

import json
import time

import numpy as np

from qnokey.adversary import EveStrategy, attack, eve_view, mitm_demo
from qnokey.boolfn import (
    BooleanFunction,
    all_functions,
    identity,
    random_function,
    xor,
)
from qnokey.cli import main as cli_main
from qnokey.oracle import apply_gates, apply_hadamard, apply_oracle, compile_oracle, Gate
from qnokey.protocol import (
    PartySecrets,
    run_alt_scheme,
    run_authenticated_protocol,
    run_basic_protocol,
    run_classical_protocol,
)
from qnokey.statevector import QuantumState, RegisterLayout, make_state

from conftest import random_state_amplitudes

SINGLE_BIT = list(all_functions(1, 1))


def _report(num: int, desc: str, ok: bool, extra: str = ""):
    tail = f" ({extra})" if extra else ""
    print(f"[acceptance {num:02d}] {'PASS' if ok else 'FAIL'} - {desc}{tail}")
    assert ok, f"criterion {num} failed: {desc}"


def distinct_key_pair(k, n, rng):
    sa = random_function(k, n, rng)
    sb = random_function(k, n, rng)
    while sb.table == sa.table:
        sb = random_function(k, n, rng)
    return sa, sb


def test_criterion_01_three_pass_round_trip():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    ok = True

    def ancillas_exactly_zero(state):
        # amplitudes on every index with a nonzero ancilla value must be 0.0
        # exactly, not merely small: tag removal is a pure permutation.
        layout = state.layout
        idx = np.arange(layout.dimension)
        clear = np.ones(layout.dimension, dtype=bool)
        for name in layout.names():
            if name != "I":
                clear &= ((idx >> layout.shift(name)) & layout.mask(name)) == 0
        return not np.any(state.amplitudes[~clear])

    def check(t, msg, fb):
        nonlocal ok
        ok &= t.outcome_state.layout.names() == ("I",)
        ok &= abs(t.delivered_fidelity - 1.0) <= 1e-9
        ok &= np.max(np.abs(t.outcome_state.amplitudes - msg)) <= 1e-9
        for c in t.checks:
            ok &= c.accepted and abs(c.zero_probability - 1.0) <= 1e-12
        # replay Bob's final tag removal on the in-flight pass-3 state
        received = t.passes[2].state
        ok &= ancillas_exactly_zero(apply_oracle(received, fb, "I", "III"))

    for fa in SINGLE_BIT:
        for fb in SINGLE_BIT:
            for _ in range(20):
                msg = random_state_amplitudes(2, rng)
                check(run_basic_protocol(msg, fa, fb), msg, fb)
    for k in (2, 3):
        for _ in range(100):
            msg = random_state_amplitudes(1 << k, rng)
            fa = random_function(k, k, rng)
            fb = random_function(k, k, rng)
            check(run_basic_protocol(msg, fa, fb), msg, fb)
    elapsed = time.perf_counter() - start
    ok &= elapsed < 5.0
    _report(1, "three-pass round trip, fidelity 1 and ancillas exactly cleared", ok,
            f"{320 + 200} runs in {elapsed:.2f}s")


def test_criterion_02_worked_single_bit_example():
    isq2 = 1 / np.sqrt(2)
    x, xbar = SINGLE_BIT[1], SINGLE_BIT[2]
    assert x.table == (0, 1) and xbar.table == (1, 0)
    t = run_classical_protocol("0", x, xbar)
    ok = np.allclose(t.passes[0].state.amplitudes, [isq2, 0, 0, isq2], atol=1e-12)
    recoveries = 0
    for fa in SINGLE_BIT:
        for fb in SINGLE_BIT:
            for bit in ("0", "1"):
                if run_classical_protocol(bit, fa, fb).outcome_message == bit:
                    recoveries += 1
    ok &= recoveries == 32
    _report(2, "single-bit worked example and 32/32 exact recoveries", ok,
            f"{recoveries}/32")


def test_criterion_03_oracle_algebra():
    ok = True

    def probe_state(k, n, extra=0, seed=0):
        rng = np.random.default_rng(seed)
        regs = [("I", k), ("II", n)] + ([("III", n)] if extra else [])
        layout = RegisterLayout(tuple(regs))
        return QuantumState(layout, random_state_amplitudes(layout.dimension, rng))

    def err(a, b):
        return float(np.max(np.abs(a.amplitudes - b.amplitudes)))

    for k in (1, 2):
        funcs = list(all_functions(k, k))
        state2 = probe_state(k, k, seed=k)
        state3 = probe_state(k, k, extra=1, seed=k + 10)
        for f in funcs:
            ok &= err(apply_oracle(apply_oracle(state2, f, "I", "II"), f, "I", "II"), state2) <= 1e-12
        for f in funcs:
            for g in funcs:
                chained = apply_oracle(apply_oracle(state2, f, "I", "II"), g, "I", "II")
                ok &= err(chained, apply_oracle(state2, xor(f, g), "I", "II")) <= 1e-12
                fg = apply_oracle(apply_oracle(state3, f, "I", "II"), g, "I", "III")
                gf = apply_oracle(apply_oracle(state3, g, "I", "III"), f, "I", "II")
                ok &= err(fg, gf) <= 1e-12
    rng = np.random.default_rng(99)
    for _ in range(1000):
        f = random_function(3, 3, rng)
        g = random_function(3, 3, rng)
        layout = RegisterLayout((("I", 3), ("II", 3), ("III", 3)))
        state = QuantumState(layout, random_state_amplitudes(layout.dimension, rng))
        ok &= err(apply_oracle(apply_oracle(state, f, "I", "II"), f, "I", "II"), state) <= 1e-12
        chained = apply_oracle(apply_oracle(state, f, "I", "II"), g, "I", "II")
        ok &= err(chained, apply_oracle(state, xor(f, g), "I", "II")) <= 1e-12
        fg = apply_oracle(apply_oracle(state, f, "I", "II"), g, "I", "III")
        gf = apply_oracle(apply_oracle(state, g, "I", "III"), f, "I", "II")
        ok &= err(fg, gf) <= 1e-12
    _report(3, "oracle involution, commutation, and composition laws", ok)


def test_criterion_04_hadamard_sign_law():
    ok = True
    worst = 0.0
    for k in (1, 2, 3):
        layout = RegisterLayout((("I", k),))
        dim = 1 << k
        matrix = np.zeros((dim, dim), dtype=complex)
        for col in range(dim):
            basis = np.zeros(dim)
            basis[col] = 1.0
            matrix[:, col] = apply_hadamard(make_state(layout, basis), "I").amplitudes
        expected = np.array(
            [
                [(-1) ** bin(m & mp).count("1") / np.sqrt(dim) for mp in range(dim)]
                for m in range(dim)
            ]
        )
        worst = max(worst, float(np.max(np.abs(matrix - expected))))
    ok &= worst <= 1e-12
    _report(4, "Hadamard transform matches the sign law entrywise", ok,
            f"max entry error {worst:.2e}")


def test_criterion_05_honest_authenticated_runs():
    rng = np.random.default_rng(5)
    ok = True
    for _ in range(200):
        k = int(rng.integers(1, 3))
        n = int(rng.integers(1, 3))
        msg = random_state_amplitudes(1 << k, rng)
        fa, fb = random_function(k, n, rng), random_function(k, n, rng)
        sa, sb = distinct_key_pair(k, n, rng)
        t = run_authenticated_protocol(msg, PartySecrets(fa, sa), PartySecrets(fb, sb))
        ok &= abs(t.check_value("alice-verify") - 1.0) <= 1e-12
        ok &= abs(t.check_value("bob-verify") - 1.0) <= 1e-12
        ok &= t.completed
    _report(5, "honest authenticated checks read all-zero with probability 1", ok)


def test_criterion_06_mitm_contrast():
    ok = True
    recovered = 0
    for seed in range(100):
        bit = "01"[seed % 2]
        rep = mitm_demo(bit, seed=seed, protocol="basic")
        if (
            rep.eve_recovered_message == bit
            and rep.alice_accept_prob == 1.0
            and rep.bob_accept_prob == 1.0
            and rep.delivered_fidelity is not None
            and abs(rep.delivered_fidelity - 1.0) <= 1e-9
        ):
            recovered += 1
    ok &= recovered == 100

    # Independent brute force over every (fa, sa != sb, sb guess, fe) tuple:
    # Alice accepts on the amplitude mass where the guess agrees with sb, and
    # the Hadamard-encoded "0" message weights every input equally.
    pairs = [(a, b) for a in SINGLE_BIT for b in SINGLE_BIT if a.table != b.table]
    total = 0.0
    count = 0
    for fa in SINGLE_BIT:
        for sa, sb in pairs:
            for guess in SINGLE_BIT:
                for fe in SINGLE_BIT:
                    matches = sum(1 for m in range(2) if guess.table[m] == sb.table[m])
                    total += matches / 2
                    count += 1
    ok &= count == 768
    brute = total / count
    rep = mitm_demo("0", seed=0, protocol="authenticated", mode="exact")
    ok &= abs(rep.alice_accept_prob - brute) <= 1e-12
    _report(6, "MITM succeeds on basic, exact acceptance matches brute force", ok,
            f"basic {recovered}/100, auth accept {rep.alice_accept_prob:.12f} vs {brute:.12f}")


def test_criterion_07_substitution_detection_closed_form():
    rng = np.random.default_rng(7)
    ok = True
    worst = 0.0
    for _ in range(50):
        k = int(rng.integers(1, 3))
        msg = random_state_amplitudes(1 << k, rng)
        fa, fb = random_function(k, k, rng), random_function(k, k, rng)
        sa, sb = distinct_key_pair(k, k, rng)
        fe = random_function(k, k, rng)
        rep = attack(
            "authenticated", EveStrategy.substitute_oracle(fe),
            message=msg, fa=fa, fb=fb, sa=sa, sb=sb, mode="exact",
        )
        closed = sum(
            abs(msg[m]) ** 2
            for m in range(1 << k)
            if fe.table[m] ^ sb.table[m] ^ fa.table[m] == 0
        )
        worst = max(worst, abs(rep.alice_accept_prob - closed))
    ok &= worst <= 1e-12
    _report(7, "substitution acceptance equals the closed form", ok,
            f"max deviation {worst:.2e}")


def test_criterion_08_eve_view_analysis():
    view = eve_view("classical", 1, ("0", "1"), k=1)

    def brute_average(mprime):
        rho = np.zeros((4, 4), dtype=complex)
        for fa in SINGLE_BIT:
            amp = np.zeros(4, dtype=complex)
            for m in range(2):
                amp[(m << 1) | fa.table[m]] = (-1) ** (m * mprime) / np.sqrt(2)
            rho += np.outer(amp, amp.conj())
        return rho / 4

    ok = True
    for mprime, rho in zip((0, 1), view.views):
        ok &= float(np.max(np.abs(rho.entries - brute_average(mprime)))) <= 1e-12
    eigs = np.linalg.eigvalsh(view.views[0].entries - view.views[1].entries)
    ok &= abs(view.trace_dist - 0.5 * float(np.abs(eigs).sum())) <= 1e-9
    _report(8, "Eve-view matrices and trace distance match brute force", ok,
            f"trace distance {view.trace_dist:.9f}")


def test_criterion_09_alternative_schemes():
    rng = np.random.default_rng(9)
    ok = True
    for scheme in ("alt-19", "alt-20", "alt-keystring", "alt-21", "alt-22"):
        for _ in range(50):
            k = 2
            msg = random_state_amplitudes(1 << k, rng)
            if scheme == "alt-19":
                kwargs = {
                    "sa": format(int(rng.integers(0, 4)), "02b"),
                    "sb": format(int(rng.integers(0, 4)), "02b"),
                }
            elif scheme == "alt-20":
                kwargs = {"fa": random_function(k, 2, rng), "fb": random_function(k, 2, rng)}
            elif scheme == "alt-keystring":
                kwargs = {"s": format(int(rng.integers(0, 4)), "02b")}
            elif scheme == "alt-21":
                table = tuple(int(v) for v in rng.permutation(4))
                kwargs = {"s": BooleanFunction(2, 2, table)}
            else:
                kwargs = {"s": random_function(k, 2, rng)}
            t = run_alt_scheme(scheme, msg, **kwargs)
            ok &= abs(t.delivered_fidelity - 1.0) <= 1e-9

    rejected = 0
    attempts = 0
    while attempts < 100:
        table = tuple(int(v) for v in rng.integers(0, 4, size=4))
        if sorted(table) == [0, 1, 2, 3]:
            continue
        attempts += 1
        try:
            run_alt_scheme("alt-21", [1, 0, 0, 0], s=BooleanFunction(2, 2, table))
        except ValueError:
            rejected += 1
    ok &= rejected == 100
    _report(9, "alternative schemes round-trip; alt-21 rejects non-bijections", ok,
            f"rejected {rejected}/100")


def test_criterion_10_gate_compilation():
    rng = np.random.default_rng(10)
    ok = True
    worst = 0.0
    for _ in range(50):
        k = int(rng.integers(1, 4))
        n = int(rng.integers(1, 4))
        f = random_function(k, n, rng)
        layout = RegisterLayout((("I", k), ("II", n)))
        gates = compile_oracle(f, layout.qubits("I"), layout.qubits("II"))
        for _ in range(100):
            state = QuantumState(layout, random_state_amplitudes(layout.dimension, rng))
            delta = np.max(
                np.abs(
                    apply_gates(state, gates).amplitudes
                    - apply_oracle(state, f, "I", "II").amplitudes
                )
            )
            worst = max(worst, float(delta))
    ok &= worst <= 1e-12
    single_cnot = compile_oracle(identity(1), (0,), (1,))
    ok &= single_cnot == [Gate("CX", (0,), 1)]
    _report(10, "compiled gates reproduce the oracle; x compiles to one CNOT", ok,
            f"max amplitude error {worst:.2e}")


def test_criterion_11_reproducibility(tmp_path, capsys):
    corpus = [
        ["run", "--protocol", "basic", "--k", "1", "--message-random", "--seed", "1",
         "--fa-random", "--fb-random"],
        ["run", "--protocol", "basic", "--k", "3", "--message-random", "--seed", "2",
         "--fa-random", "--fb-random", "--digest"],
        ["run", "--protocol", "classical", "--k", "2", "--message", "10",
         "--fa-random", "--fb-random", "--seed", "3"],
        ["run", "--protocol", "authenticated", "--k", "1", "--message-random",
         "--fa-random", "--fb-random", "--sa-random", "--sb-random", "--seed", "4"],
        ["run", "--protocol", "alt-19", "--k", "2", "--message", "11", "--sa", "10",
         "--sb", "01"],
        ["run", "--protocol", "alt-keystring", "--k", "1", "--message", "1", "--s", "1"],
        ["run", "--protocol", "alt-21", "--k", "1", "--message", "1", "--s", "1:1:1,0"],
        ["run", "--protocol", "alt-22", "--k", "1", "--message", "0", "--s", "xbar"],
        ["run", "--protocol", "basic", "--k", "1", "--sequence", "2", "--key-policy",
         "fresh", "--seed", "6"],
        ["attack", "--protocol", "authenticated", "--strategy", "substitute-oracle",
         "--fe", "1:1:0,0", "--k", "1", "--message-random", "--seed", "7"],
        ["analyze", "--protocol", "classical", "--pass", "1", "--k", "1",
         "--messages", "0,1"],
    ]
    ok = True
    for i, args in enumerate(corpus):
        f1 = tmp_path / f"c{i}a.json"
        f2 = tmp_path / f"c{i}b.json"
        ok &= cli_main(args + ["--out", str(f1)]) == 0
        ok &= cli_main(args + ["--out", str(f2)]) == 0
        ok &= f1.read_bytes() == f2.read_bytes()
        ok &= cli_main(["verify", str(f1)]) == 0
        ok &= json.loads(f1.read_text())["config"] is not None
    capsys.readouterr()  # swallow CLI chatter; the verdict line follows
    _report(11, "corpus verifies and reruns are byte-identical", ok,
            f"{len(corpus)} corpus entries")
