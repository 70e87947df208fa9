import numpy as np
import pytest

from qnokey.adversary import EveStrategy, attack, eve_view, mitm_demo
from qnokey.boolfn import SHORTHANDS, all_functions, constant, random_function, xor
from qnokey.statevector import DensityMatrix, trace_distance

from conftest import random_state_amplitudes

SINGLE_BIT = list(all_functions(1, 1))


def distinct_pairs():
    return [(a, b) for a in SINGLE_BIT for b in SINGLE_BIT if a.table != b.table]


def honest_single_bit(rng):
    fa = random_function(1, 1, rng)
    fb = random_function(1, 1, rng)
    sa = random_function(1, 1, rng)
    sb = random_function(1, 1, rng)
    while sb.table == sa.table:
        sb = random_function(1, 1, rng)
    return fa, fb, sa, sb


class TestSubstituteOracle:
    def test_closed_form_acceptance(self, rng):
        for k in (1, 2):
            for _ in range(8):
                msg = random_state_amplitudes(1 << k, rng)
                fa, fb = random_function(k, k, rng), random_function(k, k, rng)
                sa = random_function(k, k, rng)
                sb = random_function(k, k, rng)
                while sb.table == sa.table:
                    sb = random_function(k, k, rng)
                fe = random_function(k, k, rng)
                rep = attack(
                    "authenticated", EveStrategy.substitute_oracle(fe),
                    message=msg, fa=fa, fb=fb, sa=sa, sb=sb, mode="exact",
                )
                expected = sum(
                    abs(msg[m]) ** 2
                    for m in range(1 << k)
                    if fe.table[m] ^ sb.table[m] ^ fa.table[m] == 0
                )
                assert rep.alice_accept_prob == pytest.approx(expected, abs=1e-12)

    def test_basic_protocol_has_no_check_but_corrupts(self, rng):
        # Non-constant fa stays entangled with Eve's keepsake register.
        msg = random_state_amplitudes(2, rng)
        rep = attack(
            "basic", EveStrategy.substitute_oracle(SHORTHANDS["x"]),
            message=msg, fa=SHORTHANDS["x"], fb=SHORTHANDS["xbar"], mode="exact",
        )
        assert rep.alice_accept_prob == 1.0
        assert rep.bob_accept_prob == 1.0
        assert rep.delivered_fidelity < 1.0 - 1e-6

    def test_average_over_all_tuples_strictly_below_one(self, rng):
        # Exhaustive (fa, fb, sa != sb, fe) enumeration, uniform message;
        # independent expectation from the closed form.
        msg = np.array([1, 1]) / np.sqrt(2)
        total = 0.0
        expected_total = 0.0
        count = 0
        for fa in SINGLE_BIT:
            for fb in SINGLE_BIT:
                for sa, sb in distinct_pairs():
                    for fe in SINGLE_BIT:
                        rep = attack(
                            "authenticated", EveStrategy.substitute_oracle(fe),
                            message=msg, fa=fa, fb=fb, sa=sa, sb=sb, mode="exact",
                        )
                        total += rep.alice_accept_prob
                        expected_total += sum(
                            0.5 for m in range(2)
                            if fe.table[m] ^ sb.table[m] ^ fa.table[m] == 0
                        )
                        count += 1
        assert count == 4 * 4 * 12 * 4
        assert total / count == pytest.approx(expected_total / count, abs=1e-12)
        assert total / count < 1.0

    def test_keep_original_false_refused_when_entangled(self, rng):
        from qnokey.oracle import EntangledRegisterError

        msg = random_state_amplitudes(2, rng)
        with pytest.raises(EntangledRegisterError):
            attack(
                "authenticated",
                EveStrategy.substitute_oracle(SHORTHANDS["x"], keep_original=False),
                message=msg, fa=SHORTHANDS["x"], fb=SHORTHANDS["xbar"],
                sa=SHORTHANDS["0"], sb=SHORTHANDS["1"], mode="exact",
            )


class TestOtherStrategies:
    def test_passive_inspect_is_noop(self, rng):
        msg = random_state_amplitudes(2, rng)
        fa, fb, sa, sb = honest_single_bit(rng)
        rep = attack(
            "authenticated", EveStrategy.passive(),
            message=msg, fa=fa, fb=fb, sa=sa, sb=sb, mode="exact",
        )
        assert rep.alice_accept_prob == pytest.approx(1.0, abs=1e-12)
        assert rep.bob_accept_prob == pytest.approx(1.0, abs=1e-12)
        assert rep.delivered_fidelity == pytest.approx(1.0, abs=1e-9)

    def test_bitflip_covering_check_register_always_detected(self, rng):
        msg = random_state_amplitudes(2, rng)
        fa, fb, sa, sb = honest_single_bit(rng)
        rep = attack(
            "authenticated", EveStrategy.bitflip("II", 1, 2),
            message=msg, fa=fa, fb=fb, sa=sa, sb=sb, mode="exact",
        )
        assert rep.alice_accept_prob == 0.0

    def test_bitflip_on_message_register_closed_form(self, rng):
        # Flip of register I at pass 2: acceptance is the mass where
        # fa ^ sb takes equal values on m and m ^ e.
        for _ in range(10):
            msg = random_state_amplitudes(4, rng)
            fa, fb = random_function(2, 2, rng), random_function(2, 2, rng)
            sa = random_function(2, 2, rng)
            sb = random_function(2, 2, rng)
            while sb.table == sa.table:
                sb = random_function(2, 2, rng)
            e = int(rng.integers(1, 4))
            rep = attack(
                "authenticated", EveStrategy.bitflip("I", e, 2),
                message=msg, fa=fa, fb=fb, sa=sa, sb=sb, mode="exact",
            )
            g = xor(fa, sb)
            expected = sum(
                abs(msg[m]) ** 2 for m in range(4) if g.table[m] == g.table[m ^ e]
            )
            assert rep.alice_accept_prob == pytest.approx(expected, abs=1e-12)

    def test_intercept_measure_resend_exact_branches(self, rng):
        # Computational measurement of register I commutes with the tags:
        # checks still accept, but superposed messages collapse.
        msg = np.array([0.6, 0.8])
        fa, fb, sa, sb = honest_single_bit(rng)
        rep = attack(
            "authenticated", EveStrategy.intercept_measure_resend(("I",), 1),
            message=msg, fa=fa, fb=fb, sa=sa, sb=sb, mode="exact",
        )
        assert rep.alice_accept_prob == pytest.approx(1.0, abs=1e-12)
        assert rep.bob_accept_prob == pytest.approx(1.0, abs=1e-12)
        expected_fidelity = 0.6**4 + 0.8**4  # sum_m p_m * |<msg|m>|^2
        assert rep.delivered_fidelity == pytest.approx(expected_fidelity, abs=1e-9)

    def test_inapplicable_pairs_rejected(self):
        with pytest.raises(ValueError, match="does not apply"):
            attack("alt-19", EveStrategy.substitute_oracle(SHORTHANDS["x"]), message=[1, 0])
        with pytest.raises(ValueError, match="full-mitm"):
            attack("alt-20", EveStrategy.full_mitm(), message=[1, 0])


class TestExactVsMonteCarlo:
    def agree(self, exact_p, freq, trials):
        if exact_p is None or freq is None:
            assert exact_p == freq
            return
        sigma = np.sqrt(max(exact_p * (1 - exact_p), 1e-12) / trials)
        assert abs(freq - exact_p) <= 3 * sigma + 1e-12

    @pytest.mark.parametrize(
        "strategy",
        [
            EveStrategy.substitute_oracle(constant(1, 1, 0)),
            EveStrategy.bitflip("I", 1, 2),
            EveStrategy.intercept_measure_resend(("I", "II"), 2),
            EveStrategy.passive(),
        ],
        ids=["substitute", "bitflip", "intercept", "passive"],
    )
    def test_authenticated_strategies(self, strategy):
        rng = np.random.default_rng(100)
        msg = random_state_amplitudes(2, rng)
        fa, fb, sa, sb = honest_single_bit(rng)
        kwargs = dict(message=msg, fa=fa, fb=fb, sa=sa, sb=sb)
        exact = attack("authenticated", strategy, mode="exact", **kwargs)
        trials = 10_000
        mc = attack("authenticated", strategy, mode="monte-carlo", trials=trials, seed=8, **kwargs)
        self.agree(exact.alice_accept_prob, mc.alice_accept_prob, trials)
        reached_bob = int(round((mc.alice_accept_prob or 0.0) * trials))
        if exact.bob_accept_prob is not None and reached_bob:
            self.agree(exact.bob_accept_prob, mc.bob_accept_prob, reached_bob)

    def test_full_mitm_agreement(self):
        trials = 10_000
        exact = mitm_demo("0", seed=0, protocol="authenticated", mode="exact")
        mc = mitm_demo("0", seed=9, protocol="authenticated", mode="monte-carlo", trials=trials)
        self.agree(exact.alice_accept_prob, mc.alice_accept_prob, trials)


class TestEveView:
    def test_classical_pass1_matches_projector_average(self):
        # Independent oracle: build the four tagged superpositions by hand,
        # average their projectors, compare entrywise.
        def tagged(mprime, fa):
            amp = np.zeros(4, dtype=complex)
            for m in range(2):
                sign = (-1) ** (m * mprime)
                amp[(m << 1) | fa.table[m]] = sign / np.sqrt(2)
            return np.outer(amp, amp.conj())

        view = eve_view("classical", 1, ("0", "1"), k=1)
        for label, rho in zip((0, 1), view.views):
            brute = sum(tagged(label, fa) for fa in SINGLE_BIT) / 4
            assert np.max(np.abs(rho.entries - brute)) <= 1e-12
        diff_eigs = np.linalg.eigvalsh(view.views[0].entries - view.views[1].entries)
        assert view.trace_dist == pytest.approx(0.5 * np.abs(diff_eigs).sum(), abs=1e-9)
        assert view.tuple_count == 4

    def test_degenerate_distribution_reveals_message(self):
        zero_fn = constant(1, 1, 0)
        view = eve_view(
            "basic", 1, ([1, 0], [0, 1]), k=1, fa_choices=[zero_fn]
        )
        # With fa pinned to the zero function the in-flight state is the
        # message itself (tag register stays |0>): orthogonal messages are
        # perfectly distinguishable.
        assert view.trace_dist == pytest.approx(1.0, abs=1e-12)
        assert view.views[0].purity() == pytest.approx(1.0, abs=1e-12)

    def test_keystring_known_message_leaks_key(self):
        view = eve_view("alt-keystring", 1, ("0", "1"), k=1, known_message="0")
        assert view.trace_dist == pytest.approx(1.0, abs=1e-12)

    def test_trace_distance_invariant_under_conjugation(self, rng):
        view = eve_view("classical", 1, ("0", "1"), k=1)
        a, b = view.views
        raw = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        u, _ = np.linalg.qr(raw)
        rotate = lambda d: DensityMatrix(u @ d.entries @ u.conj().T)
        assert trace_distance(rotate(a), rotate(b)) == pytest.approx(view.trace_dist, abs=1e-9)

    def test_authenticated_pass_states_enumerable(self):
        view = eve_view("authenticated", 2, ([1, 0], [0, 1]), k=1)
        assert view.tuple_count == 4 * 4 * 12
        assert view.views[0].dimension == 8

    def test_enumeration_guard(self):
        with pytest.raises(ValueError, match="enumeration limit"):
            eve_view("classical", 2, ("0000", "0001"), k=4)


class TestMitm:
    def test_basic_protocol_falls_silently(self):
        for seed in range(10):
            rep = mitm_demo("1", seed=seed, protocol="basic")
            assert rep.eve_recovered_message == "1"
            assert rep.alice_accept_prob == 1.0
            assert rep.bob_accept_prob == 1.0
            assert rep.delivered_fidelity == pytest.approx(1.0, abs=1e-9)

    def test_authenticated_exact_matches_analytic_half(self):
        # Uniform-magnitude message, uniform guess of sb: the per-input
        # agreement chance is 1/2, so the average acceptance is exactly 1/2.
        rep = mitm_demo("0", seed=0, protocol="authenticated", mode="exact")
        assert rep.alice_accept_prob == pytest.approx(0.5, abs=1e-12)
        assert rep.bob_accept_prob == pytest.approx(0.5, abs=1e-12)

    def test_insider_with_keys_passes(self):
        rep = mitm_demo("0", seed=2, protocol="authenticated", eve_knows_keys=True)
        assert rep.alice_accept_prob == pytest.approx(1.0, abs=1e-12)
        assert rep.bob_accept_prob == pytest.approx(1.0, abs=1e-12)
        assert rep.delivered_fidelity == pytest.approx(1.0, abs=1e-9)

    def test_report_serialization(self):
        rep = mitm_demo("0", seed=0, protocol="basic")
        data = rep.to_dict()
        assert data["strategy"]["kind"] == "full-mitm"
        assert data["eve_recovered_message"] == "0"
        assert data["seeds"] == [0]


class TestPhysicalLegality:
    def test_strategy_outputs_stay_normalized(self, rng):
        from qnokey.adversary import _strategy_channel
        from qnokey.statevector import QuantumState, RegisterLayout

        layout = RegisterLayout((("I", 1), ("II", 1), ("III", 1)))
        state = QuantumState(layout, random_state_amplitudes(8, rng))
        strategies = [
            EveStrategy.substitute_oracle(SHORTHANDS["x"]),
            EveStrategy.bitflip("II", 1, 2),
            EveStrategy.intercept_measure_resend(("II",), 2),
        ]
        for strat in strategies:
            hook = _strategy_channel(strat, rng=np.random.default_rng(0))
            out = hook(2, "B->A", state)
            assert np.linalg.norm(out.amplitudes) == pytest.approx(1.0, abs=1e-9)
