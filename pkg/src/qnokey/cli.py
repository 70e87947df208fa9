"""Command-line interface: run, attack, analyze, verify.

Every command resolves its randomness (seeded draws of messages and
functions) into an explicit config, serializes that config canonically, and
executes from the re-parsed serialization. Outputs embed the config, so
`verify` can re-execute a file and compare snapshots byte for byte.

Exit codes: 0 success, 1 usage error, 2 protocol check failure or
verification mismatch, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, _kernels
from .adversary import EveStrategy, attack, eve_view, mitm_demo
from .boolfn import deserialize, parse_function, random_function, serialize
from .protocol import (
    ALT_SCHEMES,
    PROTOCOLS,
    PartySecrets,
    run_alt_scheme,
    run_authenticated_protocol,
    run_basic_protocol,
    run_classical_protocol,
)
from .serialize import canonical_json
from .statevector import format_state, state_digest

_SUMMARY_WIDTH_LIMIT = 8  # print full kets up to this many qubits, digests beyond


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def _streams(seed: int, names):
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {name: np.random.default_rng(child) for name, child in zip(names, children)}


def _random_amplitudes(k: int, rng) -> list:
    amp = rng.normal(size=1 << k) + 1j * rng.normal(size=1 << k)
    amp /= np.linalg.norm(amp)
    return [[float(a.real), float(a.imag)] for a in amp]


def _bits_amplitudes(bits: str) -> list:
    out = [[0.0, 0.0] for _ in range(1 << len(bits))]
    out[int(bits, 2)][0] = 1.0
    return out


def _resolve_message(args, k: int, rng) -> dict:
    given = sum(bool(x) for x in (args.message, args.message_random, args.message_file))
    if given > 1:
        raise ValueError("pass only one of --message, --message-random, --message-file")
    if args.protocol == "classical" and (args.message_random or args.message_file):
        raise ValueError("the classical protocol takes --message as a bit string")
    if args.message_random:
        return {"amplitudes": _random_amplitudes(k, rng)}
    if args.message_file:
        with open(args.message_file) as fh:
            data = json.load(fh)
        return {"amplitudes": [[float(re), float(im)] for re, im in data]}
    bits = args.message if args.message else "0" * k
    if len(bits) != k or set(bits) - {"0", "1"}:
        raise ValueError(f"--message must be a {k}-bit string, got {bits!r}")
    if args.protocol == "classical":
        return {"bits": bits}
    return {"amplitudes": _bits_amplitudes(bits)}


def _resolve_function(spec, random_flag, k, n, rng, flag_name):
    if spec and random_flag:
        raise ValueError(f"pass either --{flag_name} or --{flag_name}-random, not both")
    if spec:
        f = parse_function(spec)
        if f.arity != k or f.width != n:
            raise ValueError(f"--{flag_name} has shape {f.arity}->{f.width}, expected {k}->{n}")
        return serialize(f)
    if random_flag:
        return serialize(random_function(k, n, rng))
    return None


def _infer_k(args) -> int:
    if args.k:
        return args.k
    specs = [args.fa, args.fb, getattr(args, "fe", None)]
    if getattr(args, "protocol", None) in ("alt-21", "alt-22"):
        specs.append(args.s)
    for spec in specs:
        if spec:
            try:
                return parse_function(spec).arity
            except ValueError:
                continue
    if args.message:
        return len(args.message)
    if getattr(args, "protocol", None) == "alt-keystring" and args.s:
        return len(args.s)
    if getattr(args, "protocol", None) == "alt-19" and args.sa:
        return len(args.sa)
    raise ValueError("cannot infer k; pass --k")


def _message_array(spec: dict) -> np.ndarray:
    if "bits" in spec:
        amp = np.zeros(1 << len(spec["bits"]), dtype=np.complex128)
        amp[int(spec["bits"], 2)] = 1.0
        return amp
    return np.array([complex(re, im) for re, im in spec["amplitudes"]], dtype=np.complex128)


def _build_run_config(args) -> dict:
    if args.protocol not in PROTOCOLS:
        raise ValueError(f"unknown protocol {args.protocol!r}")
    k = _infer_k(args)
    n = args.n or k
    rngs = _streams(args.seed, ["message", "fa", "fb", "sa", "sb", "s", "sequence"])
    config: dict = {
        "command": "run",
        "protocol": args.protocol,
        "k": k,
        "n": n,
        "seed": args.seed,
        "digest": bool(args.digest),
        "check_policy": args.check_policy,
    }

    if args.sequence:
        if args.protocol != "basic":
            raise ValueError("--sequence applies to the basic protocol")
        if not args.key_policy:
            raise ValueError("--sequence needs an explicit --key-policy (fresh or reused)")
        seq_rng = rngs["sequence"]
        count = args.sequence
        messages = [_random_amplitudes(k, seq_rng) for _ in range(count)]
        if args.key_policy == "reused":
            fa = serialize(random_function(k, n, seq_rng))
            fb = serialize(random_function(k, n, seq_rng))
            fa_list, fb_list = [fa] * count, [fb] * count
        else:
            fa_list = [serialize(random_function(k, n, seq_rng)) for _ in range(count)]
            fb_list = [serialize(random_function(k, n, seq_rng)) for _ in range(count)]
        config["sequence"] = {
            "key_policy": args.key_policy,
            "messages": messages,
            "fa_list": fa_list,
            "fb_list": fb_list,
        }
        return config

    config["message"] = _resolve_message(args, k, rngs["message"])

    if args.protocol in ("basic", "classical", "authenticated", "alt-20"):
        fa = _resolve_function(args.fa, args.fa_random, k, n, rngs["fa"], "fa")
        fb = _resolve_function(args.fb, args.fb_random, k, n, rngs["fb"], "fb")
        if fa is None or fb is None:
            raise ValueError("this protocol needs --fa and --fb (or the -random variants)")
        config["fa"], config["fb"] = fa, fb
    if args.protocol == "authenticated":
        sa = _resolve_function(args.sa, args.sa_random, k, n, rngs["sa"], "sa")
        sb = _resolve_function(args.sb, args.sb_random, k, n, rngs["sb"], "sb")
        if sa is None or sb is None:
            raise ValueError("authenticated runs need --sa and --sb (or the -random variants)")
        while args.sb_random and deserialize(sb).table == deserialize(sa).table:
            sb = serialize(random_function(k, n, rngs["sb"]))
        config["sa"], config["sb"] = sa, sb
    if args.protocol in ("alt-19", "alt-keystring"):
        def bits_arg(value, name):
            if value is None:
                raise ValueError(f"{args.protocol} needs --{name} as a {k}-bit string")
            if len(value) != k or set(value) - {"0", "1"}:
                raise ValueError(f"--{name} must be a {k}-bit string, got {value!r}")
            return value

        if args.protocol == "alt-19":
            config["sa"], config["sb"] = bits_arg(args.sa, "sa"), bits_arg(args.sb, "sb")
        else:
            config["s"] = bits_arg(args.s, "s")
    if args.protocol in ("alt-21", "alt-22"):
        if not args.s:
            raise ValueError(f"{args.protocol} needs --s as a function table")
        f = parse_function(args.s)
        config["s"] = serialize(f)
    return config


def execute_run(config: dict):
    """Run from a resolved config; returns a list of transcripts."""
    protocol = config["protocol"]
    policy = config.get("check_policy", "abort")
    rng_seed = config["seed"] if policy == "measure" else None
    if "sequence" in config:
        seq = config["sequence"]
        out = []
        for msg, fa, fb in zip(seq["messages"], seq["fa_list"], seq["fb_list"]):
            amps = _message_array({"amplitudes": msg})
            out.append(run_basic_protocol(amps, deserialize(fa), deserialize(fb)))
        return out
    if protocol == "classical":
        t = run_classical_protocol(
            config["message"]["bits"], deserialize(config["fa"]), deserialize(config["fb"]),
            check_policy=policy, rng_seed=rng_seed,
        )
    elif protocol == "basic":
        t = run_basic_protocol(
            _message_array(config["message"]), deserialize(config["fa"]), deserialize(config["fb"]),
            check_policy=policy, rng_seed=rng_seed,
        )
    elif protocol == "authenticated":
        t = run_authenticated_protocol(
            _message_array(config["message"]),
            PartySecrets(deserialize(config["fa"]), deserialize(config["sa"])),
            PartySecrets(deserialize(config["fb"]), deserialize(config["sb"])),
            check_policy=policy, rng_seed=rng_seed,
        )
    elif protocol in ALT_SCHEMES:
        kwargs = {}
        if protocol == "alt-19":
            kwargs = {"sa": config["sa"], "sb": config["sb"]}
        elif protocol == "alt-20":
            kwargs = {"fa": deserialize(config["fa"]), "fb": deserialize(config["fb"])}
        elif protocol == "alt-keystring":
            kwargs = {"s": config["s"]}
        else:
            kwargs = {"s": deserialize(config["s"])}
        t = run_alt_scheme(
            protocol, _message_array(config["message"]),
            check_policy=policy, rng_seed=rng_seed, **kwargs,
        )
    else:
        raise ValueError(f"unknown protocol {protocol!r}")
    return [t]


def _reparse(config: dict) -> dict:
    """Round-trip through canonical JSON so runs consume exactly the values
    that get embedded in the output file."""
    return json.loads(canonical_json(config))


def _write_output(path: str, payload: dict):
    text = canonical_json(payload)
    with open(path, "w") as fh:
        fh.write(text + "\n")


def _summarize_transcript(t, print_fn):
    for p in t.passes:
        if p.state.layout.total_width <= _SUMMARY_WIDTH_LIMIT:
            desc = format_state(p.state)
        else:
            desc = "snapshot digest " + state_digest(p.state)[:16]
        print_fn(f"pass {p.index} {p.label} {p.direction}: {desc}")
    for c in t.checks:
        verdict = "accepted" if c.accepted else "REJECTED"
        print_fn(f"check {c.label}: p={c.zero_probability:.12f} {verdict}")
    if t.aborted_at:
        print_fn(f"aborted at: {t.aborted_at}")
    if t.weakness:
        print_fn(f"weakness: {t.weakness}")
    if t.delivered_fidelity is not None:
        print_fn(f"fidelity: {t.delivered_fidelity:.9f}")
    if t.outcome_message is not None:
        print_fn(f"recovered: {t.outcome_message}")


def cmd_run(args) -> int:
    config = _reparse(_build_run_config(args))
    transcripts = execute_run(config)
    if args.out:
        digest = config.get("digest", False)
        payload = {
            "version": __version__,
            "config": config,
            "transcripts": [t.to_dict(digest=digest) for t in transcripts],
        }
        _write_output(args.out, payload)
    print(f"protocol: {config['protocol']}")
    print(f"k: {config['k']}  n: {config['n']}  backend: {_kernels.backend_name()}")
    failed = False
    for i, t in enumerate(transcripts):
        if len(transcripts) > 1:
            print(f"--- run {i}")
        _summarize_transcript(t, print)
        failed = failed or not t.completed
    return 2 if failed else 0


def _build_attack_config(args) -> dict:
    if args.exact and args.trials:
        raise ValueError("pass either --exact or --trials, not both")
    k = _infer_k(args)
    n = args.n or k
    rngs = _streams(args.seed, ["message", "fa", "fb", "sa", "sb", "fe", "fe2"])
    config: dict = {
        "command": "attack",
        "protocol": args.protocol,
        "strategy": args.strategy,
        "k": k,
        "n": n,
        "seed": args.seed,
        "mode": "monte-carlo" if args.trials else "exact",
    }
    if args.trials:
        config["trials"] = args.trials
    if args.protocol == "classical" or (
        args.strategy == "full-mitm" and args.protocol in ("basic", "classical")
    ):
        bits = args.message or "0" * k
        config["message"] = {"bits": bits}
    else:
        config["message"] = _resolve_message(args, k, rngs["message"])
    if args.protocol in ("basic", "classical", "authenticated", "alt-20"):
        fa = _resolve_function(args.fa, args.fa_random, k, n, rngs["fa"], "fa")
        fb = _resolve_function(args.fb, args.fb_random, k, n, rngs["fb"], "fb")
        config["fa"] = fa or serialize(random_function(k, n, rngs["fa"]))
        config["fb"] = fb or serialize(random_function(k, n, rngs["fb"]))
    if args.protocol == "authenticated":
        sa = _resolve_function(args.sa, args.sa_random, k, n, rngs["sa"], "sa")
        sb = _resolve_function(args.sb, args.sb_random, k, n, rngs["sb"], "sb")
        config["sa"] = sa or serialize(random_function(k, n, rngs["sa"]))
        config["sb"] = sb or serialize(random_function(k, n, rngs["sb"]))
        while deserialize(config["sb"]).table == deserialize(config["sa"]).table:
            config["sb"] = serialize(random_function(k, n, rngs["sb"]))
    if args.protocol in ("alt-19", "alt-keystring"):
        if args.protocol == "alt-19":
            if not args.sa or not args.sb:
                raise ValueError("alt-19 needs --sa and --sb bit strings")
            config["sa_bits"], config["sb_bits"] = args.sa, args.sb
        else:
            if not args.s:
                raise ValueError("alt-keystring needs --s bits")
            config["s_bits"] = args.s
    if args.protocol in ("alt-21", "alt-22"):
        if not args.s:
            raise ValueError(f"{args.protocol} needs --s as a function table")
        config["s"] = serialize(parse_function(args.s))
    if args.strategy == "substitute-oracle":
        fe = _resolve_function(args.fe, args.fe_random, k, n, rngs["fe"], "fe")
        if fe is None:
            raise ValueError("substitute-oracle needs --fe (or --fe-random)")
        config["fe"] = fe
        config["target_register"] = args.register or "II"
        config["pass"] = args.pass_index or 2
        config["keep_original"] = not args.discard_original
    elif args.strategy == "bitflip":
        if not args.register or args.mask is None:
            raise ValueError("bitflip needs --register and --mask")
        config["register"] = args.register
        config["mask"] = args.mask
        config["pass"] = args.pass_index or 3
    elif args.strategy == "intercept-measure-resend":
        config["registers"] = (args.register or "I").split(",")
        config["pass"] = args.pass_index or 1
    elif args.strategy == "full-mitm":
        if args.fe:
            config["fe"] = serialize(parse_function(args.fe))
        if args.fe2:
            config["fe2"] = serialize(parse_function(args.fe2))
        config["eve_knows_keys"] = bool(args.eve_knows_keys)
    return config


def execute_attack(config: dict):
    protocol = config["protocol"]
    k, n = config["k"], config["n"]
    mode = config["mode"]
    trials = config.get("trials", 0)
    seed = config["seed"]
    kind = config["strategy"]
    fa = deserialize(config["fa"]) if "fa" in config else None
    fb = deserialize(config["fb"]) if "fb" in config else None
    sa = deserialize(config["sa"]) if "sa" in config else None
    sb = deserialize(config["sb"]) if "sb" in config else None

    if kind == "full-mitm":
        return mitm_demo(
            config["message"].get("bits") if "bits" in config.get("message", {}) else None,
            seed,
            protocol=protocol,
            message=None if "bits" in config.get("message", {}) else _message_array(config["message"]),
            fa=fa, fb=fb, sa=sa, sb=sb,
            fe=deserialize(config["fe"]) if "fe" in config else None,
            fe2=deserialize(config["fe2"]) if "fe2" in config else None,
            k=k, n=n,
            eve_knows_keys=config.get("eve_knows_keys", False),
            mode=mode, trials=trials or 10_000,
        )
    if kind == "substitute-oracle":
        strategy = EveStrategy.substitute_oracle(
            deserialize(config["fe"]),
            pass_index=config["pass"],
            target_register=config["target_register"],
            keep_original=config["keep_original"],
        )
    elif kind == "bitflip":
        strategy = EveStrategy.bitflip(config["register"], int(config["mask"], 2), config["pass"])
    elif kind == "intercept-measure-resend":
        strategy = EveStrategy.intercept_measure_resend(config["registers"], config["pass"])
    elif kind == "passive-inspect":
        strategy = EveStrategy.passive()
    else:
        raise ValueError(f"unknown strategy {kind!r}")

    kwargs = {"mode": mode, "seed": seed}
    if trials:
        kwargs["trials"] = trials
    if protocol == "classical":
        kwargs["m_prime"] = config["message"]["bits"]
    else:
        kwargs["message"] = _message_array(config["message"])
    if protocol in ALT_SCHEMES:
        kwargs["sa_bits"] = config.get("sa_bits")
        kwargs["sb_bits"] = config.get("sb_bits")
        kwargs["s"] = config.get("s_bits") or (
            deserialize(config["s"]) if "s" in config else None
        )
    return attack(protocol, strategy, fa=fa, fb=fb, sa=sa, sb=sb, **kwargs)


def cmd_attack(args) -> int:
    config = _reparse(_build_attack_config(args))
    report = execute_attack(config)
    payload = {"version": __version__, "config": config, "report": report.to_dict()}
    if args.out:
        _write_output(args.out, payload)
    print(f"protocol: {config['protocol']}")
    print(f"strategy: {config['strategy']}  mode: {config['mode']}")
    for label, value in (
        ("alice_accept_prob", report.alice_accept_prob),
        ("bob_accept_prob", report.bob_accept_prob),
        ("delivered_fidelity", report.delivered_fidelity),
    ):
        print(f"{label}: {'n/a' if value is None else format(value, '.9f')}")
    if report.eve_recovered_message is not None:
        print(f"eve_recovered: {report.eve_recovered_message}")
    return 0


def _build_analyze_config(args) -> dict:
    k = args.k or (len(args.known_message) if args.known_message else None)
    if not k:
        raise ValueError("analyze needs --k (or --known-message)")
    n = args.n or k
    config = {
        "command": "analyze",
        "protocol": args.protocol,
        "k": k,
        "n": n,
        "pass": args.pass_index or 1,
        "seed": args.seed,
    }
    if args.protocol == "alt-keystring":
        if not args.known_message:
            raise ValueError("alt-keystring analysis needs --known-message")
        config["known_message"] = args.known_message
    else:
        if not args.messages:
            raise ValueError("pass --messages as comma-separated bit strings")
        messages = args.messages.split(",")
        for m in messages:
            if len(m) != k or set(m) - {"0", "1"}:
                raise ValueError(f"message {m!r} is not a {k}-bit string")
        config["messages"] = messages
    if args.sample:
        config["sample"] = args.sample
    return config


def execute_analyze(config: dict):
    protocol = config["protocol"]
    k, n = config["k"], config["n"]
    if protocol == "alt-keystring":
        keys = [format(v, f"0{k}b") for v in range(1 << k)]
        views = []
        pairs = []
        for i, s1 in enumerate(keys):
            for s2 in keys[i + 1 :]:
                view = eve_view(
                    "alt-keystring", 1, (s1, s2), k=k, n=n,
                    known_message=config["known_message"],
                )
                pairs.append({"keys": [s1, s2], "trace_distance": view.trace_dist})
                views.append(view)
        min_td = min(p["trace_distance"] for p in pairs)
        return {"pairs": pairs, "min_trace_distance": min_td, "views": [v.to_dict() for v in views]}
    messages = config["messages"]
    if protocol in ("basic", "authenticated"):
        msgs = [_message_array({"bits": m}) for m in messages]
    else:
        msgs = messages
    pair = msgs if len(msgs) == 2 else msgs[0]
    view = eve_view(
        protocol, config["pass"], pair, k=k, n=n,
        sample=(config["sample"], config["seed"]) if "sample" in config else None,
    )
    return {"view": view.to_dict(), "trace_distance": view.trace_dist}


def cmd_analyze(args) -> int:
    config = _reparse(_build_analyze_config(args))
    result = execute_analyze(config)
    payload = {"version": __version__, "config": config, "analysis": result}
    if args.out:
        _write_output(args.out, payload)
    print(f"protocol: {config['protocol']}  pass: {config['pass']}")
    if "min_trace_distance" in result:
        for p in result["pairs"]:
            print(f"keys {p['keys'][0]} vs {p['keys'][1]}: trace_distance {p['trace_distance']:.9f}")
        print(f"trace_distance: {result['min_trace_distance']:.9f}")
    else:
        td = result["trace_distance"]
        print(f"trace_distance: {'n/a' if td is None else format(td, '.9f')}")
    return 0


def cmd_verify(args) -> int:
    with open(args.transcript) as fh:
        stored = json.load(fh)
    config = stored.get("config")
    if not config:
        print("file has no embedded config", file=sys.stderr)
        return 1
    command = config.get("command", "run")
    if command == "run":
        transcripts = execute_run(config)
        digest = config.get("digest", False)
        fresh = [t.to_dict(digest=digest) for t in transcripts]
        old = stored.get("transcripts", [])
        if len(old) != len(fresh):
            print(f"FAIL: transcript count differs ({len(old)} vs {len(fresh)})")
            return 2
        for run_idx, (a, b) in enumerate(zip(old, fresh)):
            for i, (pa, pb) in enumerate(zip(a.get("passes", []), b.get("passes", []))):
                if canonical_json(pa) != canonical_json(pb):
                    print(f"FAIL: first divergent step: run {run_idx} pass {i + 1} ({pb['label']})")
                    return 2
            if canonical_json(a) != canonical_json(b):
                print(f"FAIL: run {run_idx} diverges outside pass snapshots")
                return 2
    elif command == "attack":
        fresh = execute_attack(config).to_dict()
        if canonical_json(stored.get("report")) != canonical_json(fresh):
            print("FAIL: attack report diverges")
            return 2
    elif command == "analyze":
        fresh = execute_analyze(config)
        if canonical_json(stored.get("analysis")) != canonical_json(fresh):
            print("FAIL: analysis diverges")
            return 2
    else:
        print(f"unknown command {command!r} in config", file=sys.stderr)
        return 1
    print("PASS: file matches re-execution")
    return 0


def _add_common_inputs(p):
    p.add_argument("--k", type=int, help="message width in bits")
    p.add_argument("--n", type=int, help="tag width in bits (defaults to k)")
    p.add_argument("--message", help="bit string message")
    p.add_argument("--message-random", action="store_true", help="draw random amplitudes")
    p.add_argument("--message-file", help="JSON [[re,im],...] amplitude file")
    p.add_argument("--fa", help="Alice's function (hex table or 0,1,x,xbar)")
    p.add_argument("--fb", help="Bob's function")
    p.add_argument("--fa-random", action="store_true")
    p.add_argument("--fb-random", action="store_true")
    p.add_argument("--sa", help="Alice's id key (function table, or bits for alt-19)")
    p.add_argument("--sb", help="Bob's id key")
    p.add_argument("--sa-random", action="store_true")
    p.add_argument("--sb-random", action="store_true")
    p.add_argument("--s", help="shared key for alt schemes (bits or function table)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the JSON output file here")


def build_parser() -> _Parser:
    parser = _Parser(prog="qnokey", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qnokey {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_run = sub.add_parser("run", help="execute a protocol and record a transcript")
    p_run.add_argument("--protocol", required=True, choices=PROTOCOLS)
    _add_common_inputs(p_run)
    p_run.add_argument("--digest", action="store_true", help="store snapshot digests, not amplitudes")
    p_run.add_argument("--sequence", type=int, help="number of random messages to send")
    p_run.add_argument("--key-policy", choices=("fresh", "reused"))
    p_run.add_argument("--check-policy", choices=("abort", "measure"), default="abort")
    p_run.set_defaults(fn=cmd_run)

    p_att = sub.add_parser("attack", help="run an adversary strategy and report metrics")
    p_att.add_argument("--protocol", required=True, choices=PROTOCOLS)
    p_att.add_argument(
        "--strategy", required=True,
        choices=("passive-inspect", "intercept-measure-resend", "substitute-oracle",
                 "bitflip", "full-mitm"),
    )
    _add_common_inputs(p_att)
    p_att.add_argument("--fe", help="Eve's function")
    p_att.add_argument("--fe-random", action="store_true")
    p_att.add_argument("--fe2", help="Eve's second session function (full-mitm)")
    p_att.add_argument("--register", help="target register(s)")
    p_att.add_argument("--mask", help="bit mask for bitflip")
    p_att.add_argument("--pass", dest="pass_index", type=int, help="pass to intercept")
    p_att.add_argument("--discard-original", action="store_true",
                       help="substitute-oracle: try to detach the original register")
    p_att.add_argument("--eve-knows-keys", action="store_true")
    p_att.add_argument("--exact", action="store_true", help="exact mode (default)")
    p_att.add_argument("--trials", type=int, help="Monte-Carlo trials")
    p_att.set_defaults(fn=cmd_attack)

    p_an = sub.add_parser("analyze", help="compute Eve's averaged view of a pass")
    p_an.add_argument("--protocol", required=True,
                      choices=("basic", "classical", "authenticated", "alt-keystring"))
    p_an.add_argument("--pass", dest="pass_index", type=int, default=1)
    p_an.add_argument("--k", type=int)
    p_an.add_argument("--n", type=int)
    p_an.add_argument("--messages", help="comma-separated bit strings to compare")
    p_an.add_argument("--known-message", help="alt-keystring: the message Eve knows")
    p_an.add_argument("--exact", action="store_true", help="exact mode (default)")
    p_an.add_argument("--sample", type=int, help="sample this many secret tuples")
    p_an.add_argument("--seed", type=int, default=0)
    p_an.add_argument("--out")
    p_an.set_defaults(fn=cmd_analyze)

    p_ver = sub.add_parser("verify", help="re-execute an output file and compare")
    p_ver.add_argument("transcript")
    p_ver.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.fn(args)
    except (ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = 1
    except Exception as exc:  # invariant violations and bugs
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        code = 3
    if argv is None:
        sys.exit(code)
    return code


if __name__ == "__main__":
    main()
