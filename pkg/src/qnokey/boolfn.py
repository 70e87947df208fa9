"""k-input, n-output Boolean functions as explicit truth tables.

These are the protocol keys: a table of 2^k entries, each an n-bit value.
Input/output bit order follows the package convention (first bit most
significant).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import MAX_ARITY


@dataclass(frozen=True)
class BooleanFunction:
    arity: int
    width: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        if not 1 <= self.arity <= MAX_ARITY:
            raise ValueError(f"arity must be in [1, {MAX_ARITY}], got {self.arity}")
        if not 1 <= self.width <= MAX_ARITY:
            raise ValueError(f"width must be in [1, {MAX_ARITY}], got {self.width}")
        if len(self.table) != 1 << self.arity:
            raise ValueError(f"table must have {1 << self.arity} entries, got {len(self.table)}")
        limit = 1 << self.width
        for i, v in enumerate(self.table):
            if not 0 <= v < limit:
                raise ValueError(f"table entry {i} is {v}, out of range for width {self.width}")

    def evaluate(self, m: int) -> int:
        if not 0 <= m < len(self.table):
            raise ValueError(f"input {m} out of range for arity {self.arity}")
        return self.table[m]

    def evaluate_bits(self, m: str) -> str:
        if len(m) != self.arity or set(m) - {"0", "1"}:
            raise ValueError(f"expected a {self.arity}-bit string, got {m!r}")
        return format(self.table[int(m, 2)], f"0{self.width}b")

    def table_array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.int64)


@dataclass(frozen=True)
class KeyPair:
    """Session function plus preshared identification key."""

    f: BooleanFunction
    s: BooleanFunction

    def __post_init__(self):
        if (self.f.arity, self.f.width) != (self.s.arity, self.s.width):
            raise ValueError(
                f"key pair shape mismatch: f is {self.f.arity}->{self.f.width}, "
                f"s is {self.s.arity}->{self.s.width}"
            )


def xor(f: BooleanFunction, g: BooleanFunction) -> BooleanFunction:
    """Pointwise XOR of two functions of identical shape."""
    if (f.arity, f.width) != (g.arity, g.width):
        raise ValueError(
            f"shape mismatch: {f.arity}->{f.width} vs {g.arity}->{g.width}"
        )
    return BooleanFunction(f.arity, f.width, tuple(a ^ b for a, b in zip(f.table, g.table)))


def constant(k: int, n: int, value: int = 0) -> BooleanFunction:
    return BooleanFunction(k, n, (value,) * (1 << k))


def identity(k: int) -> BooleanFunction:
    return BooleanFunction(k, k, tuple(range(1 << k)))


def random_function(k: int, n: int | None = None, rng_seed=None) -> BooleanFunction:
    """Uniform over all 2^(n*2^k) functions; deterministic given the seed.

    n defaults to k.
    """
    n = k if n is None else n
    if not 1 <= k <= MAX_ARITY or not 1 <= n <= MAX_ARITY:
        raise ValueError(f"k and n must be in [1, {MAX_ARITY}], got k={k}, n={n}")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    table = rng.integers(0, 1 << n, size=1 << k)
    return BooleanFunction(k, n, tuple(int(v) for v in table))


def is_permutation(f: BooleanFunction) -> bool:
    """True iff the table is a bijection; requires arity == width."""
    if f.arity != f.width:
        raise ValueError(
            f"permutation check applies only to square functions, got {f.arity}->{f.width}"
        )
    return sorted(f.table) == list(range(1 << f.arity))


def inverse_permutation(f: BooleanFunction) -> BooleanFunction:
    if not is_permutation(f):
        raise ValueError("function is not a bijection")
    inv = [0] * len(f.table)
    for m, v in enumerate(f.table):
        inv[v] = m
    return BooleanFunction(f.arity, f.width, tuple(inv))


def serialize(f: BooleanFunction) -> str:
    """"k:n:" followed by the 2^k table entries as fixed-width hex, comma-separated."""
    digits = (f.width + 3) // 4
    body = ",".join(format(v, f"0{digits}x") for v in f.table)
    return f"{f.arity}:{f.width}:{body}"


def deserialize(text: str) -> BooleanFunction:
    parts = text.strip().split(":")
    if len(parts) != 3:
        raise ValueError(f"malformed function text {text!r}: expected 'k:n:entries'")
    try:
        k, n = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ValueError(f"malformed function text {text!r}: bad arity/width") from exc
    entries = parts[2].split(",")
    if len(entries) != 1 << k:
        raise ValueError(
            f"malformed function text {text!r}: expected {1 << k} entries, got {len(entries)}"
        )
    digits = (n + 3) // 4
    table = []
    for e in entries:
        if len(e) != digits:
            raise ValueError(f"malformed entry {e!r}: expected {digits} hex digits")
        try:
            v = int(e, 16)
        except ValueError as exc:
            raise ValueError(f"malformed entry {e!r}: not hexadecimal") from exc
        if v >= 1 << n:
            raise ValueError(f"entry {e!r} out of range for width {n}")
        table.append(v)
    return BooleanFunction(k, n, tuple(table))


# Single-bit shorthands mirroring the four k=n=1 functions.
SHORTHANDS = {
    "0": BooleanFunction(1, 1, (0, 0)),
    "1": BooleanFunction(1, 1, (1, 1)),
    "x": BooleanFunction(1, 1, (0, 1)),
    "xbar": BooleanFunction(1, 1, (1, 0)),
}


def parse_function(text: str) -> BooleanFunction:
    """Accept a shorthand name (k=n=1) or the hex truth-table format."""
    if text in SHORTHANDS:
        return SHORTHANDS[text]
    return deserialize(text)


def all_functions(k: int, n: int):
    """Iterate every function of the given shape (2^(n*2^k) of them)."""
    from itertools import product

    for table in product(range(1 << n), repeat=1 << k):
        yield BooleanFunction(k, n, table)
