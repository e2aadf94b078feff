"""Almost-strongly-universal hash family over GF(q), with exhaustive
certification of both ASU conditions.

The family is the classic tree composition: s-1 halving levels, each mapping
adjacent pairs (u, v) -> u + c_i * v with a per-level key c_i, followed by a
strongly-universal output stage x -> a*x + b.  Messages are GF(q)-tuples of
width 2^(s-1), keys are s+1 field elements (so |K| = q^(s+1)), tags live in
GF(q), and the certified guarantee is epsilon <= s/q.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .gf import FieldParams
from .typicality import BudgetExceededError


@dataclass(frozen=True)
class StinsonFamily:
    """Keyed hash family GF(q)^(2^(s-1)) -> GF(q) with epsilon <= s/q."""

    field: FieldParams
    s: int

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("s must be >= 1")

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def levels(self) -> int:
        return self.s - 1

    @property
    def message_width(self) -> int:
        return 2 ** (self.s - 1)

    @property
    def message_space_size(self) -> int:
        return self.q**self.message_width

    @property
    def key_space_size(self) -> int:
        return self.q ** (self.s + 1)

    @property
    def tag_space_size(self) -> int:
        return self.q

    @property
    def epsilon_bound(self) -> float:
        return self.s / self.q

    def key_from_index(self, index: int) -> "HashKey":
        """Mixed-radix decoding of [0, q^(s+1)) into (levels, a, b)."""
        if not (0 <= index < self.key_space_size):
            raise ValueError("key index out of range")
        digits = []
        for _ in range(self.s + 1):
            digits.append(index % self.q)
            index //= self.q
        final = (digits[0], digits[1])
        return HashKey(tuple(reversed(digits[2:])), final)

    def iter_keys(self):
        for i in range(self.key_space_size):
            yield self.key_from_index(i)

    def random_key(self, rng: np.random.Generator) -> "HashKey":
        return self.key_from_index(int(rng.integers(self.key_space_size)))

    def iter_messages(self):
        for msg in itertools.product(range(self.q), repeat=self.message_width):
            yield msg

    def random_message(self, rng: np.random.Generator) -> tuple[int, ...]:
        return tuple(int(v) for v in rng.integers(0, self.q, size=self.message_width))


@dataclass(frozen=True)
class HashKey:
    """s-1 level keys plus the output-stage pair (a, b)."""

    levels: tuple[int, ...]
    final: tuple[int, int]


def pad_message(msg: tuple[int, ...], fam: StinsonFamily) -> tuple[int, ...]:
    """Injective padding of short messages: append a 1 then 0s up to width.

    Only messages shorter than the width are padded; the padded space and the
    raw full-width space must not be mixed within one protocol instance.
    """
    width = fam.message_width
    if len(msg) > width:
        raise ValueError(f"message of length {len(msg)} exceeds width {width}")
    if len(msg) == width:
        return msg
    return msg + (1 % fam.q,) + (0,) * (width - len(msg) - 1)


def hash_tag(fam: StinsonFamily, key: HashKey, msg: tuple[int, ...]) -> int:
    """Evaluate the family member h_key on a full-width message tuple."""
    if len(key.levels) != fam.levels:
        raise ValueError("key level count does not match family")
    if len(msg) != fam.message_width:
        raise ValueError(
            f"message length {len(msg)} != width {fam.message_width}; pad first"
        )
    f = fam.field
    vec = list(msg)
    for c in key.levels:
        vec = [f.add(vec[2 * i], f.mul(c, vec[2 * i + 1])) for i in range(len(vec) // 2)]
    a, b = key.final
    return f.add(f.mul(a, vec[0]), b)


@dataclass(frozen=True)
class AsuCertificate:
    uniformity_exact: bool
    epsilon_measured: float
    max_pair_count: int
    key_count: int


def certify_asu(fam: StinsonFamily, budget: int = 10**8) -> AsuCertificate:
    """Exhaustively count preimages over all keys.

    First ASU condition: |{h : h(x) = t}| must equal |H|/q exactly for every
    (x, t).  Second: the maximum of |{h : h(x1)=t1, h(x2)=t2}| * q / |H| over
    distinct x1 != x2 is reported as epsilon_measured.
    """
    cost = fam.key_space_size * fam.message_space_size
    if cost > budget:
        raise BudgetExceededError(f"certification cost {cost} exceeds budget {budget}")
    keys = list(fam.iter_keys())
    messages = list(fam.iter_messages())
    q = fam.q
    table = np.empty((len(messages), len(keys)), dtype=np.int64)
    for mi, msg in enumerate(messages):
        for ki, key in enumerate(keys):
            table[mi, ki] = hash_tag(fam, key, msg)

    expected = len(keys) // q
    uniform = all(
        int((table[mi] == t).sum()) == expected
        for mi in range(len(messages))
        for t in range(q)
    )

    max_pair = 0
    for m1 in range(len(messages)):
        for m2 in range(len(messages)):
            if m1 == m2:
                continue
            # joint count of (t1, t2) over keys via a q*q histogram
            combined = table[m1] * q + table[m2]
            counts = np.bincount(combined, minlength=q * q)
            max_pair = max(max_pair, int(counts.max()))
    epsilon = max_pair * q / len(keys)
    return AsuCertificate(uniform, epsilon, max_pair, len(keys))


def check_pair_bound(
    fam: StinsonFamily, m1: tuple[int, ...], m2: tuple[int, ...]
) -> float:
    """Max entry of the exact joint tag distribution of (h(m1), h(m2)) under a
    uniform key. For m1 != m2 this is at most epsilon/q."""
    q = fam.q
    joint = np.zeros((q, q))
    for key in fam.iter_keys():
        joint[hash_tag(fam, key, m1), hash_tag(fam, key, m2)] += 1
    joint /= fam.key_space_size
    return float(joint.max())


def worst_collision_pair(
    fam: StinsonFamily, budget: int = 10**7
) -> tuple[tuple[int, ...], tuple[int, ...], float]:
    """Distinct message pair maximizing collision probability over keys,
    with that probability. Exhaustive; tiny parameters only."""
    cost = fam.key_space_size * fam.message_space_size
    if cost > budget:
        raise BudgetExceededError(f"search cost {cost} exceeds budget {budget}")
    keys = list(fam.iter_keys())
    messages = list(fam.iter_messages())
    tags = [
        np.array([hash_tag(fam, key, msg) for key in keys], dtype=np.int64)
        for msg in messages
    ]
    best = (messages[0], messages[1], -1.0)
    for i in range(len(messages)):
        for j in range(i + 1, len(messages)):
            p = float((tags[i] == tags[j]).mean())
            if p > best[2]:
                best = (messages[i], messages[j], p)
    return best
