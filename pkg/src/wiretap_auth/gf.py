"""Finite-field arithmetic for prime q and q = 2^k (k <= 16).

Prime fields use modular arithmetic; binary extension fields use carry-free
polynomial arithmetic reduced by a fixed irreducible polynomial per degree,
so tags are identical across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# One fixed irreducible polynomial per extension degree (bit i = coeff of x^i).
IRREDUCIBLE_POLYS = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011011,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class FieldParams:
    """GF(q) with elements represented as integers in [0, q)."""

    q: int
    char2_degree: int = 0  # k for q = 2^k with k >= 2, else 0

    def __post_init__(self):
        if self.q < 2:
            raise ValueError("field size must be >= 2")

    @classmethod
    def for_size(cls, q: int) -> "FieldParams":
        if _is_prime(q):
            return cls(q)
        k = q.bit_length() - 1
        if q == (1 << k) and k in IRREDUCIBLE_POLYS:
            return cls(q, char2_degree=k)
        raise ValueError(f"unsupported field size {q}: need a prime or 2^k, k <= 16")

    @property
    def is_binary(self) -> bool:
        return self.char2_degree >= 2

    def _check(self, *elems: int):
        for e in elems:
            if not (0 <= e < self.q):
                raise ValueError(f"element {e} outside GF({self.q})")

    def add(self, a: int, b: int) -> int:
        self._check(a, b)
        return a ^ b if self.is_binary else (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        self._check(a, b)
        return a ^ b if self.is_binary else (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        self._check(a, b)
        if not self.is_binary:
            return (a * b) % self.q
        poly = IRREDUCIBLE_POLYS[self.char2_degree]
        result = 0
        while b:
            if b & 1:
                result ^= a
            b >>= 1
            a <<= 1
            if a >> self.char2_degree:
                a ^= poly
        return result

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ZeroDivisionError("no inverse of 0")
        if not self.is_binary:
            return pow(a, self.q - 2, self.q)
        # a^(q-2) by square-and-multiply in GF(2^k)
        result, base, e = 1, a, self.q - 2
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def spot_check_axioms(self, rng: np.random.Generator, samples: int = 200) -> bool:
        """Associativity/distributivity on sampled triples; inverses exact
        for every element when q is small, else for sampled elements."""
        for _ in range(samples):
            a, b, c = (int(v) for v in rng.integers(0, self.q, size=3))
            if self.mul(a, self.mul(b, c)) != self.mul(self.mul(a, b), c):
                return False
            if self.add(a, self.add(b, c)) != self.add(self.add(a, b), c):
                return False
            if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)):
                return False
        elems = range(1, self.q) if self.q <= 256 else [
            int(v) for v in rng.integers(1, self.q, size=64)
        ]
        for a in elems:
            if self.mul(a, self.inv(a)) != 1:
                return False
        return True
