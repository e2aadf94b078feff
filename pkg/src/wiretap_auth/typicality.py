"""Method-of-types machinery: sequence types, type-class enumeration and
counting, epsilon-typical and conditionally epsilon-typical sets, plus exact
checkers for the classical counting bounds.

Types are stored as integer counts, never floating ratios, so multinomial
arithmetic and the counting-bound comparisons are exact (Fraction-based) and
typicality tests behave correctly at eps = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .infotheory import Alphabet, Channel, Distribution, Sequence

DEFAULT_ENUMERATION_BUDGET = 10**6

# Absolute slack on typicality comparisons.  Count deviations move on a grid
# of spacing 1/n, so this only resolves exact boundary ties (e.g. a deviation
# of 0.6 against a bound of 8*0.3/4) that float representation would
# otherwise break; it can never admit an extra count.
TYPICALITY_SLACK = 1e-9


class BudgetExceededError(RuntimeError):
    """An exact enumeration would exceed the configured budget."""


@dataclass(frozen=True)
class TypeP:
    """Empirical symbol-count vector of a length-n sequence."""

    alphabet: Alphabet
    n: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if len(self.counts) != self.alphabet.size:
            raise ValueError("one count per alphabet symbol required")
        if any(c < 0 for c in self.counts):
            raise ValueError("negative symbol count")
        if sum(self.counts) != self.n:
            raise ValueError(f"counts sum to {sum(self.counts)}, not n={self.n}")

    @classmethod
    def from_counts(cls, counts) -> "TypeP":
        counts = tuple(int(c) for c in counts)
        return cls(Alphabet(len(counts)), sum(counts), counts)

    def distribution(self) -> Distribution:
        return Distribution(self.alphabet, np.array(self.counts) / self.n)

    def is_strictly_positive(self) -> bool:
        return all(c > 0 for c in self.counts)


def type_of(x: Sequence) -> TypeP:
    """Exact symbol counts of a sequence."""
    counts = [0] * x.alphabet.size
    for s in x.symbols:
        counts[s] += 1
    return TypeP(x.alphabet, x.n, tuple(counts))


def type_class_size(p: TypeP) -> int:
    """Multinomial coefficient n! / prod(counts_a!)."""
    size = math.factorial(p.n)
    for c in p.counts:
        size //= math.factorial(c)
    return size


def enumerate_type_class(
    p: TypeP, budget: int = DEFAULT_ENUMERATION_BUDGET
) -> Iterator[Sequence]:
    """Yield every member of the type class exactly once, lexicographically."""
    if type_class_size(p) > budget:
        raise BudgetExceededError(
            f"type class of size {type_class_size(p)} exceeds budget {budget}"
        )
    alphabet = p.alphabet
    remaining = list(p.counts)
    prefix: list[int] = []

    def rec() -> Iterator[Sequence]:
        if len(prefix) == p.n:
            yield Sequence(alphabet, tuple(prefix))
            return
        for a in range(alphabet.size):
            if remaining[a] > 0:
                remaining[a] -= 1
                prefix.append(a)
                yield from rec()
                prefix.pop()
                remaining[a] += 1

    return rec()


def all_types(alphabet_size: int, n: int) -> Iterator[TypeP]:
    """All types of length-n sequences over an alphabet, lexicographically."""

    def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
        if parts == 1:
            yield (total,)
            return
        for first in range(total + 1):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    for counts in compositions(n, alphabet_size):
        yield TypeP(Alphabet(alphabet_size), n, counts)


def is_eps_typical(x: Sequence, px: Distribution, eps: float) -> bool:
    """Per-symbol deviation |P_x(a) - px(a)| <= eps/|X| for all a, and
    no symbol of zero px-probability may occur in x."""
    if x.alphabet != px.alphabet:
        raise ValueError("sequence and distribution alphabets differ")
    counts = type_of(x).counts
    k = px.alphabet.size
    bound = eps / k + TYPICALITY_SLACK
    for a in range(k):
        frac = counts[a] / x.n
        if px.mass[a] == 0.0 and counts[a] > 0:
            return False
        if abs(frac - px.mass[a]) > bound:
            return False
    return True


def is_cond_eps_typical(y: Sequence, x: Sequence, ch: Channel, eps: float) -> bool:
    """Joint-count deviation |P_xy(a,b) - P_x(a) W(b|a)| <= eps/(|X||Y|)
    for all (a, b), with zero joint counts wherever P_x(a) W(b|a) = 0.

    The zero-support reference takes the type of x as the input law, which is
    the reading used everywhere x ranges over a fixed type class.
    """
    if y.n != x.n:
        raise ValueError(f"length mismatch: |y|={y.n}, |x|={x.n}")
    if x.alphabet != ch.input or y.alphabet != ch.output:
        raise ValueError("alphabets do not match channel")
    n = x.n
    kx, ky = ch.input.size, ch.output.size
    joint = np.zeros((kx, ky), dtype=np.int64)
    for a, b in zip(x.symbols, y.symbols):
        joint[a, b] += 1
    x_counts = joint.sum(axis=1)
    bound = eps / (kx * ky) + TYPICALITY_SLACK
    for a in range(kx):
        pa = x_counts[a] / n
        for b in range(ky):
            expected = pa * ch.rows[a, b]
            if expected == 0.0 and joint[a, b] > 0:
                return False
            if abs(joint[a, b] / n - expected) > bound:
                return False
    return True


def output_grid(alphabet_size: int, n: int, budget: int = DEFAULT_ENUMERATION_BUDGET) -> np.ndarray:
    """All length-n words over the alphabet as a (size^n, n) digit matrix,
    in lexicographic row order."""
    total = alphabet_size**n
    if total > budget:
        raise BudgetExceededError(f"output space of size {total} exceeds budget {budget}")
    idx = np.arange(total)
    grid = np.empty((total, n), dtype=np.int8)
    for pos in range(n - 1, -1, -1):
        grid[:, pos] = idx % alphabet_size
        idx //= alphabet_size
    return grid


def cond_typical_mask(
    x_digits: np.ndarray, grid: np.ndarray, ch: Channel, eps: float
) -> np.ndarray:
    """Vectorized conditional-typicality test of every grid row against x."""
    n = grid.shape[1]
    kx, ky = ch.input.size, ch.output.size
    bound = eps / (kx * ky) + TYPICALITY_SLACK
    mask = np.ones(grid.shape[0], dtype=bool)
    for a in range(kx):
        pos = np.flatnonzero(x_digits == a)
        cnt_a = len(pos)
        sub = grid[:, pos] if cnt_a else None
        for b in range(ky):
            n_ab = (sub == b).sum(axis=1) if cnt_a else 0
            expected = (cnt_a / n) * ch.rows[a, b]
            if expected == 0.0:
                mask &= n_ab == 0
            else:
                mask &= np.abs(n_ab / n - expected) <= bound
    return mask


def block_probs(ch: Channel, x_digits: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Memoryless block probabilities prod_i W(y_i|x_i) for every grid row."""
    return np.prod(ch.rows[x_digits[None, :], grid], axis=1)


def conditional_typical_set(
    x: Sequence, ch: Channel, eps: float, budget: int = DEFAULT_ENUMERATION_BUDGET
) -> list[Sequence]:
    """Exact conditionally eps-typical set, by filtering all |Y|^n outputs."""
    grid = output_grid(ch.output.size, x.n, budget)
    x_digits = np.fromiter(x.symbols, dtype=np.int64, count=x.n)
    mask = cond_typical_mask(x_digits, grid, ch, eps)
    out_alphabet = ch.output
    return [Sequence(out_alphabet, tuple(int(v) for v in row)) for row in grid[mask]]


@dataclass(frozen=True)
class CountingBoundsReport:
    type_counts: tuple[int, ...]
    n: int
    class_size: int
    lemma5_lhs: Fraction  # P(T_P^n) under the type's own distribution
    lemma5_rhs: Fraction  # (n+1)^{-|X|}
    lemma5_holds: bool
    lemma6_lower: Fraction  # (n+1)^{-|X|} * 2^{nH(Q)}
    lemma6_upper: Fraction  # 2^{nH(Q)}
    lemma6_holds: bool
    cond_typical_prob: float | None  # measured P(T_{[W]_eps}(x) | x) for one x


def check_counting_bounds(
    p: TypeP,
    ch: Channel | None = None,
    eps: float = 0.0,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> CountingBoundsReport:
    """Evaluate both sides of the type-probability and type-class-size bounds
    with exact rational arithmetic, and (optionally) report the conditional
    typical-set probability of one class member under a channel."""
    size = type_class_size(p)
    n, k = p.n, p.alphabet.size

    # P(T_P^n) = |T_P^n| * prod_a (c_a/n)^{c_a}, exactly.
    prob = Fraction(size)
    for c in p.counts:
        if c > 0:
            prob *= Fraction(c, n) ** c
    lemma5_rhs = Fraction(1, (n + 1) ** k)
    lemma5_holds = prob >= lemma5_rhs

    # 2^{nH(Q)} = prod_a (n/c_a)^{c_a} is rational for rational types.
    two_nh = Fraction(1)
    for c in p.counts:
        if c > 0:
            two_nh *= Fraction(n, c) ** c
    lemma6_lower = lemma5_rhs * two_nh
    lemma6_holds = lemma6_lower <= size <= two_nh

    cond_prob = None
    if ch is not None:
        x = next(iter(enumerate_type_class(p, budget)))
        grid = output_grid(ch.output.size, n, budget)
        x_digits = np.fromiter(x.symbols, dtype=np.int64, count=n)
        mask = cond_typical_mask(x_digits, grid, ch, eps)
        cond_prob = float(block_probs(ch, x_digits, grid)[mask].sum())

    return CountingBoundsReport(
        type_counts=p.counts,
        n=n,
        class_size=size,
        lemma5_lhs=prob,
        lemma5_rhs=lemma5_rhs,
        lemma5_holds=lemma5_holds,
        lemma6_lower=lemma6_lower,
        lemma6_upper=two_nh,
        lemma6_holds=lemma6_holds,
        cond_typical_prob=cond_prob,
    )
