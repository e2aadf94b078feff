"""Finite-alphabet probability core: distributions, channels, entropies,
statistical distance, channel sampling and the Csiszar-style SD/MI bound.

All logarithms are base 2; entropies and mutual informations are in bits.
Statistical distance is the *unhalved* L1 distance, so its range is [0, 2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CONSTRUCT_TOL = 1e-12  # mass normalization tolerance at construction
DERIVED_TOL = 1e-9  # tolerance on derived identities


class AlphabetMismatchError(ValueError):
    """Operands are defined over incompatible alphabets."""


@dataclass(frozen=True)
class Alphabet:
    """Finite alphabet; symbols are the indices 0..size-1."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"alphabet size must be >= 1, got {self.size}")


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector over a finite alphabet."""

    alphabet: Alphabet
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=np.float64)
        if mass.shape != (self.alphabet.size,):
            raise ValueError(f"mass shape {mass.shape} != ({self.alphabet.size},)")
        if np.any(mass < 0):
            raise ValueError("negative probability mass")
        total = float(mass.sum())
        if abs(total - 1.0) > CONSTRUCT_TOL:
            raise ValueError(f"mass sums to {total}, not 1")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    @classmethod
    def from_probs(cls, probs) -> "Distribution":
        probs = np.asarray(probs, dtype=np.float64)
        return cls(Alphabet(len(probs)), probs)

    @classmethod
    def uniform(cls, size: int) -> "Distribution":
        return cls(Alphabet(size), np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, size: int, symbol: int) -> "Distribution":
        mass = np.zeros(size)
        mass[symbol] = 1.0
        return cls(Alphabet(size), mass)

    def __len__(self) -> int:
        return self.alphabet.size


@dataclass(frozen=True, eq=False)
class Channel:
    """Discrete memoryless channel: a row-stochastic matrix W(y|x)."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise ValueError("channel matrix must be 2-dimensional")
        if np.any(rows < 0):
            raise ValueError("negative channel probability")
        sums = rows.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > CONSTRUCT_TOL):
            raise ValueError("channel rows must each sum to 1")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def input(self) -> Alphabet:
        return Alphabet(self.rows.shape[0])

    @property
    def output(self) -> Alphabet:
        return Alphabet(self.rows.shape[1])

    @classmethod
    def bsc(cls, p: float) -> "Channel":
        """Binary symmetric channel with crossover probability p."""
        return cls(np.array([[1 - p, p], [p, 1 - p]]))

    @classmethod
    def identity(cls, size: int) -> "Channel":
        return cls(np.eye(size))

    @classmethod
    def fully_noisy(cls, in_size: int, out_size: int | None = None) -> "Channel":
        """Channel with identical uniform rows: output independent of input."""
        out_size = in_size if out_size is None else out_size
        return cls(np.full((in_size, out_size), 1.0 / out_size))


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint probability matrix over a pair of finite alphabets."""

    row_alphabet: Alphabet
    col_alphabet: Alphabet
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=np.float64)
        expected = (self.row_alphabet.size, self.col_alphabet.size)
        if mass.shape != expected:
            raise ValueError(f"mass shape {mass.shape} != {expected}")
        if np.any(mass < 0):
            raise ValueError("negative joint mass")
        total = float(mass.sum())
        if abs(total - 1.0) > CONSTRUCT_TOL:
            raise ValueError(f"joint mass sums to {total}, not 1")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    @classmethod
    def from_matrix(cls, mass) -> "JointDistribution":
        mass = np.asarray(mass, dtype=np.float64)
        return cls(Alphabet(mass.shape[0]), Alphabet(mass.shape[1]), mass)

    def marginal_row(self) -> Distribution:
        return Distribution(self.row_alphabet, self.mass.sum(axis=1))

    def marginal_col(self) -> Distribution:
        return Distribution(self.col_alphabet, self.mass.sum(axis=0))

    def swap(self) -> "JointDistribution":
        return JointDistribution(self.col_alphabet, self.row_alphabet, self.mass.T)


@dataclass(frozen=True)
class Sequence:
    """Length-n word over an indexed finite alphabet."""

    alphabet: Alphabet
    symbols: tuple[int, ...]

    def __post_init__(self):
        if any(not (0 <= s < self.alphabet.size) for s in self.symbols):
            raise ValueError("symbol index out of alphabet range")

    @property
    def n(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        if self.alphabet.size > 10:
            return ",".join(str(s) for s in self.symbols)
        return "".join(str(s) for s in self.symbols)


def _plogp(p: np.ndarray) -> np.ndarray:
    """Elementwise -p*log2(p) with the 0*log0 = 0 convention."""
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = -p[pos] * np.log2(p[pos])
    return out


def entropy(d: Distribution) -> float:
    """Shannon entropy H(X) in bits."""
    return float(_plogp(d.mass).sum())


def joint_entropy(j: JointDistribution) -> float:
    return float(_plogp(j.mass).sum())


def conditional_entropy(j: JointDistribution) -> float:
    """H(X|Y) for a joint over (X, Y): pairs with zero mass contribute 0."""
    p_y = j.mass.sum(axis=0)
    h = 0.0
    for yi in range(j.col_alphabet.size):
        if p_y[yi] <= 0:
            continue
        col = j.mass[:, yi]
        pos = col > 0
        h -= float(np.sum(col[pos] * np.log2(col[pos] / p_y[yi])))
    return h


def mutual_information(j: JointDistribution) -> float:
    """I(X;Y) = H(X) + H(Y) - H(X,Y); tiny negatives are clamped to 0."""
    mi = entropy(j.marginal_row()) + entropy(j.marginal_col()) - joint_entropy(j)
    if mi < -DERIVED_TOL:
        raise AssertionError(f"mutual information {mi} below -{DERIVED_TOL}")
    return max(mi, 0.0)


def statistical_distance(p: Distribution, q: Distribution) -> float:
    """Unhalved L1 distance sum_x |p(x) - q(x)|, in [0, 2]."""
    if p.alphabet != q.alphabet:
        raise AlphabetMismatchError("distributions over different alphabets")
    return float(np.abs(p.mass - q.mass).sum())


def conditional_statistical_distance(j: JointDistribution, ref: Distribution) -> float:
    """sum_y P_Y(y) * sum_x |P_{X|Y}(x|y) - ref(x)|, conditioning on the
    second coordinate of the joint. Outcomes y with P_Y(y)=0 contribute 0."""
    if ref.alphabet != j.row_alphabet:
        raise AlphabetMismatchError("reference alphabet does not match joint X-alphabet")
    p_y = j.mass.sum(axis=0)
    total = 0.0
    for yi in range(j.col_alphabet.size):
        if p_y[yi] <= 0:
            continue
        cond = j.mass[:, yi] / p_y[yi]
        total += p_y[yi] * float(np.abs(cond - ref.mass).sum())
    return total


def push_through_channel(input_dist: Distribution, ch: Channel) -> JointDistribution:
    """Joint of (X, Y) with mass(x, y) = input(x) * W(y|x)."""
    if input_dist.alphabet != ch.input:
        raise AlphabetMismatchError("input distribution does not match channel input")
    return JointDistribution(ch.input, ch.output, input_dist.mass[:, None] * ch.rows)


def sample_channel(x: Sequence, ch: Channel, rng: np.random.Generator) -> Sequence:
    """Draw each output symbol independently from the row W(.|x_i).

    Mutates only the caller-supplied generator; deterministic given its state.
    """
    if x.alphabet != ch.input:
        raise AlphabetMismatchError("sequence alphabet does not match channel input")
    digits = np.fromiter(x.symbols, dtype=np.int64, count=x.n)
    cum = np.cumsum(ch.rows[digits], axis=1)
    u = rng.random(x.n)
    out = (u[:, None] > cum).sum(axis=1)
    return Sequence(ch.output, tuple(int(v) for v in out))


def secrecy_capacity_less_noisy(px: Distribution, w1: Channel, w2: Channel) -> float:
    """H(X|Z) - H(X|Y) for the wiretap pair (W1 to receiver, W2 to wiretapper)."""
    if w1.input != px.alphabet or w2.input != px.alphabet:
        raise AlphabetMismatchError("channels must share the input alphabet of px")
    h_x_given_y = conditional_entropy(push_through_channel(px, w1))
    h_x_given_z = conditional_entropy(push_through_channel(px, w2))
    return h_x_given_z - h_x_given_y


@dataclass(frozen=True)
class CsiszarBoundReport:
    delta: float
    mi: float
    lower: float
    upper: float
    upper_vacuous: bool
    holds: bool


def check_csiszar_bound(j: JointDistribution) -> CsiszarBoundReport:
    """Check delta^2/(2 ln 2) <= I(X;Y) <= delta*log2(|X|/delta) for
    delta = SD(X|Y; X). The upper bound needs |X| >= 4 and is reported
    as vacuous when delta = 0."""
    delta = conditional_statistical_distance(j, j.marginal_row())
    mi = mutual_information(j)
    lower = delta * delta / (2.0 * math.log(2.0))
    lower_ok = lower <= mi + DERIVED_TOL
    if delta <= 0:
        return CsiszarBoundReport(delta, mi, lower, math.inf, True, lower_ok)
    upper = delta * math.log2(j.row_alphabet.size / delta)
    upper_ok = True
    if j.row_alphabet.size >= 4:
        upper_ok = mi <= upper + DERIVED_TOL
    return CsiszarBoundReport(delta, mi, lower, upper, False, lower_ok and upper_ok)
