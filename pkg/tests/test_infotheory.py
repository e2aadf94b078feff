"""Distribution/channel functionals against closed-form values and the
module's structural invariants."""

from __future__ import annotations

import math

import numpy as np
import pytest

from wiretap_auth.infotheory import (
    Alphabet,
    AlphabetMismatchError,
    Channel,
    Distribution,
    JointDistribution,
    Sequence,
    check_csiszar_bound,
    conditional_entropy,
    conditional_statistical_distance,
    entropy,
    mutual_information,
    push_through_channel,
    sample_channel,
    secrecy_capacity_less_noisy,
    statistical_distance,
)


def h2(p: float) -> float:
    """Binary entropy, the independent closed-form oracle."""
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def bsc_joint(p: float) -> JointDistribution:
    return push_through_channel(Distribution.uniform(2), Channel.bsc(p))


class TestConstruction:
    def test_distribution_rejects_bad_mass(self):
        with pytest.raises(ValueError):
            Distribution.from_probs([0.5, 0.6])
        with pytest.raises(ValueError):
            Distribution.from_probs([1.1, -0.1])

    def test_channel_rejects_nonstochastic_rows(self):
        with pytest.raises(ValueError):
            Channel(np.array([[0.5, 0.4], [0.5, 0.5]]))

    def test_sequence_rejects_out_of_range_symbol(self):
        with pytest.raises(ValueError):
            Sequence(Alphabet(2), (0, 2))

    def test_alphabet_must_be_positive(self):
        with pytest.raises(ValueError):
            Alphabet(0)


class TestEntropy:
    def test_uniform_bit(self):
        assert entropy(Distribution.uniform(2)) == pytest.approx(1.0, abs=1e-12)

    def test_point_mass(self):
        assert entropy(Distribution.point_mass(3, 1)) == 0.0

    def test_third_two_thirds(self):
        expected = (1 / 3) * math.log2(3) + (2 / 3) * math.log2(3 / 2)
        got = entropy(Distribution.from_probs([1 / 3, 0, 2 / 3]))
        assert got == pytest.approx(expected, abs=1e-12)
        assert got == pytest.approx(0.9182958340544896, abs=1e-9)


class TestConditionalEntropy:
    def test_independent_pair_gives_marginal_entropy(self):
        px = np.array([0.3, 0.7])
        py = np.array([0.25, 0.25, 0.5])
        j = JointDistribution.from_matrix(px[:, None] * py[None, :])
        assert conditional_entropy(j) == pytest.approx(
            entropy(Distribution.from_probs(px)), abs=1e-12
        )

    def test_deterministic_copy_is_zero(self):
        j = JointDistribution.from_matrix(np.eye(3) / 3)
        assert conditional_entropy(j) == pytest.approx(0.0, abs=1e-12)

    def test_bsc_01(self):
        assert conditional_entropy(bsc_joint(0.1)) == pytest.approx(h2(0.1), abs=1e-12)
        assert conditional_entropy(bsc_joint(0.1)) == pytest.approx(0.468995593589, abs=1e-9)


class TestMutualInformation:
    def test_independent_pair(self):
        j = JointDistribution.from_matrix(np.full((2, 3), 1 / 6))
        assert mutual_information(j) == pytest.approx(0.0, abs=1e-12)

    def test_deterministic_copy_of_uniform_bit(self):
        j = JointDistribution.from_matrix(np.eye(2) / 2)
        assert mutual_information(j) == pytest.approx(1.0, abs=1e-12)

    def test_bsc_01(self):
        assert mutual_information(bsc_joint(0.1)) == pytest.approx(1 - h2(0.1), abs=1e-12)
        assert mutual_information(bsc_joint(0.1)) == pytest.approx(0.531004406411, abs=1e-9)

    def test_identity_with_entropies_on_random_joints(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            mass = rng.random((3, 4))
            j = JointDistribution.from_matrix(mass / mass.sum())
            via_entropies = entropy(j.marginal_row()) - conditional_entropy(j)
            assert mutual_information(j) == pytest.approx(via_entropies, abs=1e-9)


class TestStatisticalDistance:
    def test_equal_distributions(self):
        p = Distribution.from_probs([0.2, 0.8])
        assert statistical_distance(p, p) == 0.0

    def test_disjoint_supports(self):
        p = Distribution.from_probs([1.0, 0.0])
        q = Distribution.from_probs([0.0, 1.0])
        assert statistical_distance(p, q) == 2.0

    def test_half_overlap(self):
        p = Distribution.from_probs([1.0, 0.0])
        q = Distribution.from_probs([0.5, 0.5])
        assert statistical_distance(p, q) == pytest.approx(1.0, abs=1e-12)

    def test_symmetry_triangle_and_range(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            raw = rng.random((3, 4))
            p, q, r = (Distribution.from_probs(row / row.sum()) for row in raw)
            d_pq = statistical_distance(p, q)
            assert d_pq == statistical_distance(q, p)
            assert 0.0 <= d_pq <= 2.0
            assert d_pq <= statistical_distance(p, r) + statistical_distance(r, q) + 1e-12

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatchError):
            statistical_distance(Distribution.uniform(2), Distribution.uniform(3))


class TestConditionalStatisticalDistance:
    def test_independent_pair_is_zero(self):
        px = np.array([0.4, 0.6])
        j = JointDistribution.from_matrix(px[:, None] * np.array([0.5, 0.5])[None, :])
        assert conditional_statistical_distance(j, j.marginal_row()) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_copy_of_uniform_bit(self):
        j = JointDistribution.from_matrix(np.eye(2) / 2)
        assert conditional_statistical_distance(j, j.marginal_row()) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_range_on_random_joints(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            mass = rng.random((3, 3))
            j = JointDistribution.from_matrix(mass / mass.sum())
            ref_raw = rng.random(3)
            ref = Distribution.from_probs(ref_raw / ref_raw.sum())
            assert 0.0 <= conditional_statistical_distance(j, ref) <= 2.0 + 1e-12

    def test_zero_iff_independent(self):
        dependent = JointDistribution.from_matrix(np.array([[0.4, 0.1], [0.1, 0.4]]))
        assert conditional_statistical_distance(dependent, dependent.marginal_row()) > 1e-6


class TestPushThroughChannel:
    def test_identity_channel_diagonal(self):
        px = Distribution.from_probs([0.3, 0.7])
        j = push_through_channel(px, Channel.identity(2))
        np.testing.assert_allclose(j.mass, np.diag([0.3, 0.7]))

    def test_uniform_bit_bsc_02(self):
        j = push_through_channel(Distribution.uniform(2), Channel.bsc(0.2))
        np.testing.assert_allclose(j.mass, [[0.4, 0.1], [0.1, 0.4]])

    def test_point_mass_single_row(self):
        j = push_through_channel(Distribution.point_mass(2, 1), Channel.bsc(0.2))
        np.testing.assert_allclose(j.mass[0], [0.0, 0.0])
        np.testing.assert_allclose(j.mass[1], [0.2, 0.8])

    def test_mismatch(self):
        with pytest.raises(AlphabetMismatchError):
            push_through_channel(Distribution.uniform(3), Channel.bsc(0.2))


class TestSampleChannel:
    def test_identity_returns_input(self):
        rng = np.random.default_rng(1)
        x = Sequence(Alphabet(2), (0, 1, 1, 0, 1))
        assert sample_channel(x, Channel.identity(2), rng).symbols == x.symbols

    def test_bsc_zero_returns_input(self):
        rng = np.random.default_rng(1)
        x = Sequence(Alphabet(2), (0, 1) * 10)
        assert sample_channel(x, Channel.bsc(0.0), rng).symbols == x.symbols

    def test_bsc_half_flip_fraction(self):
        rng = np.random.default_rng(42)
        n = 10**4
        x = Sequence(Alphabet(2), (0,) * n)
        y = sample_channel(x, Channel.bsc(0.5), rng)
        frac = sum(y.symbols) / n
        assert abs(frac - 0.5) < 0.02

    def test_empirical_transition_frequencies(self):
        rng = np.random.default_rng(7)
        n = 10**5
        ch = Channel(np.array([[0.7, 0.2, 0.1], [0.1, 0.3, 0.6]]))
        x = Sequence(Alphabet(2), tuple(int(v) for v in rng.integers(0, 2, n)))
        y = sample_channel(x, ch, rng)
        counts = np.zeros((2, 3))
        for a, b in zip(x.symbols, y.symbols):
            counts[a, b] += 1
        rows = counts / counts.sum(axis=1, keepdims=True)
        assert np.max(np.abs(rows - ch.rows)) < 0.01

    def test_deterministic_given_state(self):
        x = Sequence(Alphabet(2), (0, 1, 0, 1, 1, 0))
        a = sample_channel(x, Channel.bsc(0.3), np.random.default_rng(9))
        b = sample_channel(x, Channel.bsc(0.3), np.random.default_rng(9))
        assert a.symbols == b.symbols


class TestSecrecyCapacity:
    def test_equal_channels_zero(self):
        px = Distribution.uniform(2)
        ch = Channel.bsc(0.1)
        assert secrecy_capacity_less_noisy(px, ch, ch) == pytest.approx(0.0, abs=1e-12)

    def test_bsc_pair_closed_form(self):
        got = secrecy_capacity_less_noisy(
            Distribution.uniform(2), Channel.bsc(0.05), Channel.bsc(0.2)
        )
        assert got == pytest.approx(h2(0.2) - h2(0.05), abs=1e-12)
        assert got == pytest.approx(0.435531137771, abs=1e-9)

    def test_identity_main_channel(self):
        got = secrecy_capacity_less_noisy(
            Distribution.uniform(2), Channel.identity(2), Channel.bsc(0.2)
        )
        assert got == pytest.approx(h2(0.2), abs=1e-12)
        assert got == pytest.approx(0.721928094887, abs=1e-9)


class TestCsiszarBound:
    def test_independent_joint_vacuous_equality(self):
        j = JointDistribution.from_matrix(np.full((4, 4), 1 / 16))
        rep = check_csiszar_bound(j)
        assert rep.delta == pytest.approx(0.0, abs=1e-12)
        assert rep.mi == pytest.approx(0.0, abs=1e-12)
        assert rep.upper_vacuous
        assert rep.holds

    def test_deterministic_copy_over_four_symbols(self):
        rep = check_csiszar_bound(JointDistribution.from_matrix(np.eye(4) / 4))
        assert rep.delta == pytest.approx(1.5, abs=1e-12)
        assert rep.mi == pytest.approx(2.0, abs=1e-12)
        assert rep.lower <= rep.mi + 1e-9
        assert rep.mi <= rep.upper + 1e-9
        assert rep.holds

    def test_seeded_random_joints(self):
        rng = np.random.default_rng(31)
        for _ in range(300):
            mass = rng.random((4, 4))
            assert check_csiszar_bound(JointDistribution.from_matrix(mass / mass.sum())).holds
