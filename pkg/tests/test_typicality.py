"""Type classes, typical sets, and the exact counting bounds."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from wiretap_auth.infotheory import Alphabet, Channel, Distribution, Sequence
from wiretap_auth.typicality import (
    BudgetExceededError,
    TypeP,
    all_types,
    check_counting_bounds,
    conditional_typical_set,
    enumerate_type_class,
    is_cond_eps_typical,
    is_eps_typical,
    type_class_size,
    type_of,
)


def seq(bits: str, size: int = 2) -> Sequence:
    return Sequence(Alphabet(size), tuple(int(c) for c in bits))


class TestTypeOf:
    def test_paper_example_022022(self):
        assert type_of(seq("022022", 3)).counts == (2, 0, 4)

    def test_constant_sequence(self):
        assert type_of(seq("11111")).counts == (0, 5)

    def test_alternating(self):
        assert type_of(seq("0101")).counts == (2, 2)


class TestTypeClassSize:
    def test_paper_example_15(self):
        assert type_class_size(TypeP.from_counts([2, 0, 4])) == 15

    def test_point_mass(self):
        assert type_class_size(TypeP.from_counts([0, 6, 0])) == 1

    def test_binomial(self):
        assert type_class_size(TypeP.from_counts([2, 2])) == 6


class TestEnumerateTypeClass:
    def test_paper_members_and_count(self):
        members = [str(s) for s in enumerate_type_class(TypeP.from_counts([2, 0, 4]))]
        assert len(members) == 15
        assert members == sorted(members)
        assert "002222" in members
        assert "022022" in members

    def test_point_mass_single(self):
        members = list(enumerate_type_class(TypeP.from_counts([0, 3])))
        assert [str(m) for m in members] == ["111"]

    def test_two_of_each(self):
        members = [str(s) for s in enumerate_type_class(TypeP.from_counts([1, 1]))]
        assert members == ["01", "10"]

    def test_yields_distinct_members_of_the_type(self):
        p = TypeP.from_counts([3, 2])
        members = list(enumerate_type_class(p))
        assert len(set(m.symbols for m in members)) == type_class_size(p)
        assert all(type_of(m).counts == p.counts for m in members)

    def test_budget_enforced(self):
        with pytest.raises(BudgetExceededError):
            list(enumerate_type_class(TypeP.from_counts([10, 10]), budget=10))


class TestAllTypes:
    @pytest.mark.parametrize("k,n", [(2, 6), (2, 8), (3, 6), (3, 8)])
    def test_sum_of_class_sizes(self, k, n):
        assert sum(type_class_size(p) for p in all_types(k, n)) == k**n


class TestEpsTypical:
    def test_exact_type_any_eps(self):
        x = seq("0011")
        for eps in (0.0, 0.1, 1.0):
            assert is_eps_typical(x, Distribution.uniform(2), eps)

    def test_zero_support_clause(self):
        x = seq("021", 3)
        px = Distribution.from_probs([0.5, 0.0, 0.5])
        assert not is_eps_typical(x, px, 10.0)

    def test_deviation_arithmetic(self):
        px = Distribution.uniform(2)
        assert is_eps_typical(seq("0011"), px, 0.0)
        # type (3/4, 1/4): deviation 0.25 > 0.4/2
        assert not is_eps_typical(seq("0001"), px, 0.4)
        assert is_eps_typical(seq("0001"), px, 0.5)


class TestCondEpsTypical:
    def test_identity_channel_equal(self):
        x = seq("0101")
        for eps in (0.0, 0.5, 2.0):
            assert is_cond_eps_typical(x, x, Channel.identity(2), eps)

    def test_identity_channel_any_difference(self):
        assert not is_cond_eps_typical(seq("0111"), seq("0101"), Channel.identity(2), 5.0)

    def test_bsc_quarter_exact_joint_type(self):
        x = seq("00001111")
        y = seq("00011110")
        assert is_cond_eps_typical(y, x, Channel.bsc(0.25), 0.0)
        assert not is_cond_eps_typical(seq("00001111"), x, Channel.bsc(0.25), 0.0)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            is_cond_eps_typical(seq("01"), seq("011"), Channel.bsc(0.1), 0.1)


class TestConditionalTypicalSet:
    def test_identity_channel_tiny_eps(self):
        x = seq("0101")
        members = conditional_typical_set(x, Channel.identity(2), 0.1)
        assert [m.symbols for m in members] == [x.symbols]

    def test_bsc_zero(self):
        x = seq("0011")
        members = conditional_typical_set(x, Channel.bsc(0.0), 0.4)
        assert [m.symbols for m in members] == [x.symbols]

    def test_bsc_quarter_size_16(self):
        x = seq("00001111")
        members = conditional_typical_set(x, Channel.bsc(0.25), 0.0)
        assert len(members) == 16
        for m in members:
            flips0 = sum(1 for a, b in zip(x.symbols, m.symbols) if a == 0 and b == 1)
            flips1 = sum(1 for a, b in zip(x.symbols, m.symbols) if a == 1 and b == 0)
            assert (flips0, flips1) == (1, 1)

    def test_membership_consistency(self):
        x = seq("001011")
        ch = Channel.bsc(0.2)
        members = {m.symbols for m in conditional_typical_set(x, ch, 0.5)}
        for value in range(2**6):
            y = Sequence(Alphabet(2), tuple((value >> k) & 1 for k in range(6)))
            assert (y.symbols in members) == is_cond_eps_typical(y, x, ch, 0.5)

    def test_monotone_in_eps(self):
        x = seq("010011")
        ch = Channel.bsc(0.3)
        small = {m.symbols for m in conditional_typical_set(x, ch, 0.2)}
        large = {m.symbols for m in conditional_typical_set(x, ch, 0.8)}
        assert small <= large

    def test_whole_type_class_of_typical_sequence_is_typical(self):
        px = Distribution.from_probs([0.5, 0.5])
        x = seq("000111")
        assert is_eps_typical(x, px, 0.4)
        for member in enumerate_type_class(type_of(x)):
            assert is_eps_typical(member, px, 0.4)


class TestCountingBounds:
    def test_paper_type_bounds(self):
        rep = check_counting_bounds(TypeP.from_counts([2, 0, 4]))
        assert rep.class_size == 15
        # 2^{6 H(1/3,0,2/3)} = (6/2)^2 (6/4)^4 = 45.5625 exactly
        assert rep.lemma6_upper == Fraction(9) * Fraction(3, 2) ** 4
        assert float(rep.lemma6_upper) == pytest.approx(45.5625)
        assert rep.lemma5_holds and rep.lemma6_holds

    def test_point_mass_tight(self):
        rep = check_counting_bounds(TypeP.from_counts([5, 0]))
        assert rep.class_size == 1
        assert rep.lemma6_upper == 1
        assert rep.lemma5_holds and rep.lemma6_holds

    def test_uniform_bit_n10(self):
        rep = check_counting_bounds(TypeP.from_counts([5, 5]))
        assert rep.class_size == math.comb(10, 5) == 252
        assert rep.lemma6_upper == 1024
        assert rep.lemma6_lower == Fraction(1024, 11**2)
        assert rep.lemma5_holds and rep.lemma6_holds

    @pytest.mark.parametrize("k", [2, 3])
    def test_all_types_up_to_n10(self, k):
        for n in range(1, 11):
            for p in all_types(k, n):
                rep = check_counting_bounds(p)
                assert rep.lemma5_holds, (k, n, p.counts)
                assert rep.lemma6_holds, (k, n, p.counts)

    def test_conditional_probability_reported(self):
        rep = check_counting_bounds(TypeP.from_counts([3, 3]), ch=Channel.bsc(0.1), eps=0.5)
        assert rep.cond_typical_prob is not None
        assert 0.0 < rep.cond_typical_prob <= 1.0
