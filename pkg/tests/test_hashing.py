"""Field arithmetic and the ASU family: construction values, exhaustive
certification, pair bounds, padding."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from wiretap_auth.gf import FieldParams
from wiretap_auth.hashing import (
    AsuCertificate,
    HashKey,
    StinsonFamily,
    certify_asu,
    check_pair_bound,
    hash_tag,
    pad_message,
    worst_collision_pair,
)
from wiretap_auth.typicality import BudgetExceededError


class TestFields:
    @pytest.mark.parametrize("q", [2, 3, 5, 7, 4, 8, 16, 256])
    def test_axioms(self, q):
        rng = np.random.default_rng(q)
        assert FieldParams.for_size(q).spot_check_axioms(rng)

    def test_gf4_multiplication_table(self):
        f = FieldParams.for_size(4)
        # x * x = x + 1 and x * (x+1) = 1 under x^2 + x + 1
        assert f.mul(2, 2) == 3
        assert f.mul(2, 3) == 1
        assert f.add(2, 3) == 1

    def test_unsupported_sizes(self):
        for q in (1, 6, 9, 12):
            with pytest.raises(ValueError):
                FieldParams.for_size(q)

    def test_inverse_of_zero(self):
        with pytest.raises(ZeroDivisionError):
            FieldParams.for_size(5).inv(0)


class TestHashEvaluation:
    def test_level_key_zero_projects_first_coordinate(self):
        fam = StinsonFamily(FieldParams.for_size(2), 2)
        key = HashKey(levels=(0,), final=(1, 0))
        for m in itertools.product(range(2), repeat=2):
            assert hash_tag(fam, key, m) == m[0]

    def test_gf3_level_one_collapses_to_sum(self):
        fam = StinsonFamily(FieldParams.for_size(3), 2)
        key = HashKey(levels=(1,), final=(1, 0))
        assert hash_tag(fam, key, (1, 2)) == 0  # 1 + 2 = 0 in GF(3)

    def test_pure_function(self):
        fam = StinsonFamily(FieldParams.for_size(5), 2)
        key = fam.key_from_index(93)
        tags = {hash_tag(fam, key, (3, 4)) for _ in range(10)}
        assert len(tags) == 1

    def test_exhaustive_cross_check_q2_s2(self):
        """Independent reimplementation: tag = a*(m0 XOR (c AND m1)) XOR b."""
        fam = StinsonFamily(FieldParams.for_size(2), 2)
        for ki in range(fam.key_space_size):
            key = fam.key_from_index(ki)
            (c,) = key.levels
            a, b = key.final
            for m in itertools.product(range(2), repeat=2):
                expected = (a & (m[0] ^ (c & m[1]))) ^ b
                assert hash_tag(fam, key, m) == expected

    def test_wrong_width_rejected(self):
        fam = StinsonFamily(FieldParams.for_size(2), 2)
        key = fam.key_from_index(0)
        with pytest.raises(ValueError):
            hash_tag(fam, key, (0, 1, 0))

    def test_key_index_roundtrip_is_exhaustive(self):
        fam = StinsonFamily(FieldParams.for_size(3), 2)
        keys = {fam.key_from_index(i) for i in range(fam.key_space_size)}
        assert len(keys) == 27


class TestCertification:
    @pytest.mark.parametrize("q,s", [(2, 1), (3, 1), (2, 2), (3, 2)])
    def test_uniformity_and_epsilon(self, q, s):
        fam = StinsonFamily(FieldParams.for_size(q), s)
        cert = certify_asu(fam)
        assert cert.uniformity_exact
        assert cert.epsilon_measured <= fam.epsilon_bound + 1e-12

    def test_tag_uniform_for_each_fixed_message(self):
        fam = StinsonFamily(FieldParams.for_size(3), 2)
        for m in fam.iter_messages():
            counts = [0] * fam.q
            for key in fam.iter_keys():
                counts[hash_tag(fam, key, m)] += 1
            assert all(c == fam.key_space_size // fam.q for c in counts)

    def test_budget(self):
        fam = StinsonFamily(FieldParams.for_size(5), 2)
        with pytest.raises(BudgetExceededError):
            certify_asu(fam, budget=10)


class TestPairBound:
    def test_gf3_s1_distinct_pair(self):
        fam = StinsonFamily(FieldParams.for_size(3), 1)
        assert check_pair_bound(fam, (1,), (2,)) <= fam.epsilon_bound / 3 + 1e-12

    def test_q2_s2_distinct_pairs(self):
        fam = StinsonFamily(FieldParams.for_size(2), 2)
        for m1, m2 in itertools.permutations(fam.iter_messages(), 2):
            assert check_pair_bound(fam, m1, m2) <= 0.5 + 1e-12

    def test_same_message_diagonal(self):
        fam = StinsonFamily(FieldParams.for_size(3), 2)
        q = fam.q
        joint = np.zeros((q, q))
        for key in fam.iter_keys():
            t = hash_tag(fam, key, (1, 1))
            joint[t, t] += 1
        assert check_pair_bound(fam, (1, 1), (1, 1)) == pytest.approx(
            joint.max() / fam.key_space_size
        )

    def test_worst_pair_collision_probability_below_epsilon(self):
        fam = StinsonFamily(FieldParams.for_size(3), 2)
        m1, m2, prob = worst_collision_pair(fam)
        assert m1 != m2
        assert prob <= fam.epsilon_bound + 1e-12
        # exhaustive recount
        collisions = sum(
            1 for key in fam.iter_keys() if hash_tag(fam, key, m1) == hash_tag(fam, key, m2)
        )
        assert prob == pytest.approx(collisions / fam.key_space_size)


class TestPadding:
    def test_pad_appends_terminal_one(self):
        fam = StinsonFamily(FieldParams.for_size(3), 3)  # width 4
        assert pad_message((2,), fam) == (2, 1, 0, 0)
        assert pad_message((), fam) == (1, 0, 0, 0)

    def test_pad_injective_on_short_messages(self):
        fam = StinsonFamily(FieldParams.for_size(2), 3)  # width 4
        shorts = [m for k in range(4) for m in itertools.product(range(2), repeat=k)]
        padded = [pad_message(m, fam) for m in shorts]
        assert len(set(padded)) == len(shorts)

    def test_full_width_passes_through(self):
        fam = StinsonFamily(FieldParams.for_size(2), 2)
        assert pad_message((1, 0), fam) == (1, 0)

    def test_overlong_rejected(self):
        fam = StinsonFamily(FieldParams.for_size(2), 1)
        with pytest.raises(ValueError):
            pad_message((0, 1), fam)
