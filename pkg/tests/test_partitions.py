"""Partition and signature combinatorics tests."""

import math

import pytest

from conftest import rand_partition
from eshg.errors import DomainError
from eshg.partitions import (
    binom2,
    complement,
    conjugate,
    double_square,
    is_partition,
    is_signature,
    normalize,
    nstat,
    nstat_conj,
    subpartitions,
    weight,
)


class TestWeight:
    def test_basic(self):
        assert weight((3, 1)) == 4

    def test_empty(self):
        assert weight(()) == 0

    def test_signature(self):
        assert weight((2, -1)) == 1


class TestNstat:
    def test_basic(self):
        assert nstat((3, 1)) == 1

    def test_single_row(self):
        assert nstat((7,)) == 0

    def test_brute_force_over_boxes(self):
        lam = (2, 2, 2)
        want = sum(i - 1 for i, part in enumerate(lam, start=1) for _ in range(part))
        assert nstat(lam) == want == 6


class TestNstatConj:
    def test_basic(self):
        assert nstat_conj((3, 1)) == 3

    def test_columns(self):
        assert nstat_conj((1, 1, 1)) == 0

    def test_negative_part(self):
        assert nstat_conj((-2,)) == 3
        assert binom2(-2) == 3

    def test_conjugate_consistency(self, rng):
        # n(lambda) recomputed as sum_j binom(lambda'_j, 2)
        for _ in range(100):
            lam = rand_partition(rng, 4, 4)
            if weight(lam) > 12:
                continue
            assert nstat(lam) == sum(binom2(c) for c in conjugate(lam))


class TestConjugate:
    def test_basic(self):
        assert conjugate((3, 1)) == (2, 1, 1)

    def test_empty(self):
        assert conjugate(()) == ()

    def test_involution(self, rng):
        for _ in range(100):
            lam = rand_partition(rng, 5, 5)
            assert normalize(conjugate(conjugate(lam))) == normalize(lam)

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            conjugate((1, -1))


class TestComplement:
    def test_basic(self):
        assert complement((2, 0), 3, 2) == (3, 1)

    def test_empty_gives_full_box(self):
        assert complement((), 3, 2) == (3, 3)

    def test_involution_and_weight(self, rng):
        for _ in range(100):
            m, n = rng.randint(0, 4), rng.randint(1, 4)
            lam = tuple(sorted((rng.randint(0, m) for _ in range(n)), reverse=True))
            comp = complement(lam, m, n)
            assert is_partition(comp)
            assert complement(comp, m, n) == lam
            assert weight(lam) + weight(comp) == m * n

    def test_containment_error(self):
        with pytest.raises(DomainError):
            complement((4,), 3, 2)


class TestDoubleSquare:
    def test_basic(self):
        assert double_square((2, 1)) == (4, 4, 2, 2)

    def test_empty(self):
        assert double_square(()) == ()

    def test_weight_quadruples(self, rng):
        for _ in range(50):
            lam = rand_partition(rng, 5, 4)
            assert weight(double_square(lam)) == 4 * weight(lam)


class TestSubpartitions:
    def test_n1(self):
        assert set(subpartitions(1, 1)) == {(0,), (1,)}

    def test_count_2_2(self):
        assert len(list(subpartitions(2, 2))) == 6

    def test_zero_box(self):
        assert list(subpartitions(0, 0)) == [()]
        assert list(subpartitions(0, 2)) == [(0, 0)]

    def test_counts_match_binomial(self):
        for N in range(7):
            for n in range(7):
                got = list(subpartitions(N, n))
                assert len(got) == math.comb(N + n, n)
                assert len(set(got)) == len(got)
                assert all(is_partition(mu) and len(mu) == n for mu in got)
                assert all((not mu) or mu[0] <= N for mu in got)


class TestPredicatesNormalize:
    def test_is_signature(self):
        assert is_signature((3, 1, -2))
        assert not is_signature((1, 2))

    def test_is_partition(self):
        assert is_partition((3, 1, 0))
        assert not is_partition((3, -1))

    def test_normalize(self):
        assert normalize((3, 1, 0, 0)) == (3, 1)
        assert normalize((0, 0)) == ()
