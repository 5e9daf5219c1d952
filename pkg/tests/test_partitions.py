from fractions import Fraction

import pytest

from chamber_bessel.errors import DomainError, PochhammerPoleError
from chamber_bessel.partitions import (Partition, count_partitions, dominance_compare, dominance_leq,
                                       enumerate_partitions, gen_pochhammer, jack_eigenvalue, monomial_at_ones,
                                       multinomial, operator_eigenvalue)


def test_partition_normalizes():
    assert Partition((3, 1, 0, 0)) == (3, 1)
    assert Partition(()).weight == 0
    with pytest.raises(DomainError):
        Partition((1, 2))
    with pytest.raises(DomainError):
        Partition((2, -1))


def test_enumeration_examples():
    assert enumerate_partitions(4, 2) == [(4,), (3, 1), (2, 2)]
    assert enumerate_partitions(0, 3) == [()]
    assert enumerate_partitions(3, 3) == [(3,), (2, 1), (1, 1, 1)]


def _p(n, m):
    # p(n, m) = p(n - m, m) + p(n, m - 1), partitions of n into at most m parts
    if n == 0:
        return 1
    if n < 0 or m == 0:
        return 0
    return _p(n - m, m) + _p(n, m - 1)


def test_counts_match_recurrence():
    for n in range(31):
        for m in range(1, 7):
            assert len(enumerate_partitions(n, m)) == _p(n, m) == count_partitions(n, m)


def test_dominance_examples():
    assert dominance_leq((2, 2), (3, 1))
    assert not dominance_leq((3, 1), (2, 2))
    assert dominance_leq((1, 1, 1), (3,))
    assert dominance_compare((3, 1, 1, 1), (2, 2, 2)) is None
    with pytest.raises(DomainError):
        dominance_leq((2,), (1,))


def test_pochhammer_examples():
    a, alpha = 0.37, 1.7
    assert gen_pochhammer(a, (), alpha) == 1
    assert gen_pochhammer(a, (1,), alpha) == pytest.approx(a)
    assert gen_pochhammer(a, (1, 1), alpha) == pytest.approx(a * (a - 1 / alpha))
    assert gen_pochhammer(Fraction(1, 2), (2, 1), 1) == Fraction(1, 2) * Fraction(3, 2) * Fraction(-1, 2)
    assert gen_pochhammer(Fraction(1, 2), (2, 1), 2, allow_zero=True) == 0


def test_pochhammer_pole():
    with pytest.raises(PochhammerPoleError):
        gen_pochhammer(-1.0, (3,), 1.0)
    with pytest.raises(PochhammerPoleError):
        gen_pochhammer(0.0, (1,), 1.0)


@pytest.mark.parametrize("tau", [(3,), (2, 1), (2, 2, 1), (4, 1)])
def test_pochhammer_degree(tau):
    # finite differences of order |tau| are constant, of order |tau|+1 vanish
    n = sum(tau)
    a = [Fraction(3 * j + 1, 7) for j in range(n + 3)]
    vals = [gen_pochhammer(v, tau, Fraction(5, 3)) for v in a]
    for _ in range(n + 1):
        vals = [b - c for b, c in zip(vals[1:], vals)]
    assert all(v == 0 for v in vals)


def test_eigenvalue_examples():
    assert jack_eigenvalue((1,), 1, 2) == 2
    assert jack_eigenvalue((), 3, 5) == 0
    assert jack_eigenvalue((2, 1), 2, 2) == 7


def test_operator_eigenvalue_shift():
    # the tabulated formula and the operator eigenvalue differ by a weight-only shift
    for tau in enumerate_partitions(5, 3):
        d = jack_eigenvalue(tau, Fraction(3, 2), 3) - operator_eigenvalue(tau, Fraction(3, 2), 3)
        assert d == 5 * (3 - Fraction(4, 3) * 2)


def test_eigenvalues_separate_along_dominance():
    for alpha in (0.5, 1.0, 2.0, 3.0, Fraction(1, 3)):
        for m in range(1, 5):
            for n in range(13):
                parts = enumerate_partitions(n, m)
                for i, lam in enumerate(parts):
                    for mu in parts[i + 1:]:
                        if dominance_leq(mu, lam):
                            assert jack_eigenvalue(mu, alpha, m) != jack_eigenvalue(lam, alpha, m)
                            assert operator_eigenvalue(mu, alpha, m) != operator_eigenvalue(lam, alpha, m)


def test_multinomial_and_ones():
    assert multinomial((2, 1)) == 3
    assert multinomial((2, 2)) == 6
    assert monomial_at_ones((2, 1), 3) == 6
    assert monomial_at_ones((1, 1), 2) == 1
    assert monomial_at_ones((), 4) == 1
