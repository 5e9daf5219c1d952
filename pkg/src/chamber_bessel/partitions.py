"""Integer partitions, dominance order, generalized Pochhammer symbols and
Jack eigenvalues."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .errors import DomainError, PochhammerPoleError


class Partition(tuple):
    """Weakly decreasing tuple of positive integers (zeros are trimmed)."""

    def __new__(cls, parts: Iterable[int] = ()):
        parts = [int(p) for p in parts]
        if any(p < 0 for p in parts):
            raise DomainError(f"negative part in {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise DomainError(f"parts must be weakly decreasing: {parts}")
        while parts and parts[-1] == 0:
            parts.pop()
        return super().__new__(cls, parts)

    @property
    def weight(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def padded(self, m: int) -> tuple:
        if len(self) > m:
            raise DomainError(f"partition {tuple(self)} has more than {m} parts")
        return tuple(self) + (0,) * (m - len(self))

    def multiplicities(self, m: int | None = None) -> list[int]:
        """Counts of each distinct part value; zeros included when ``m`` is given."""
        parts = self.padded(m) if m is not None else tuple(self)
        counts: dict[int, int] = {}
        for p in parts:
            counts[p] = counts.get(p, 0) + 1
        return list(counts.values())

    def __repr__(self):
        return f"Partition({tuple(self)})"


@lru_cache(maxsize=None)
def _partitions(n: int, max_len: int, max_part: int) -> tuple:
    if n == 0:
        return ((),)
    if max_len == 0:
        return ()
    out = []
    for first in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - first, max_len - 1, first):
            out.append((first,) + rest)
    return tuple(out)


def enumerate_partitions(n: int, max_len: int) -> list[Partition]:
    """All partitions of ``n`` with at most ``max_len`` parts, reverse-lex order."""
    if n < 0 or max_len < 1:
        raise DomainError(f"need n >= 0 and max_len >= 1, got n={n}, max_len={max_len}")
    return [Partition(p) for p in _partitions(n, max_len, n)]


def count_partitions(n: int, m: int) -> int:
    """Partitions of ``n`` into at most ``m`` parts, by the standard recurrence."""
    if n == 0:
        return 1
    if n < 0 or m == 0:
        return 0
    return count_partitions(n - m, m) + count_partitions(n, m - 1)


def dominance_leq(mu, lam) -> bool:
    """True iff ``mu <= lam`` in dominance order (partial sums)."""
    mu, lam = Partition(mu), Partition(lam)
    if mu.weight != lam.weight:
        raise DomainError(f"dominance needs equal weights: {mu.weight} != {lam.weight}")
    s_mu = s_lam = 0
    for i in range(max(len(mu), len(lam))):
        s_mu += mu[i] if i < len(mu) else 0
        s_lam += lam[i] if i < len(lam) else 0
        if s_mu > s_lam:
            return False
    return True


def dominance_compare(mu, lam) -> int | None:
    """-1, 0, 1 for mu < lam, equal, mu > lam; ``None`` when incomparable."""
    if tuple(mu) == tuple(lam):
        return 0
    if dominance_leq(mu, lam):
        return -1
    if dominance_leq(lam, mu):
        return 1
    return None


def _over(num: int, alpha):
    # exact division when alpha is rational, float otherwise
    if isinstance(alpha, (int, Fraction)):
        return Fraction(num) / alpha
    return num / alpha


def rising_factorial(a, n: int):
    out = a * 0 + 1
    for j in range(n):
        out = out * (a + j)
    return out


def _is_nonpositive_integer(b) -> bool:
    if isinstance(b, (int, Fraction)):
        return b <= 0 and b == int(b)
    r = round(float(b))
    return r <= 0 and abs(float(b) - r) <= 1e-12 * max(1.0, abs(float(b)))


def gen_pochhammer(a, tau, alpha, allow_zero: bool = False):
    """``prod_i (a - (i-1)/alpha)_{tau_i}``.

    A factor that vanishes (``a - (i-1)/alpha`` a non-positive integer
    reached within ``tau_i`` steps) raises :class:`PochhammerPoleError`
    unless ``allow_zero``; the symbol is normally used as a denominator.
    Works with floats or exact :class:`~fractions.Fraction` arguments.
    """
    tau = Partition(tau)
    out = a * 0 + 1
    for i, part in enumerate(tau):
        b = a - _over(i, alpha)
        if not allow_zero and _is_nonpositive_integer(b) and -b <= part - 1:
            raise PochhammerPoleError(f"(a)_tau vanishes: a={a}, tau={tuple(tau)}, alpha={alpha}")
        out = out * rising_factorial(b, part)
    return out


def jack_eigenvalue(tau, alpha, m: int):
    """``sum_i tau_i [tau_i - (2/alpha)(i-1)] + |tau| (m-1)`` as tabulated.

    This differs from the true eigenvalue of the eigenoperator (see
    :func:`operator_eigenvalue`) by a quantity that depends only on
    ``|tau|``, ``m`` and ``alpha``; differences between partitions of equal
    weight, which are all the triangular solve uses, agree.
    """
    tau = Partition(tau)
    if len(tau) > m:
        raise DomainError(f"partition {tuple(tau)} longer than m={m}")
    two_over = _over(2, alpha)
    return sum(t * (t - two_over * i) for i, t in enumerate(tau)) + tau.weight * (m - 1)


def operator_eigenvalue(tau, alpha, m: int):
    """Eigenvalue of ``sum x_i^2 d_i^2 + (2/alpha) sum_{i!=j} x_i^2/(x_i-x_j) d_i``
    on the Jack polynomial indexed by ``tau``: ``sum tau_i(tau_i-1) + (2/alpha) sum tau_i (m-i)``.
    """
    tau = Partition(tau)
    if len(tau) > m:
        raise DomainError(f"partition {tuple(tau)} longer than m={m}")
    two_over = _over(2, alpha)
    return sum(t * (t - 1) for t in tau) + two_over * sum(t * (m - 1 - i) for i, t in enumerate(tau))


def multinomial(tau) -> int:
    """``|tau|! / prod tau_i!``: coefficient of m_tau in (x_1 + ... + x_m)^|tau|."""
    tau = Partition(tau)
    out = math.factorial(tau.weight)
    for t in tau:
        out //= math.factorial(t)
    return out


def monomial_at_ones(tau, m: int) -> int:
    """Number of distinct permutations of ``tau`` padded to ``m`` entries."""
    out = math.factorial(m)
    for c in Partition(tau).multiplicities(m):
        out //= math.factorial(c)
    return out


def distinct_permutations(parts: tuple) -> list[tuple]:
    """Distinct orderings of a multiset, in lexicographic order."""
    items = sorted(parts)
    out = []

    def rec(prefix, remaining):
        if not remaining:
            out.append(tuple(prefix))
            return
        prev = None
        for i, v in enumerate(remaining):
            if v == prev:
                continue
            prev = v
            rec(prefix + [v], remaining[:i] + remaining[i + 1:])

    rec([], items)
    return out
