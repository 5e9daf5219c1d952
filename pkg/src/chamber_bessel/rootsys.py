"""Root systems of types A_{m-1}, B_m and D_m.

Roots are exact integer vectors in R^m.  Weyl group elements are signed
permutations; ``w`` acts on a point by ``(w x)_i = s_i * x[perm[i]]``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

import numpy as np

from .errors import ChamberError, DomainError, WeylGroupTooLarge

#: Largest m for which whole-group enumeration (and W-sums) is allowed.
MAX_ENUM_M = 6


class Kind(str, Enum):
    A = "A"
    B = "B"
    D = "D"


def _unit(m: int, i: int, sign: int = 1) -> np.ndarray:
    v = np.zeros(m, dtype=np.int64)
    v[i] = sign
    return v


@dataclass(frozen=True)
class RootSystem:
    """Positive system of type A_{m-1}, B_m or D_m in R^m.

    ``orbit`` labels each positive root: 0 for the short roots ``e_i``
    (type B only), 1 for the roots ``e_i -+ e_j``.
    """

    kind: Kind
    m: int
    positive_roots: np.ndarray = field(repr=False)
    orbit: np.ndarray = field(repr=False)
    simple_roots: np.ndarray = field(repr=False)

    @property
    def roots(self) -> np.ndarray:
        return np.concatenate([self.positive_roots, -self.positive_roots])

    @property
    def n_positive(self) -> int:
        return len(self.positive_roots)

    @property
    def weyl_order(self) -> int:
        f = math.factorial(self.m)
        if self.kind is Kind.A:
            return f
        if self.kind is Kind.B:
            return 2**self.m * f
        return 2 ** (self.m - 1) * f

    def reflect(self, alpha, x) -> np.ndarray:
        alpha = np.asarray(alpha)
        x = np.asarray(x)
        return x - 2 * (x @ alpha) / (alpha @ alpha) * alpha

    def pairings(self, y) -> np.ndarray:
        """``<alpha, y>`` for every positive root; shape ``(..., n_positive)``."""
        return np.asarray(y, dtype=float) @ self.positive_roots.T

    def __hash__(self):
        return hash((self.kind, self.m))

    def __eq__(self, other):
        return isinstance(other, RootSystem) and (self.kind, self.m) == (other.kind, other.m)


def build_root_system(kind, m: int) -> RootSystem:
    """Positive and simple systems for ``kind`` in ambient dimension ``m``.

    Type B is accepted from m = 1 (the rank-one Bessel case), type D from
    m = 2.
    """
    kind = Kind(kind)
    m = int(m)
    if m < 1 or (kind is Kind.D and m < 2):
        raise DomainError(f"dimension m={m} too small for type {kind.value}")
    pos, orb = [], []
    if kind is Kind.B:
        for i in range(m):
            pos.append(_unit(m, i))
            orb.append(0)
    for i in range(m):
        for j in range(i + 1, m):
            pos.append(_unit(m, i) - _unit(m, j))
            orb.append(1)
            if kind is not Kind.A:
                pos.append(_unit(m, i) + _unit(m, j))
                orb.append(1)
    simple = [_unit(m, i) - _unit(m, i + 1) for i in range(m - 1)]
    if kind is Kind.B:
        simple.append(_unit(m, m - 1))
    elif kind is Kind.D:
        simple.append(_unit(m, m - 2) + _unit(m, m - 1))
    arrays = [
        np.array(pos, dtype=np.int64).reshape(-1, m),
        np.array(orb, dtype=np.int64),
        np.array(simple, dtype=np.int64).reshape(-1, m),
    ]
    for a in arrays:
        a.flags.writeable = False
    return RootSystem(kind, m, *arrays)


@dataclass(frozen=True)
class Multiplicity:
    """Multiplicity function: ``k0`` on the short orbit (B only), ``k1`` elsewhere."""

    k1: float = 1.0
    k0: float = 0.0

    def __post_init__(self):
        if not self.k1 > 0:
            raise DomainError(f"k1 must be positive, got {self.k1}")
        if not self.k0 >= 0:
            raise DomainError(f"k0 must be non-negative, got {self.k0}")

    @property
    def alpha(self) -> float:
        """Jack parameter ``1/k1``."""
        return 1.0 / self.k1

    def per_root(self, rs: RootSystem) -> np.ndarray:
        return np.where(rs.orbit == 0, float(self.k0), float(self.k1))

    def gamma(self, rs: RootSystem) -> float:
        m = rs.m
        if rs.kind is Kind.A:
            return m * (m - 1) / 2 * self.k1
        if rs.kind is Kind.B:
            return m * self.k0 + m * (m - 1) * self.k1
        return m * (m - 1) * self.k1


@dataclass(frozen=True)
class WeylElement:
    perm: tuple
    signs: tuple

    @property
    def det(self) -> int:
        return permutation_sign(self.perm) * math.prod(self.signs)

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x)
        return x[..., list(self.perm)] * np.asarray(self.signs)

    def compose(self, other: "WeylElement") -> "WeylElement":
        """Element acting as ``self(other(x))``."""
        perm = tuple(other.perm[p] for p in self.perm)
        signs = tuple(self.signs[i] * other.signs[self.perm[i]] for i in range(len(self.perm)))
        return WeylElement(perm, signs)


def permutation_sign(perm) -> int:
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def iter_weyl_elements(rs: RootSystem) -> Iterator[WeylElement]:
    m = rs.m
    if rs.kind is Kind.A:
        sign_choices = [(1,) * m]
    else:
        sign_choices = list(itertools.product((1, -1), repeat=m))
        if rs.kind is Kind.D:
            sign_choices = [s for s in sign_choices if s.count(-1) % 2 == 0]
    for perm in itertools.permutations(range(m)):
        for signs in sign_choices:
            yield WeylElement(perm, signs)


def weyl_elements(rs: RootSystem) -> list[WeylElement]:
    if rs.m > MAX_ENUM_M:
        raise WeylGroupTooLarge(f"Weyl group enumeration limited to m <= {MAX_ENUM_M}")
    return list(iter_weyl_elements(rs))


def in_chamber(rs: RootSystem, x, rtol: float = 1e-12) -> bool:
    """Strict membership in the open positive chamber."""
    x = np.asarray(x, dtype=float)
    if x.shape != (rs.m,):
        raise DomainError(f"expected a point of dimension {rs.m}, got shape {x.shape}")
    if len(rs.simple_roots) == 0:
        return True
    tol = rtol * float(np.linalg.norm(x))
    return bool(np.all(x @ rs.simple_roots.T > tol))


def require_chamber(rs: RootSystem, x, name: str = "point") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not in_chamber(rs, x):
        raise ChamberError(f"{name} {x.tolist()} is not in the open {rs.kind.value}{rs.m} chamber")
    return x


def omega_k(rs: RootSystem, mult: Multiplicity, y, signed: bool = True) -> np.ndarray | float:
    """``prod_{alpha > 0} <alpha, y>^{k(alpha)}``.

    With ``signed=False`` the absolute pairings are used, which gives the
    W-invariant extension of ``|omega_k|`` to all of R^m.
    """
    pr = rs.pairings(y)
    ks = mult.per_root(rs)
    if signed:
        neg = pr < 0
        nonint = ks != np.round(ks)
        if np.any(neg & nonint):
            raise DomainError("negative root pairing with non-integer multiplicity")
    else:
        pr = np.abs(pr)
    out = np.prod(pr**ks, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def harmonic_h(rs: RootSystem, y) -> np.ndarray | float:
    """Product of all positive-root pairings (alternating under W)."""
    out = np.prod(rs.pairings(y), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def vandermonde(x) -> np.ndarray | float:
    """``prod_{i<j} (x_i - x_j)`` over the last axis."""
    x = np.asarray(x, dtype=float)
    m = x.shape[-1]
    out = np.ones(x.shape[:-1])
    for i in range(m):
        for j in range(i + 1, m):
            out = out * (x[..., i] - x[..., j])
    return float(out) if np.ndim(out) == 0 else out
