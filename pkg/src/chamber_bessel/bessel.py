"""Generalized Bessel functions of types A, B and D.

All three are normalized so that ``J(0, y) = 1``:

* A: ``0F0^(1/k1)(x, y)``
* B: ``0F1^(1/k1)(k0 + (m-1) k1 + 1/2; x^2/2, y^2/2)``
* D: ``0F1^(1/k1)(q - 1/2; x^2/2, y^2/2)
  + c_m(k1) prod(x_i y_i) 0F1^(1/k1)(q + 1/2; x^2/2, y^2/2)`` with
  ``q = 1 + (m-1) k1`` and ``c_m(k) = prod_{j<m} 1/(2jk + 1)``.

The D coefficient ``c_m`` is fixed by the parity-odd part of the function:
it equals ``2^-m / (q - 1/2)_{(1^m)}`` and is checked against the
determinant kernel at k1 = 1 and against type A_3 for m = 3.  The
alternative ``2^-m`` is available as ``d_constant="printed"`` for
comparison only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .hyperseries import DEFAULT_POLICY, TruncationPolicy, bessel_prefactor_args, mv_series_batch
from .rootsys import Kind, Multiplicity, RootSystem, build_root_system


@dataclass(frozen=True)
class BesselSpec:
    rs: RootSystem
    mult: Multiplicity

    def __post_init__(self):
        if self.rs.kind is Kind.D and self.rs.m < 2:
            raise DomainError("type D needs m >= 2")
        if self.rs.kind is not Kind.B and self.mult.k0 != 0:
            raise DomainError(f"k0 only applies to type B, got k0={self.mult.k0}")

    @property
    def alpha(self) -> float:
        return self.mult.alpha

    @property
    def q(self) -> float:
        return 1.0 + (self.rs.m - 1) * self.mult.k1


@dataclass(frozen=True)
class BesselResult:
    value: np.ndarray | float
    layers_used: int
    converged: np.ndarray | bool


def d_coefficient(m: int, k1: float, d_constant: str = "verified") -> float:
    """Coefficient of ``prod(x_i y_i)`` in the type-D function."""
    if d_constant == "verified":
        return 1.0 / math.prod(2 * j * k1 + 1 for j in range(m))
    if d_constant == "printed":
        return 2.0**-m
    raise ValueError(f"unknown d_constant {d_constant!r}")


def _pairs(x, y, m: int | None = None):
    X = np.asarray(x, dtype=float)
    Y = np.asarray(y, dtype=float)
    single = X.ndim == 1
    X, Y = np.atleast_2d(X), np.atleast_2d(Y)
    if X.shape != Y.shape:
        raise DomainError(f"x and y shapes differ: {X.shape} vs {Y.shape}")
    if m is not None and X.shape[1] != m:
        raise DomainError(f"expected points of dimension {m}, got {X.shape[1]}")
    return X, Y, single


def _out(res: BesselResult, single: bool) -> BesselResult:
    if single:
        return BesselResult(float(res.value[0]), res.layers_used, bool(res.converged[0]))
    return res


def _type_a(X, Y, k1, policy):
    r = mv_series_batch((), (), 1.0 / k1, X, Y, policy)
    return BesselResult(r.value, r.layers_used, r.converged)


def _type_b(X, Y, k0, k1, policy):
    m = X.shape[1]
    a, b = bessel_prefactor_args(X, Y)
    r = mv_series_batch((), (k0 + (m - 1) * k1 + 0.5,), 1.0 / k1, a, b, policy)
    return BesselResult(r.value, r.layers_used, r.converged)


def _type_d(X, Y, k1, policy, d_constant):
    m = X.shape[1]
    q = 1.0 + (m - 1) * k1
    a, b = bessel_prefactor_args(X, Y)
    even = mv_series_batch((), (q - 0.5,), 1.0 / k1, a, b, policy)
    odd = mv_series_batch((), (q + 0.5,), 1.0 / k1, a, b, policy)
    prod = np.prod(X * Y, axis=1)
    value = even.value + d_coefficient(m, k1, d_constant) * prod * odd.value
    return BesselResult(value, max(even.layers_used, odd.layers_used), even.converged & odd.converged)


def generalized_bessel(spec: BesselSpec, x, y, policy: TruncationPolicy = DEFAULT_POLICY,
                       d_constant: str = "verified") -> BesselResult:
    """Bessel function of ``spec`` with truncation diagnostics.

    ``x`` and ``y`` may be single points or ``(npts, m)`` batches.
    """
    X, Y, single = _pairs(x, y, spec.rs.m)
    k1 = spec.mult.k1
    if spec.rs.kind is Kind.A:
        res = _type_a(X, Y, k1, policy)
    elif spec.rs.kind is Kind.B:
        res = _type_b(X, Y, spec.mult.k0, k1, policy)
    else:
        res = _type_d(X, Y, k1, policy, d_constant)
    return _out(res, single)


def bessel_A(x, y, k1: float, policy: TruncationPolicy = DEFAULT_POLICY):
    m = np.shape(x)[-1]
    return generalized_bessel(BesselSpec(build_root_system("A", m), Multiplicity(k1)), x, y, policy).value


def bessel_B(x, y, k0: float, k1: float, policy: TruncationPolicy = DEFAULT_POLICY):
    m = np.shape(x)[-1]
    spec = BesselSpec(build_root_system("B", m), Multiplicity(k1, k0))
    return generalized_bessel(spec, x, y, policy).value


def bessel_D(x, y, k1: float, policy: TruncationPolicy = DEFAULT_POLICY, d_constant: str = "verified"):
    m = np.shape(x)[-1]
    spec = BesselSpec(build_root_system("D", m), Multiplicity(k1))
    return generalized_bessel(spec, x, y, policy, d_constant).value


def shift_decomposition_check(x, y, k1: float, policy: TruncationPolicy = DEFAULT_POLICY,
                              shift_constant: float | None = None):
    """``J_D - [J_B(k0=0) + prod(x_i y_i) / C * J_B(k0=1)]``.

    ``C`` defaults to ``2^m``.  Both sides share ``policy``, so truncation
    error cancels and any residual reflects the constant alone.
    """
    X, Y, single = _pairs(x, y)
    m = X.shape[1]
    C = 2.0**m if shift_constant is None else float(shift_constant)
    d = bessel_D(X, Y, k1, policy)
    b0 = bessel_B(X, Y, 0.0, k1, policy)
    b1 = bessel_B(X, Y, 1.0, k1, policy)
    res = d - (b0 + np.prod(X * Y, axis=1) / C * b1)
    return float(res[0]) if single else res


def verified_shift_constant(m: int, k1: float) -> float:
    """``prod_{j<m} (2jk1 + 1)``: the value of ``C`` that makes the shift residual vanish."""
    return 1.0 / d_coefficient(m, k1)


def symmetrization_check(x, y, k1: float, policy: TruncationPolicy = DEFAULT_POLICY,
                         d_constant: str = "verified"):
    """``(J_D(x, y) + J_D(x, s y)) / 2 - J_B(x, y; k0=0)`` with ``s`` flipping ``y_m``."""
    X, Y, single = _pairs(x, y)
    Ys = Y.copy()
    Ys[:, -1] = -Ys[:, -1]
    d1 = bessel_D(X, Y, k1, policy, d_constant)
    d2 = bessel_D(X, Ys, k1, policy, d_constant)
    res = 0.5 * (d1 + d2) - bessel_B(X, Y, 0.0, k1, policy)
    return float(res[0]) if single else res
