"""Hypergeometric series of two vector arguments in Jack polynomials.

    pFq^(alpha)(a; b; x, y) = sum_n sum_{|tau|=n}
        prod (a_i)_tau / prod (b_j)_tau * C_tau(x) C_tau(y) / (C_tau(1^m) n!)

The sum is truncated by weight and accumulated layer by layer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._summation import Neumaier
from .errors import DomainError, PochhammerPoleError
from .jack import alpha_key, get_table
from .partitions import gen_pochhammer


@dataclass(frozen=True)
class TruncationPolicy:
    """Weight cutoff and the early-stop heuristic.

    A layer passes the tail test when its magnitude has dropped by more
    than ``tail_ratio`` relative to the previous layer and is below
    ``abs_floor * max(1, |partial sum|)``.  Summation stops after two
    consecutive passing layers; a single vanishing layer (e.g. weight 1 at
    a sum-zero point) is not enough.
    """

    max_weight: int = 30
    tail_ratio: float = 0.5
    abs_floor: float = 1e-14

    def __post_init__(self):
        if self.max_weight < 0:
            raise DomainError("max_weight must be non-negative")
        if not (self.tail_ratio > 0 and self.abs_floor > 0):
            raise DomainError("tail_ratio and abs_floor must be positive")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class SeriesResult:
    value: float
    last_layer_magnitude: float
    layers_used: int
    converged: bool


@dataclass(frozen=True)
class BatchSeriesResult:
    """Vectorized counterpart of :class:`SeriesResult` (arrays over points)."""

    value: np.ndarray
    last_layer_magnitude: np.ndarray
    layers_used: int
    converged: np.ndarray

    def __getitem__(self, i) -> SeriesResult:
        return SeriesResult(float(self.value[i]), float(self.last_layer_magnitude[i]),
                            self.layers_used, bool(self.converged[i]))


def _check_b(b):
    if b <= 0 and float(b) == round(float(b)):
        raise PochhammerPoleError(f"0F1 parameter {b} is a non-positive integer")


def uni_0F1(b: float, z):
    """Scalar series ``sum_n z^n / ((b)_n n!)``, elementwise over ``z``.

    ``b = 1/2`` and ``b = 3/2`` with ``z >= 0`` use the cosh / sinh closed
    forms; everything else runs the term recursion until terms fall below
    1e-17 of the sum.
    """
    _check_b(b)
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    flat, res = z.ravel(), out.ravel()
    for i, zi in enumerate(flat):
        res[i] = _uni_0F1_scalar(float(b), float(zi))
    return float(out) if out.ndim == 0 else out


def _uni_0F1_scalar(b: float, z: float) -> float:
    if z == 0.0:
        return 1.0
    if z > 0 and b == 0.5:
        return math.cosh(2.0 * math.sqrt(z))
    if z > 0 and b == 1.5:
        s = 2.0 * math.sqrt(z)
        return math.sinh(s) / s
    acc = Neumaier()
    term, n = 1.0, 0
    acc.add(term)
    while True:
        term *= z / ((b + n) * (n + 1))
        n += 1
        acc.add(term)
        # terms only decrease once n exceeds |z| / |b + n|
        if abs(term) <= 1e-17 * abs(acc.value) and n * abs(b + n) > abs(z):
            return acc.value
        if n > 100000:
            raise RuntimeError("0F1 series failed to converge")


def bessel_prefactor_args(x, y, t: float = 1.0):
    """Squared and scaled arguments ``(x**2 / 2t, y**2 / 2t)``."""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x * x / (2.0 * t), y * y / (2.0 * t)


def _weights(table, p_params, q_params, n: int) -> np.ndarray:
    layer = table.layers[n]
    alpha = table.alpha
    w = np.empty(len(layer.partitions))
    fact = math.factorial(n)
    for i, tau in enumerate(layer.partitions):
        num = 1.0
        for a in p_params:
            num *= gen_pochhammer(a, tau, alpha, allow_zero=True)
        den = 1.0
        for b in q_params:
            den *= gen_pochhammer(b, tau, alpha)
        w[i] = num / den / (layer.at_ones[i] * fact)
    return w


_WEIGHT_CACHE: dict = {}


def layer_weights(table, p_params: tuple, q_params: tuple, n: int) -> np.ndarray:
    key = (alpha_key(table.alpha), table.m, tuple(map(float, p_params)), tuple(map(float, q_params)), n)
    w = _WEIGHT_CACHE.get(key)
    if w is None:
        w = _weights(table, p_params, q_params, n)
        _WEIGHT_CACHE[key] = w
    return w


def _powers(X: np.ndarray, n: int) -> list[np.ndarray]:
    k = np.arange(n + 1)
    return [X[:, j, None] ** k[None, :] for j in range(X.shape[1])]


def mv_series_batch(p_params, q_params, alpha, X, Y, policy: TruncationPolicy = DEFAULT_POLICY) -> BatchSeriesResult:
    """Evaluate the series at many point pairs; ``X`` and ``Y`` are ``(npts, m)``.

    Early stopping happens only once every point meets the tail test.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape != Y.shape:
        raise DomainError(f"argument shapes differ: {X.shape} vs {Y.shape}")
    npts, m = X.shape
    if not np.all(np.isfinite(X)) or not np.all(np.isfinite(Y)):
        raise DomainError("series arguments must be finite")
    p_params = tuple(p_params)
    q_params = tuple(q_params)
    N = policy.max_weight
    table = get_table(alpha, m, N)
    px, py = _powers(X, N), _powers(Y, N)
    total = Neumaier(npts)
    total.add(np.ones(npts))
    prev = np.ones(npts)
    mag = np.ones(npts)
    done = np.zeros(npts, dtype=bool)
    passed = np.zeros(npts, dtype=bool)
    used = 1
    for n in range(1, N + 1):
        layer = table.layers[n]
        w = layer_weights(table, p_params, q_params, n)
        cx = layer.jacks(X, px)
        cy = layer.jacks(Y, py)
        terms = cx * cy * w[None, :]
        acc = Neumaier(npts)
        for col in range(terms.shape[1]):
            acc.add(terms[:, col])
        lay = np.asarray(acc.value, dtype=float).reshape(npts)
        total.add(lay)
        used = n + 1
        mag = np.abs(lay)
        s = np.abs(np.asarray(total.value, dtype=float).reshape(npts))
        ok = (mag <= policy.tail_ratio * prev) & (mag < policy.abs_floor * np.maximum(1.0, s))
        done = ok & passed
        passed = ok
        prev = mag
        if done.all():
            break
    value = np.asarray(total.value, dtype=float).reshape(npts)
    return BatchSeriesResult(value, mag, used, passed)


def mv_series(p_params, q_params, alpha, x, y, policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesResult:
    """Single-point series value with its truncation diagnostics."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise DomainError(f"x and y must be vectors of equal length, got {x.shape} and {y.shape}")
    return mv_series_batch(p_params, q_params, alpha, x[None], y[None], policy)[0]


def hyp0f0(alpha, x, y, policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesResult:
    return mv_series((), (), alpha, x, y, policy)


def hyp0f1(b, alpha, x, y, policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesResult:
    return mv_series((), (b,), alpha, x, y, policy)
