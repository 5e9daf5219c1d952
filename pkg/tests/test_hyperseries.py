import math

import numpy as np
import pytest
from scipy.special import hyp0f1 as scipy_hyp0f1

from chamber_bessel.errors import PochhammerPoleError
from chamber_bessel.hyperseries import (TruncationPolicy, bessel_prefactor_args, hyp0f0, hyp0f1, mv_series,
                                        mv_series_batch, uni_0F1)


def test_uni_examples():
    assert uni_0F1(2.3, 0.0) == 1.0
    assert uni_0F1(0.5, 1.0) == pytest.approx(math.cosh(2.0), rel=1e-15)
    assert uni_0F1(1.5, 1.0) == pytest.approx(math.sinh(2.0) / 2, rel=1e-15)


def test_uni_against_scipy():
    rng = np.random.default_rng(0)
    for b, z in zip(rng.uniform(0.2, 6, 60), rng.uniform(-8, 12, 60)):
        assert uni_0F1(b, z) == pytest.approx(float(scipy_hyp0f1(b, z)), rel=1e-12)


def test_uni_vectorized_and_pole():
    z = np.array([0.0, 0.5, 2.0])
    assert np.allclose(uni_0F1(1.5, z), [uni_0F1(1.5, v) for v in z], rtol=1e-15)
    for b in (0.0, -1.0, -3.0):
        with pytest.raises(PochhammerPoleError):
            uni_0F1(b, 1.0)


def test_prefactor_args():
    a, b = bessel_prefactor_args(np.array([1.0, 2.0]), np.array([0.0, 0.0]))
    assert np.allclose(a, [0.5, 2.0]) and np.allclose(b, [0, 0])
    a, _ = bessel_prefactor_args(np.array([2.0, 2.0]), np.zeros(2), t=2.0)
    assert np.allclose(a, [1, 1])


def test_zero_argument():
    r = hyp0f0(1.7, np.array([0.3, -0.4, 1.2]), np.zeros(3))
    assert r.value == 1.0 and r.converged


def test_rank_one_reduction():
    rng = np.random.default_rng(1)
    for _ in range(50):
        b, u, v = rng.uniform(0.3, 4), rng.uniform(-2, 2), rng.uniform(-2, 2)
        for alpha in (0.5, 2.0):
            r = hyp0f1(b, alpha, np.array([u]), np.array([v]))
            assert r.value == pytest.approx(uni_0F1(b, u * v), rel=1e-12)


def test_collapse_to_exponential():
    x = np.array([0.7, -0.2, 0.4])
    for alpha in (0.5, 1.0, 3.0):
        for t in (0.5, 1.5):
            r = hyp0f0(alpha, x, t * np.ones(3))
            assert r.converged
            assert r.value == pytest.approx(math.exp(t * x.sum()), rel=1e-12)


def test_symmetry_exact():
    rng = np.random.default_rng(2)
    x, y = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
    assert hyp0f1(2.2, 0.8, x, y).value == hyp0f1(2.2, 0.8, y, x).value
    assert hyp0f0(1.3, x, y).value == hyp0f0(1.3, y, x).value


def test_layer_reuse_within_heuristic():
    rng = np.random.default_rng(3)
    X = rng.uniform(-1.5, 1.5, (20, 2))
    Y = rng.uniform(-1.5, 1.5, (20, 2))
    a = mv_series_batch((), (1.7,), 0.6, X, Y, TruncationPolicy(max_weight=20, abs_floor=1e-300))
    b = mv_series_batch((), (1.7,), 0.6, X, Y, TruncationPolicy(max_weight=24, abs_floor=1e-300))
    assert np.all(np.abs(a.value - b.value) <= 2 * a.last_layer_magnitude + 1e-15 * np.abs(b.value))


def test_sum_zero_argument_does_not_stop_early():
    # C_(1) vanishes on sum-zero vectors, so the weight-1 layer is zero
    x = np.array([1.0, -1.0])
    r = hyp0f0(1.0, x, x)
    assert r.layers_used > 3
    # at alpha = 1: det[exp(x_i y_j)] / (V(x) V(y))
    ref = (math.exp(2.0) - math.exp(-2.0)) / (2.0 * 2.0)
    assert r.value == pytest.approx(ref, rel=1e-12)


def test_truncation_flag():
    r = hyp0f0(1.0, np.array([3.0, 2.0]), np.array([3.0, 2.5]), TruncationPolicy(max_weight=5))
    assert not r.converged and r.layers_used == 6


def test_pole_in_denominator():
    with pytest.raises(PochhammerPoleError):
        mv_series((), (-1.0,), 1.0, np.array([0.1, 0.2]), np.array([0.3, 0.4]))
