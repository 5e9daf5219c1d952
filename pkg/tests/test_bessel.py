import math

import numpy as np
import pytest

from chamber_bessel.bessel import (bessel_A, bessel_B, bessel_D, d_coefficient, shift_decomposition_check,
                                   symmetrization_check, verified_shift_constant)
from chamber_bessel.detrep import f00_det
from chamber_bessel.hyperseries import TruncationPolicy, uni_0F1
from chamber_bessel.rootsys import build_root_system, weyl_elements

POL = TruncationPolicy(max_weight=40)


def test_rank_one_closed_forms():
    x, y = np.array([0.8]), np.array([1.3])
    assert bessel_A(x, y, 1.3) == pytest.approx(math.exp(1.04), rel=1e-13)
    assert bessel_B(x, y, 1.0, 1.0) == pytest.approx(math.sinh(1.04) / 1.04, rel=1e-13)
    assert bessel_B(x, y, 0.0, 1.0) == pytest.approx(math.cosh(1.04), rel=1e-13)


def test_value_at_origin():
    x = np.array([0.9, 0.4, -0.2])
    assert bessel_A(x, np.zeros(3), 0.7) == 1.0
    assert bessel_B(np.zeros(3), x, 0.4, 0.7) == 1.0
    assert bessel_D(x, np.zeros(3), 0.7) == 1.0


def test_A_alpha_one_is_determinant():
    x, y = np.array([1.1, 0.3]), np.array([0.9, -0.5])
    assert bessel_A(x, y, 1.0) == pytest.approx(f00_det(x, y), rel=1e-10)


def test_D2_factorizes_into_two_rank_one_functions():
    # D_2 = A_1 x A_1 in the coordinates (x1 - x2, x1 + x2) / sqrt(2)
    rng = np.random.default_rng(7)
    for k in (0.3, 0.5, 1.0, 2.0):
        x, y = rng.uniform(-1.5, 1.5, 2), rng.uniform(-1.5, 1.5, 2)
        u1 = (x[0] - x[1]) * (y[0] - y[1]) / 2
        u2 = (x[0] + x[1]) * (y[0] + y[1]) / 2
        ref = uni_0F1(k + 0.5, u1**2 / 4) * uni_0F1(k + 0.5, u2**2 / 4)
        assert bessel_D(x, y, k, POL) == pytest.approx(ref, rel=1e-12)


def _a3_frame(x):
    # isometry of R^3 onto the sum-zero hyperplane of R^4 carrying D_3 roots to A_3 roots
    x1, x2, x3 = x
    return 0.5 * np.array([x1 + x2 + x3, x1 - x2 - x3, -x1 + x2 - x3, -x1 - x2 + x3])


@pytest.mark.parametrize("k", [0.3, 0.5, 1.0, 2.0])
def test_D3_equals_A3(k):
    rng = np.random.default_rng(8)
    for _ in range(4):
        x, y = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
        ref = bessel_A(_a3_frame(x), _a3_frame(y), k)
        assert bessel_D(x, y, k) == pytest.approx(ref, rel=1e-12)


def test_printed_constant_disagrees_with_A3():
    x, y = np.array([1.1, 0.6, 0.3]), np.array([1.0, 0.7, -0.4])
    ref = bessel_A(_a3_frame(x), _a3_frame(y), 0.5)
    assert abs(bessel_D(x, y, 0.5, d_constant="printed") / ref - 1) > 1e-4


def test_d_coefficient():
    assert d_coefficient(2, 1.0) == pytest.approx(1 / 3)
    assert d_coefficient(3, 0.5) == pytest.approx(1 / 6)
    assert d_coefficient(3, 1.0, "printed") == 0.125
    assert verified_shift_constant(3, 1.0) == pytest.approx(15.0)


def test_D_parity_flip():
    x, y = np.array([1.2, 0.7, 0.2]), np.array([0.9, 0.5, 0.3])
    ys = y * np.array([1, 1, -1])
    even = 0.5 * (bessel_D(x, y, 0.8) + bessel_D(x, ys, 0.8))
    odd = 0.5 * (bessel_D(x, y, 0.8) - bessel_D(x, ys, 0.8))
    assert even == pytest.approx(bessel_B(x, y, 0.0, 0.8), rel=1e-13)
    assert odd == pytest.approx(d_coefficient(3, 0.8) * np.prod(x * y) * bessel_B(x, y, 1.0, 0.8), rel=1e-12)


@pytest.mark.parametrize("kind,m", [("A", 3), ("A", 4), ("B", 3), ("D", 3), ("D", 4)])
def test_weyl_invariance(kind, m):
    rng = np.random.default_rng(9)
    x, y = rng.uniform(-1, 1, m), rng.uniform(-1, 1, m)
    f = {"A": lambda a, b: bessel_A(a, b, 0.6),
         "B": lambda a, b: bessel_B(a, b, 0.4, 0.6),
         "D": lambda a, b: bessel_D(a, b, 0.6)}[kind]
    v = f(x, y)
    for w in weyl_elements(build_root_system(kind, m)):
        assert f(x, w.apply(y)) == pytest.approx(v, rel=1e-12)
        assert f(w.apply(x), y) == pytest.approx(v, rel=1e-12)
    assert f(y, x) == pytest.approx(v, rel=1e-13)


def test_shift_with_verified_constant():
    x, y = np.array([1.0, 0.5]), np.array([1.0, 0.5])
    r = shift_decomposition_check(x, y, 1.0, shift_constant=verified_shift_constant(2, 1.0))
    assert abs(r) <= 1e-8 * bessel_D(x, y, 1.0)
    x3, y3 = np.array([1.1, 0.6, 0.2]), np.array([0.8, 0.4, 0.1])
    r = shift_decomposition_check(x3, y3, 0.5, shift_constant=verified_shift_constant(3, 0.5))
    assert abs(r) <= 1e-8 * bessel_D(x3, y3, 0.5)


def test_shift_at_zero_is_exact():
    assert shift_decomposition_check(np.array([1.0, 0.3]), np.zeros(2), 1.3) == 0.0


def test_symmetrization():
    rng = np.random.default_rng(10)
    x, y = rng.uniform(0, 1.5, 2), rng.uniform(0, 1.5, 2)
    assert abs(symmetrization_check(x, y, 2.0)) <= 1e-12 * bessel_B(x, y, 0.0, 2.0)
    y0 = np.array([0.9, 0.0])
    assert bessel_D(x, y0, 2.0) == pytest.approx(bessel_B(x, y0, 0.0, 2.0), rel=1e-15)


def test_batch_matches_pointwise():
    rng = np.random.default_rng(11)
    X, Y = rng.uniform(-1, 1, (6, 3)), rng.uniform(-1, 1, (6, 3))
    batch = bessel_D(X, Y, 0.7)
    assert np.allclose(batch, [bessel_D(a, b, 0.7) for a, b in zip(X, Y)], rtol=1e-14, atol=0)
