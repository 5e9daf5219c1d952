import math

import numpy as np
import pytest

from chamber_bessel.errors import ChamberError, DomainError, NormalizationError
from chamber_bessel.kernels import (DensityQuery, QuadratureSpec, chamber_probe, density, grabiner_A, grabiner_B,
                                    grabiner_D, grabiner_D_hyperbolic, grabiner_generic, heat_kernel_N,
                                    integrate_chamber, mehta_constant, normalization_c)
from chamber_bessel.rootsys import Multiplicity, build_root_system


def rs_(kind, m):
    return build_root_system(kind, m)


def test_heat_kernel_examples():
    assert heat_kernel_N(1, 1, 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi))
    assert heat_kernel_N(2, 2, np.zeros(2)) == pytest.approx(1 / (4 * math.pi))
    with pytest.raises(DomainError):
        heat_kernel_N(0, 1, 0.0)


def test_full_space_gaussian_integrates_to_one():
    rs = rs_("A", 2)
    spec = QuadratureSpec(symmetrize=True)
    v = integrate_chamber(lambda Y: heat_kernel_N(1.0, 2, Y), rs, spec).estimate
    assert v == pytest.approx(0.5, rel=1e-12)  # chamber is half the plane
    # indicator variant: the diagonal nodes lie on the wall and count half
    assert integrate_chamber(lambda Y: heat_kernel_N(1.0, 2, Y), rs, QuadratureSpec(symmetrize=False)).estimate \
        == pytest.approx(0.5, rel=1e-12)


def test_grabiner_rank_one():
    t, x, y = 0.7, 0.4, 1.1
    assert grabiner_A(t, [x], [y]) == pytest.approx(heat_kernel_N(t, 1, y - x))
    assert grabiner_generic(rs_("A", 1), t, [x], [y]) == pytest.approx(heat_kernel_N(t, 1, y - x))
    ref = (y / x) * (heat_kernel_N(t, 1, y - x) - heat_kernel_N(t, 1, y + x))
    assert grabiner_B(t, [x], [y]) == pytest.approx(ref, rel=1e-13)


def test_grabiner_A_transpose_identity():
    x, y = np.array([1.3, 0.2]), np.array([0.9, -0.4])
    lhs = grabiner_A(0.8, x, y) * (x[0] - x[1]) ** 2
    rhs = grabiner_A(0.8, y, x) * (y[0] - y[1]) ** 2
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_grabiner_D_forms_agree():
    rng = np.random.default_rng(12)
    for _ in range(10):
        x = np.sort(rng.uniform(0.2, 2.5, 2))[::-1] * np.array([1, rng.choice([-1, 1])])
        y = np.sort(rng.uniform(0.2, 2.5, 2))[::-1]
        if min(x[0] - abs(x[1]), y[0] - abs(y[1])) < 0.2:
            continue
        assert grabiner_D_hyperbolic(1.0, x, y) == pytest.approx(grabiner_D(1.0, x, y), rel=1e-8)


def test_grabiner_positive_on_diagonal_and_boundary():
    x = np.array([1.5, 0.8, 0.3])
    for kind in ("A", "B", "D"):
        f = {"A": grabiner_A, "B": grabiner_B, "D": grabiner_D}[kind]
        assert f(1.0, x, x) > 0
    near = grabiner_B(1.0, x, np.array([1.5, 0.8, 1e-6]))
    assert 0 < near < 1e-5


def test_grabiner_rejects_boundary():
    with pytest.raises(ChamberError):
        grabiner_B(1.0, np.array([1.0, 0.0]), np.array([1.0, 0.5]))
    with pytest.raises(DomainError):
        grabiner_A(1.0, np.array([1.0, 1.0]), np.array([1.0, 0.5]))


def test_normalization_trivial_rank_one():
    nc = normalization_c(rs_("A", 1), Multiplicity(1.0))
    assert nc.c_k == pytest.approx(math.sqrt(2 * math.pi), rel=1e-12)


def test_normalization_B1_half():
    nc = normalization_c(rs_("B", 1), Multiplicity(1.0, 0.5))
    assert nc.estimate_error <= 1e-3
    # int_0^inf e^{-y^2/2} y dy = 1
    assert nc.c_k == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("m,k", [(2, 1.0), (2, 0.5), (2, 2.0), (3, 1.0), (3, 2.0)])
def test_normalization_matches_mehta(m, k):
    rs, mult = rs_("A", m), Multiplicity(k)
    assert normalization_c(rs, mult).c_k == pytest.approx(mehta_constant(rs, mult), rel=1e-10)


def test_known_constants():
    assert normalization_c(rs_("B", 2), Multiplicity(1, 1)).c_k == pytest.approx(3 * math.pi, rel=1e-12)
    assert normalization_c(rs_("D", 2), Multiplicity(1)).c_k == pytest.approx(2 * math.pi, rel=1e-12)


def test_three_dim_noninteger_limitation():
    # plain Gauss-Hermite cannot resolve |<a,y>| kinks in three dimensions
    with pytest.raises(NormalizationError):
        normalization_c(rs_("A", 3), Multiplicity(0.5))


@pytest.mark.parametrize("kind,mult", [("D", Multiplicity(1.0)), ("A", Multiplicity(1.0)),
                                       ("B", Multiplicity(1.0, 1.0))])
def test_density_at_k_one_is_grabiner(kind, mult):
    rs = rs_(kind, 2)
    f = {"A": grabiner_A, "B": grabiner_B, "D": grabiner_D}[kind]
    x, y = np.array([1.3, 0.4]), np.array([0.9, 0.6])
    for t in (0.5, 1.0, 2.0):
        assert density(DensityQuery(rs, mult, t, x, y)) == pytest.approx(f(t, x, y), rel=1e-10)


def test_density_time_scaling():
    rs, mult = rs_("B", 2), Multiplicity(0.7, 1.3)
    x, y, t, s = np.array([1.2, 0.5]), np.array([0.8, 0.3]), 0.6, 2.5
    a = density(DensityQuery(rs, mult, s * t, math.sqrt(s) * x, math.sqrt(s) * y))
    b = density(DensityQuery(rs, mult, t, x, y))
    assert a == pytest.approx(s ** (-rs.m / 2) * b, rel=1e-12)


def test_density_positive_and_vanishes_at_walls():
    for kind, mult in (("A", Multiplicity(1.5)), ("D", Multiplicity(1.0)), ("B", Multiplicity(1.0, 2.0))):
        rs = rs_(kind, 2)
        x = chamber_probe(rs, 1.0)
        wall_dir = rs.simple_roots[0] / np.linalg.norm(rs.simple_roots[0])
        base = chamber_probe(rs, 1.0)
        # walk toward the first wall along its normal
        d0 = float(base @ wall_dir)
        vals = [density(DensityQuery(rs, mult, 1.0, x, base - (1 - e) * d0 * wall_dir)) for e in (0.3, 0.1, 0.03, 0.01)]
        assert all(v > 0 for v in vals)
        assert vals[1] > vals[2] > vals[3]


def test_density_query_validation():
    rs = rs_("A", 2)
    with pytest.raises(ChamberError):
        DensityQuery(rs, Multiplicity(1.0), 1.0, np.array([2.0, 1.0]), np.array([1.0, 2.0]))
    with pytest.raises(DomainError):
        DensityQuery(rs, Multiplicity(1.0), 0.0, np.array([2.0, 1.0]), np.array([2.0, 1.0]))
