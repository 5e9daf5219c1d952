"""Transition densities of radial Dunkl processes and reflection heat kernels.

The density with respect to Lebesgue measure on the chamber ``C`` is

    p_t(x, y) = exp(-(|x|^2 + |y|^2) / 2t) J(x/sqrt(t), y/sqrt(t)) w(y)^2
                / (c_k t^(gamma + m/2))

with ``J`` the generalized Bessel function normalized by ``J(0, .) = 1``
and ``w = omega_k``.  Then ``c_k = int_C exp(-|y|^2/2) w(y)^2 dy``, which
is computed by quadrature and checked for consistency at interior probes.

At k = 1 the density is the Brownian motion killed at the chamber walls
and h-transformed, i.e. an alternating sum of Gaussians over the Weyl group.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_genlaguerre, roots_hermite

from .bessel import BesselSpec, generalized_bessel
from .errors import DomainError, NormalizationError
from .hyperseries import DEFAULT_POLICY, TruncationPolicy
from .rootsys import (
    Kind,
    Multiplicity,
    RootSystem,
    harmonic_h,
    omega_k,
    require_chamber,
    vandermonde,
    weyl_elements,
)

NORMALIZATION_RTOL = 1e-3
MAX_QUAD_M = 3


def heat_kernel_N(t: float, m: int, v):
    """``(2 pi t)^(-m/2) exp(-|v|^2 / 2t)`` over the last axis of ``v``."""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    v = np.asarray(v, dtype=float)
    if v.shape[-1:] != (m,) and not (m == 1 and v.ndim == 0):
        raise DomainError(f"expected vectors of dimension {m}, got shape {v.shape}")
    sq = np.sum(v * v, axis=-1) if v.ndim else v * v
    out = (2.0 * math.pi * t) ** (-m / 2) * np.exp(-sq / (2.0 * t))
    return float(out) if np.ndim(out) == 0 else out


def _n1(t: float, d):
    return np.exp(-d * d / (2.0 * t)) / math.sqrt(2.0 * math.pi * t)


def _points(rs: RootSystem, t: float, x, y):
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    return require_chamber(rs, x, "x"), require_chamber(rs, y, "y")


def grabiner_generic(rs: RootSystem, t: float, x, y) -> float:
    """``h(y)/h(x) sum_w det(w) N_t(w y - x)`` over the enumerated Weyl group."""
    x, y = _points(rs, t, x, y)
    ws = weyl_elements(rs)
    dets = np.array([w.det for w in ws], dtype=float)
    wy = np.stack([w.apply(y) for w in ws])
    terms = dets * heat_kernel_N(t, rs.m, wy - x)
    return math.fsum(terms) * harmonic_h(rs, y) / harmonic_h(rs, x)


def grabiner_A(t: float, x, y) -> float:
    """``V(y)/V(x) det[N_t(y_j - x_i)]``."""
    x = np.asarray(x, dtype=float)
    rs = _rs("A", len(x))
    x, y = _points(rs, t, x, y)
    M = _n1(t, y[None, :] - x[:, None])
    return float(np.linalg.det(M)) * vandermonde(y) / vandermonde(x)


def grabiner_B(t: float, x, y) -> float:
    """``h(y)/h(x) det[N_t(y_j - x_i) - N_t(y_j + x_i)]``, ``h = V(y^2) prod y_i``."""
    x = np.asarray(x, dtype=float)
    rs = _rs("B", len(x))
    x, y = _points(rs, t, x, y)
    M = _n1(t, y[None, :] - x[:, None]) - _n1(t, y[None, :] + x[:, None])
    return float(np.linalg.det(M)) * harmonic_h(rs, y) / harmonic_h(rs, x)


def grabiner_D(t: float, x, y) -> float:
    """``V(y^2)/V(x^2) (det[N_t(y_j-x_i) - N_t(y_j+x_i)] + det[... + ...]) / 2``."""
    x = np.asarray(x, dtype=float)
    rs = _rs("D", len(x))
    x, y = _points(rs, t, x, y)
    a = _n1(t, y[None, :] - x[:, None])
    b = _n1(t, y[None, :] + x[:, None])
    s = np.linalg.det(a - b) + np.linalg.det(a + b)
    return 0.5 * float(s) * vandermonde(y * y) / vandermonde(x * x)


def grabiner_D_hyperbolic(t: float, x, y) -> float:
    """Type-D kernel through ``det sinh(x_i y_j / t) + det cosh(x_i y_j / t)``."""
    x = np.asarray(x, dtype=float)
    rs = _rs("D", len(x))
    x, y = _points(rs, t, x, y)
    m = len(x)
    z = np.outer(x, y) / t
    dets = np.linalg.det(np.sinh(z)) + np.linalg.det(np.cosh(z))
    pref = (2.0 * math.pi * t) ** (-m / 2) * 2.0 ** (m - 1) * math.exp(-(x @ x + y @ y) / (2.0 * t))
    return pref * float(dets) * vandermonde(y * y) / vandermonde(x * x)


@lru_cache(maxsize=None)
def _rs(kind: str, m: int) -> RootSystem:
    from .rootsys import build_root_system

    return build_root_system(kind, m)


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Hermite tensor rule.

    Nodes are ``sqrt(2) * scale * u`` for Hermite nodes ``u``; the rule is
    exact for ``poly(y) * exp(-|y|^2 / (2 scale^2))``.  ``symmetrize``
    integrates a W-invariant integrand over R^m and divides by |W|
    (evaluated once per orbit); otherwise nodes are restricted to the open
    chamber by indicator.  Nodes whose Hermite weight is below
    ``prune * max weight`` are dropped.
    """

    order: int = 60
    scale: float = 1.0
    symmetrize: bool = True
    prune: float = 1e-22

    def __post_init__(self):
        if self.order < 1 or not self.scale > 0:
            raise DomainError("quadrature needs order >= 1 and scale > 0")


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class QuadratureResult:
    estimate: float
    n_nodes: int


def _canonical(rs: RootSystem, Y: np.ndarray) -> np.ndarray:
    """Representative of each W-orbit in the closed chamber."""
    if rs.kind is Kind.A:
        return -np.sort(-Y, axis=1)
    Z = -np.sort(-np.abs(Y), axis=1)
    if rs.kind is Kind.D:
        neg = np.prod(np.sign(Y), axis=1) < 0
        Z[neg, -1] = -Z[neg, -1]
    return Z


def _is_int(k: float) -> bool:
    return float(k) == round(float(k))


def _axis_plan(rs: RootSystem, mult: Multiplicity | None):
    """Orthogonal frame ``y = Q z`` and per-axis exponents ``mu`` so that the
    non-polynomial part of ``omega_k(y)^2`` is ``prod |z_j|^(2 mu_j)``.

    Returns ``None`` when no such product structure exists (three or more
    dimensions with non-integer multiplicities); integer multiplicities need
    no special treatment since the weight is then polynomial.
    """
    m = rs.m
    ident = (np.eye(m), (0.0,) * m)
    if mult is None:
        return ident
    k0, k1 = float(mult.k0), float(mult.k1)
    mu1 = 0.0 if _is_int(k1) else k1
    mu0 = 0.0 if _is_int(k0) else k0
    if rs.kind is Kind.B and m == 1:
        return np.eye(1), (mu0,)
    if rs.kind is Kind.A and m == 1:
        return ident
    if m == 2:
        rot = np.array([[1.0, 1.0], [-1.0, 1.0]]) / math.sqrt(2.0)
        if rs.kind is Kind.A:
            return rot, (mu1, 0.0)
        if rs.kind is Kind.D:
            return rot, (mu1, mu1)
        if mu1 == 0.0:
            return np.eye(2), (mu0, mu0)
        if mu0 == 0.0:
            return rot, (mu1, mu1)
        return None
    if mu0 == 0.0 and mu1 == 0.0:
        return ident
    return None


@lru_cache(maxsize=None)
def _rule_1d(order: int, mu: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``u`` and weights for ``int |u|^(2 mu) exp(-u^2) g(u) du``."""
    if mu == 0.0:
        return roots_hermite(order)
    p = (order + 1) // 2
    v, w = roots_genlaguerre(p, mu - 0.5)
    r = np.sqrt(v)
    return np.concatenate([-r[::-1], r]), np.concatenate([w[::-1], w]) / 2.0


@lru_cache(maxsize=64)
def _nodes(rs: RootSystem, spec: QuadratureSpec, mkey) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on R^m (``int f dy ~ sum w f``), folded or restricted."""
    m = rs.m
    if m > MAX_QUAD_M:
        raise DomainError(f"tensor quadrature limited to m <= {MAX_QUAD_M}")
    plan = _axis_plan(rs, None if mkey is None else Multiplicity(*mkey))
    if plan is None:
        plan = _axis_plan(rs, None)
    Q, mus = plan
    rules = [_rule_1d(spec.order, mu) for mu in mus]
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)
    wgrids = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    W = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    keep = W >= spec.prune * W.max()
    U, W = U[keep], W[keep]
    c = math.sqrt(2.0) * spec.scale
    # divide out the rule weight |u|^(2 mu) exp(-u^2) so that sum(W f) ~ int f
    W = W * np.exp(np.sum(U * U, axis=1)) * c**m
    for j, mu in enumerate(mus):
        if mu:
            W = W / np.abs(U[:, j]) ** (2 * mu)
    Y = (c * U) @ Q.T
    if spec.symmetrize:
        Z = np.round(_canonical(rs, Y), 12)
        reps, inv = np.unique(Z, axis=0, return_inverse=True)
        Wr = np.bincount(inv.ravel(), weights=W) / rs.weyl_order
        return reps, Wr
    # indicator restriction; a node on a wall counts half per wall it touches
    pr = Y @ rs.simple_roots.T
    tol = 1e-12 * max(1.0, float(np.max(np.abs(Y))))
    frac = np.prod(np.where(pr > tol, 1.0, np.where(pr >= -tol, 0.5, 0.0)), axis=1)
    keep = frac > 0
    return Y[keep], W[keep] * frac[keep]


def integrate_chamber(f, rs: RootSystem, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                      mult: Multiplicity | None = None) -> QuadratureResult:
    """``int_C f(y) dy`` for ``f`` mapping ``(npts, m)`` arrays to ``(npts,)``.

    With ``spec.symmetrize`` the integrand must be W-invariant; it is then
    evaluated only on closed-chamber orbit representatives.  Passing the
    multiplicity whose ``omega_k^2`` appears in ``f`` lets the rule absorb
    the non-smooth wall factors (m <= 2, or integer multiplicities).
    """
    mkey = None if mult is None else (float(mult.k1), float(mult.k0))
    Y, W = _nodes(rs, spec, mkey)
    vals = np.asarray(f(Y), dtype=float)
    return QuadratureResult(math.fsum(W * vals), len(Y))


# ---------------------------------------------------------------------------
# densities


@dataclass(frozen=True)
class NormalizationConstant:
    rs: RootSystem
    mult: Multiplicity
    c_k: float
    estimate_error: float
    probe_residuals: tuple = field(default=())


def chamber_probe(rs: RootSystem, radius: float = 1.0) -> np.ndarray:
    """A fixed interior point of norm ``radius``."""
    p = np.arange(rs.m, 0, -1, dtype=float) - 0.5
    return radius * p / np.linalg.norm(p)


def _weight_sq(rs: RootSystem, mult: Multiplicity, Y):
    return omega_k(rs, mult, Y, signed=False) ** 2


def _c_key(rs, mult, spec, policy):
    return (rs.kind, rs.m, float(mult.k1), float(mult.k0), spec, policy)


_C_CACHE: dict = {}


def normalization_c(rs: RootSystem, mult: Multiplicity, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                    policy: TruncationPolicy = DEFAULT_POLICY, probe_radii=(0.6, 1.2)) -> NormalizationConstant:
    """``c_k`` from the origin, then mass-one checks at interior probes.

    Raises :class:`NormalizationError` when a probe's total mass differs
    from one by more than 1e-3.
    """
    key = _c_key(rs, mult, spec, policy)
    if key in _C_CACHE:
        return _C_CACHE[key]
    if rs.kind is not Kind.B and mult.k0 != 0:
        raise DomainError("k0 only applies to type B")
    c = integrate_chamber(lambda Y: np.exp(-0.5 * np.sum(Y * Y, axis=1)) * _weight_sq(rs, mult, Y), rs, spec, mult).estimate
    if not c > 0:
        raise NormalizationError(f"non-positive normalization integral {c}")
    residuals = []
    for r in probe_radii:
        x = chamber_probe(rs, r)
        mass = integrate_chamber(lambda Y: density_batch(rs, mult, 1.0, x, Y, c, policy), rs, spec, mult).estimate
        residuals.append(mass - 1.0)
    err = max((abs(v) for v in residuals), default=0.0)
    if err > NORMALIZATION_RTOL:
        raise NormalizationError(f"{rs.kind.value}{rs.m} k={mult}: probe masses off by {err:.3g}")
    out = NormalizationConstant(rs, mult, c, err, tuple(residuals))
    _C_CACHE[key] = out
    return out


@dataclass(frozen=True)
class DensityQuery:
    rs: RootSystem
    mult: Multiplicity
    t: float
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError(f"t must be positive, got {self.t}")
        object.__setattr__(self, "x", require_chamber(self.rs, self.x, "x"))
        object.__setattr__(self, "y", require_chamber(self.rs, self.y, "y"))


def density_batch(rs: RootSystem, mult: Multiplicity, t: float, x, Y, c_k: float,
                  policy: TruncationPolicy = DEFAULT_POLICY):
    """Unchecked density at one start ``x`` and many targets ``Y``.

    Uses absolute root pairings, so it is the W-invariant extension in
    ``y`` and may be evaluated off the chamber (quadrature folding).
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    x = np.asarray(x, dtype=float)
    s = math.sqrt(t)
    X = np.broadcast_to(x, Y.shape)
    J = generalized_bessel(BesselSpec(rs, mult), X / s, Y / s, policy).value
    gamma = mult.gamma(rs)
    sq = (x @ x + np.sum(Y * Y, axis=1)) / (2.0 * t)
    return np.exp(-sq) * J * _weight_sq(rs, mult, Y) / (c_k * t ** (gamma + rs.m / 2))


def density(query: DensityQuery, spec: QuadratureSpec = DEFAULT_QUADRATURE,
            policy: TruncationPolicy = DEFAULT_POLICY, c_k: float | None = None) -> float:
    """Transition density ``p_t(x, y)``; ``c_k`` is computed (and cached) if absent."""
    if c_k is None:
        c_k = normalization_c(query.rs, query.mult, spec, policy).c_k
    return float(density_batch(query.rs, query.mult, query.t, query.x, query.y[None], c_k, policy)[0])


def mehta_constant(rs: RootSystem, mult: Multiplicity) -> float:
    """Closed-form ``c_k`` for type A: ``(2 pi)^(m/2) prod_j Gamma(1+jk)/Gamma(1+k) / m!``.

    Used as an independent check of the quadrature.
    """
    if rs.kind is not Kind.A:
        raise DomainError("closed form implemented for type A only")
    m, k = rs.m, mult.k1
    val = (2 * math.pi) ** (m / 2)
    for j in range(1, m + 1):
        val *= math.gamma(1 + j * k) / math.gamma(1 + k)
    return val / math.factorial(m)
