"""Identity and oracle checks behind ``chamber-bessel verify``.

Each check function returns a list of :class:`Check` records with the
measured residual and its tolerance.  The same functions drive the
acceptance tests, so the CLI and the test suite measure the same thing.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import detrep
from .bessel import (BesselSpec, bessel_B, bessel_D, generalized_bessel, shift_decomposition_check,
                     symmetrization_check, verified_shift_constant)
from .hyperseries import TruncationPolicy, mv_series_batch
from .jack import apply_eigenoperator, jack_eval, monomial_eval, weight_expansions
from .kernels import (DEFAULT_QUADRATURE, QuadratureSpec, density_batch, grabiner_A, grabiner_B,
                      grabiner_D, grabiner_generic, integrate_chamber, normalization_c)
from .partitions import jack_eigenvalue, operator_eigenvalue
from .rootsys import Kind, Multiplicity, RootSystem, build_root_system, in_chamber, omega_k
from .simulate import SdeConfig, analytic_moments, compare_moments, moment_report, simulate

ALPHAS = (0.5, 1.0, 2.0, 3.0)
SEED = 20240917


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(math.isfinite(self.residual) and self.residual <= self.tolerance)

    def as_dict(self) -> dict:
        return {"name": self.name, "residual": float(self.residual), "tolerance": float(self.tolerance),
                "pass": self.passed}

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name:<48s} residual={self.residual:.3e}  tol={self.tolerance:.1e}"


def _rel(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def random_chamber_points(rs: RootSystem, n: int, rng, low: float = 0.1, high: float = 1.5,
                          min_gap: float = 0.05) -> np.ndarray:
    """``n`` chamber points with coordinates in ``[low, high]`` and pairings ``>= min_gap``.

    Type D points get a random sign on the last coordinate.
    """
    out = []
    while len(out) < n:
        v = np.sort(rng.uniform(low, high, rs.m))[::-1].copy()
        if rs.kind is Kind.D and rng.random() < 0.5:
            v[-1] = -v[-1]
        if np.min(rs.pairings(v), initial=np.inf) >= min_gap and in_chamber(rs, v):
            out.append(v)
    return np.array(out)


# ---------------------------------------------------------------------------
# Jack polynomials


def jack_normalization_checks(alphas=ALPHAS, ms=(1, 2, 3, 4), max_weight: int = 8,
                              n_points: int = 20, seed: int = SEED) -> list[Check]:
    """``sum_{|tau|=n} C_tau(x) = (sum x)^n`` at random points of ``[0.1, 2]^m``."""
    rng = np.random.default_rng(seed)
    checks = []
    for alpha, m in itertools.product(alphas, ms):
        X = rng.uniform(0.1, 2.0, size=(n_points, m))
        worst = 0.0
        for n in range(max_weight + 1):
            total = sum(jack_eval(e, X) for e in weight_expansions(n, alpha, m).values())
            worst = max(worst, _rel(total, X.sum(axis=1) ** n))
        checks.append(Check(f"jack_normalization[alpha={alpha:g},m={m}]", worst, 1e-10))
    return checks


def _rational_point(m: int) -> list:
    return [Fraction(3 + 5 * i, 4 + i) for i in range(m)][::-1]


def jack_eigen_checks(exact: bool = True, eigenvalue: str = "operator", alphas=ALPHAS,
                      ms=None, max_weight: int | None = None) -> list[Check]:
    """Apply the eigenoperator to each ``C_tau`` at rational points.

    ``exact=True`` uses rational coefficients (tolerance 0); otherwise float
    coefficients are evaluated exactly, so only their error shows.
    ``eigenvalue`` selects ``operator_eigenvalue`` or the tabulated
    ``jack_eigenvalue``.
    """
    eig = {"operator": operator_eigenvalue, "tabulated": jack_eigenvalue}[eigenvalue]
    ms = ms or ((1, 2, 3) if exact else (1, 2, 3, 4))
    max_weight = max_weight or (6 if exact else 8)
    tol = 0.0 if exact else 1e-10
    checks = []
    for alpha, m in itertools.product(alphas, ms):
        a = Fraction(alpha) if exact else float(alpha)
        x = _rational_point(m)
        worst = 0.0
        for n in range(1, max_weight + 1):
            for tau, e in weight_expansions(n, a, m).items():
                lam = Fraction(eig(tau, Fraction(alpha), m))
                val = jack_eval(e, x) if exact else sum(Fraction(float(c)) * monomial_eval(mu, x) for mu, c in e.coeffs.items())
                lhs = apply_eigenoperator(e, x)
                worst = max(worst, float(abs(lhs - lam * val) / abs(lam * val)) if lam * val else float(abs(lhs)))
        mode = "exact" if exact else "float"
        checks.append(Check(f"jack_eigen_{mode}_{eigenvalue}[alpha={alpha:g},m={m}]", worst, tol))
    return checks


def schur_bialternant(tau, X: np.ndarray) -> np.ndarray:
    """``det[x_i^(tau_j + m - j)] / det[x_i^(m - j)]`` row-wise."""
    X = np.atleast_2d(X)
    m = X.shape[1]
    lam = list(tau) + [0] * (m - len(tau))
    num = X[:, :, None] ** np.array([lam[j] + m - 1 - j for j in range(m)])[None, None, :]
    den = X[:, :, None] ** np.arange(m - 1, -1, -1)[None, None, :]
    return np.linalg.det(num) / np.linalg.det(den)


def schur_checks(ms=(1, 2, 3), max_weight: int = 6, n_points: int = 10, seed: int = SEED) -> list[Check]:
    """``C_tau^(1) / s_tau`` is constant in ``x``."""
    rng = np.random.default_rng(seed + 1)
    checks = []
    for m in ms:
        X = rng.uniform(0.1, 2.0, size=(n_points, m))
        worst = 0.0
        for n in range(1, max_weight + 1):
            for tau, e in weight_expansions(n, 1.0, m).items():
                r = jack_eval(e, X) / schur_bialternant(tau, X)
                worst = max(worst, float((r.max() - r.min()) / abs(r.mean())))
        checks.append(Check(f"schur_proportional[m={m}]", worst, 1e-10))
    return checks


# ---------------------------------------------------------------------------
# determinant forms


def _separated(rng, m: int, n: int, low=0.1, high=1.5, gap=0.1) -> np.ndarray:
    out = []
    while len(out) < n:
        v = rng.uniform(low, high, m)
        if m == 1 or np.min(np.diff(np.sort(v))) >= gap:
            out.append(v)
    return np.array(out)


def detrep_checks(ms=(2, 3), phis=(-0.5, 0.5, 1.0), n_points: int = 25, seed: int = SEED) -> list[Check]:
    """Series at weight 30 against the calibrated determinant forms."""
    rng = np.random.default_rng(seed + 2)
    policy = TruncationPolicy(max_weight=30)
    checks = []
    for m in ms:
        X, Y = _separated(rng, m, n_points), _separated(rng, m, n_points)
        series = mv_series_batch((), (), 1.0, X, Y, policy).value
        det = np.array([detrep.f00_det(x, y) for x, y in zip(X, Y)])
        checks.append(Check(f"detrep_0F0[m={m}]", _rel(series, det), 1e-6))
        for phi in phis:
            series = mv_series_batch((), (m + phi,), 1.0, X, Y, policy).value
            det = np.array([detrep.f01_det(phi, x, y) for x, y in zip(X, Y)])
            checks.append(Check(f"detrep_0F1[m={m},phi={phi:g}]", _rel(series, det), 1e-6))
    return checks


# ---------------------------------------------------------------------------
# densities at k = 1 and the Grabiner kernels

_GRABINER = {Kind.A: grabiner_A, Kind.B: grabiner_B, Kind.D: grabiner_D}


def k_one_density_checks(cases=(("D", 2), ("D", 3), ("A", 2), ("A", 3), ("B", 2), ("B", 3)),
                    ts=(0.5, 1.0, 2.0), n_pairs: int = 10, seed: int = SEED) -> list[Check]:
    """Density with all multiplicities 1 against the Grabiner determinant kernel."""
    rng = np.random.default_rng(seed + 3)
    checks = []
    for kind, m in cases:
        rs = build_root_system(kind, m)
        mult = Multiplicity(1.0, 1.0 if rs.kind is Kind.B else 0.0)
        c = normalization_c(rs, mult).c_k
        for t in ts:
            X, Y = random_chamber_points(rs, n_pairs, rng), random_chamber_points(rs, n_pairs, rng)
            dens = np.array([density_batch(rs, mult, t, x, y[None], c)[0] for x, y in zip(X, Y)])
            ref = np.array([_GRABINER[rs.kind](t, x, y) for x, y in zip(X, Y)])
            checks.append(Check(f"density_vs_grabiner[{kind}{m},t={t:g}]", _rel(dens, ref), 1e-6))
    return checks


def grabiner_cross_checks(ts=(0.5, 1.0, 2.0), n_pairs: int = 10, seed: int = SEED) -> list[Check]:
    """Signed Weyl sum against the determinant forms.

    Both sides are alternating sums, so nearly coincident pairings cancel
    catastrophically; points are drawn from ``[0.2, 2.5]`` with pairings of
    at least 0.4 to keep the comparison about the algebra.
    """
    rng = np.random.default_rng(seed + 4)
    cases = [("A", m) for m in (1, 2, 3, 4)] + [("B", m) for m in (1, 2, 3)] + [("D", m) for m in (2, 3)]
    checks = []
    for kind, m in cases:
        rs = build_root_system(kind, m)
        worst = 0.0
        for t in ts:
            X = random_chamber_points(rs, n_pairs, rng, 0.2, 2.5, 0.4)
            Y = random_chamber_points(rs, n_pairs, rng, 0.2, 2.5, 0.4)
            for x, y in zip(X, Y):
                worst = max(worst, _rel(grabiner_generic(rs, t, x, y), _GRABINER[rs.kind](t, x, y)))
        checks.append(Check(f"grabiner_generic[{kind}{m}]", worst, 1e-10))
    return checks


# ---------------------------------------------------------------------------
# type D against type B


def shift_checks(printed_constant: bool = False, k1s=(0.5, 1.0, 2.0), ms=(2, 3), n_points: int = 20,
                 seed: int = SEED) -> list[Check]:
    """``J_D = J_B(k0=0) + prod(x y) / C J_B(k0=1)`` under matched truncation.

    ``C = 2^m`` when ``printed_constant`` is set, else ``prod_{j<m}(2 j k1 + 1)``.
    """
    rng = np.random.default_rng(seed + 5)
    checks = []
    for k1, m in itertools.product(k1s, ms):
        rs = build_root_system("D", m)
        X, Y = random_chamber_points(rs, n_points, rng), random_chamber_points(rs, n_points, rng)
        C = 2.0**m if printed_constant else verified_shift_constant(m, k1)
        res = shift_decomposition_check(X, Y, k1, shift_constant=C)
        rel = float(np.max(np.abs(res) / np.abs(bessel_D(X, Y, k1))))
        label = "2^m" if printed_constant else "prod(2jk+1)"
        checks.append(Check(f"shift[k1={k1:g},m={m},C={label}]", rel, 1e-8))
    return checks


def symmetrization_checks(k1s=(0.5, 1.0, 2.0), ms=(2, 3), n_points: int = 20, seed: int = SEED) -> list[Check]:
    """``(J_D(x, y) + J_D(x, s y)) / 2 = J_B(x, y; k0=0)``."""
    rng = np.random.default_rng(seed + 6)
    checks = []
    for k1, m in itertools.product(k1s, ms):
        rs = build_root_system("D", m)
        X, Y = random_chamber_points(rs, n_points, rng), random_chamber_points(rs, n_points, rng)
        res = symmetrization_check(X, Y, k1)
        rel = float(np.max(np.abs(res) / np.abs(bessel_B(X, Y, 0.0, k1))))
        checks.append(Check(f"symmetrize[k1={k1:g},m={m}]", rel, 1e-10))
    return checks


# ---------------------------------------------------------------------------
# quadrature checks

DENSITY_CASES = (("A", 0.5, 0.0), ("A", 1.0, 0.0), ("B", 1.0, 1.0), ("D", 1.0, 0.0))


def _case(kind: str, k1: float, k0: float):
    return build_root_system(kind, 2), Multiplicity(k1, k0)


def normalization_checks(cases=DENSITY_CASES, n_starts: int = 3, seed: int = SEED,
                         spec: QuadratureSpec = DEFAULT_QUADRATURE) -> list[Check]:
    """Total mass of ``p_1(x, .)`` at random starts, m = 2."""
    rng = np.random.default_rng(seed + 7)
    checks = []
    for kind, k1, k0 in cases:
        rs, mult = _case(kind, k1, k0)
        c = normalization_c(rs, mult, spec).c_k
        worst = 0.0
        for x in random_chamber_points(rs, n_starts, rng, high=1.2, min_gap=0.1):
            mass = integrate_chamber(lambda Y: density_batch(rs, mult, 1.0, x, Y, c), rs, spec, mult).estimate
            worst = max(worst, abs(mass - 1.0))
        checks.append(Check(f"mass_one[{kind}2,k1={k1:g},k0={k0:g}]", worst, 1e-3))
    return checks


def chapman_checks(cases=DENSITY_CASES, n_pairs: int = 3, s: float = 0.5, t: float = 0.5, seed: int = SEED,
                   spec: QuadratureSpec = DEFAULT_QUADRATURE) -> list[Check]:
    """``int p_s(x, z) p_t(z, y) dz = p_{s+t}(x, y)``, m = 2."""
    rng = np.random.default_rng(seed + 8)
    checks = []
    for kind, k1, k0 in cases:
        rs, mult = _case(kind, k1, k0)
        c = normalization_c(rs, mult, spec).c_k
        worst = 0.0
        X = random_chamber_points(rs, n_pairs, rng, high=1.2, min_gap=0.1)
        Y = random_chamber_points(rs, n_pairs, rng, high=1.2, min_gap=0.1)
        for x, y in zip(X, Y):
            f = lambda Z, x=x, y=y: density_batch(rs, mult, s, x, Z, c) * _to_fixed(rs, mult, t, Z, y, c)  # noqa: E731
            lhs = integrate_chamber(f, rs, spec, mult).estimate
            rhs = float(density_batch(rs, mult, s + t, x, y[None], c)[0])
            worst = max(worst, abs(lhs - rhs) / rhs)
        checks.append(Check(f"chapman_kolmogorov[{kind}2,k1={k1:g},k0={k0:g}]", worst, 1e-3))
    return checks


def _to_fixed(rs, mult, t, Z, y, c):
    """``p_t(z, y)`` for many starts ``z`` and one target ``y``."""
    Z = np.atleast_2d(Z)
    s = math.sqrt(t)
    J = generalized_bessel(BesselSpec(rs, mult), Z / s, np.broadcast_to(y, Z.shape) / s).value
    sq = (np.sum(Z * Z, axis=1) + y @ y) / (2.0 * t)
    w = float(omega_k(rs, mult, y, signed=False)) ** 2
    return np.exp(-sq) * J * w / (c * t ** (mult.gamma(rs) + rs.m / 2))


# ---------------------------------------------------------------------------
# Monte Carlo


def montecarlo_checks(n_paths: int = 100_000, dt: float = 1e-3, seed: int = 7, n_sigma: float = 3.0,
                      backend: str | None = None) -> list[Check]:
    """Terminal moments at t = 1 against quadrature, and the rank-one second moment."""
    checks = []
    for kind, k1, k0 in (("B", 1.0, 1.0), ("D", 1.0, 0.0)):
        rs, mult = _case(kind, k1, k0)
        cfg = SdeConfig(rs, mult, (1.5, 0.5), 1.0, dt, n_paths, seed)
        est = moment_report(simulate(cfg, backend))
        ref = analytic_moments(rs, mult, 1.0, cfg.y0)
        for row in compare_moments(est, ref, n_sigma):
            checks.append(Check(f"montecarlo[{kind}2,{row['function']}] |z|", abs(row["z"]), n_sigma))
    for k0 in (0.5, 1.0):
        rs = build_root_system("B", 1)
        cfg = SdeConfig(rs, Multiplicity(1.0, k0), (1.0,), 1.0, dt, n_paths, seed)  # k1 unused at rank one
        est = moment_report(simulate(cfg, backend), {"y^2": lambda Y: Y[:, 0] ** 2})[0]
        z = (est.estimate - (1.0 + (2 * k0 + 1) * 1.0)) / est.std_error
        checks.append(Check(f"montecarlo[B1,k0={k0:g},E y^2] |z|", abs(z), n_sigma))
    return checks


# ---------------------------------------------------------------------------
# suites


def _jack_suite(opts: dict) -> list[Check]:
    eig = "tabulated" if opts.get("tabulated_eigenvalue") else "operator"
    return (jack_normalization_checks() + jack_eigen_checks(True, eig) + jack_eigen_checks(False, eig)
            + schur_checks())


SUITES = {
    "jack": _jack_suite,
    "detrep": lambda o: detrep_checks(),
    "theorem1": lambda o: k_one_density_checks() + grabiner_cross_checks(),
    "shift": lambda o: shift_checks(bool(o.get("printed_constant"))),
    "symmetrize": lambda o: symmetrization_checks(),
    "normalization": lambda o: normalization_checks(),
    "chapman": lambda o: chapman_checks(),
    "montecarlo": lambda o: montecarlo_checks(int(o.get("paths") or 100_000), seed=int(o.get("seed") or 7)),
}


def run_suite(name: str, opts: dict | None = None) -> list[Check]:
    """Run one suite by name, or every suite for ``"all"``."""
    opts = opts or {}
    if name == "all":
        return [c for key in SUITES for c in SUITES[key](opts)]
    return SUITES[name](opts)
