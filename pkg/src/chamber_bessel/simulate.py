"""Euler-Maruyama simulation of the radial Dunkl process

    dY = dB + sum_{alpha > 0} k(alpha) alpha / <alpha, Y> dt

inside the open Weyl chamber.

A proposed step that lands within ``wall_eps`` of a wall (or outside) is
retried with a shorter step; after ``max_retries`` shrinks the Gaussian
increment is redrawn at the last step size instead.  Gaussian increments
come from a Philox4x32-10 counter stream keyed by the seed and indexed by
(step, sub-step, block, path), so every path is reproducible on its own
regardless of batching or backend.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from ._jsonio import dumps
from .errors import DomainError, SimulationAborted, SingularDriftError
from .kernels import DEFAULT_QUADRATURE, QuadratureSpec, density_batch, integrate_chamber, normalization_c
from .rootsys import Multiplicity, RootSystem, omega_k, require_chamber

CHUNK = 8192


def drift(rs: RootSystem, mult: Multiplicity, y) -> np.ndarray:
    """``sum_{alpha > 0} k(alpha) alpha / <alpha, y>``, the gradient of ``log omega_k``."""
    y = np.asarray(y, dtype=float)
    pr = rs.pairings(y)
    if np.any(pr <= 0):
        raise SingularDriftError(f"drift undefined at {y.tolist()}: point on or outside a wall")
    return (mult.per_root(rs) / pr) @ rs.positive_roots


@dataclass(frozen=True)
class SdeConfig:
    rs: RootSystem
    mult: Multiplicity
    y0: tuple
    t_end: float
    dt: float
    n_paths: int
    seed: int = 0
    boundary_shrink: float = 0.5
    max_retries: int = 20
    max_resamples: int = 50
    wall_eps: float = 1e-6
    max_exhausted_fraction: float = 1e-3

    def __post_init__(self):
        if not self.dt > 0 or not self.t_end > 0:
            raise DomainError("t_end and dt must be positive")
        if int(self.n_paths) < 1:
            raise DomainError(f"n_paths must be at least 1, got {self.n_paths}")
        if not 0 < self.boundary_shrink < 1:
            raise DomainError("boundary_shrink must lie in (0, 1)")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        y0 = require_chamber(self.rs, self.y0, "y0")
        if np.any(self.rs.pairings(y0) <= self.wall_eps):
            raise DomainError(f"y0 lies within wall_eps of a wall: {y0.tolist()}")
        object.__setattr__(self, "y0", tuple(float(v) for v in y0))
        object.__setattr__(self, "n_paths", int(self.n_paths))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_end / self.dt)))

    @property
    def step(self) -> float:
        return self.t_end / self.n_steps

    def as_dict(self) -> dict:
        return {
            "kind": self.rs.kind.value, "m": self.rs.m, "k1": self.mult.k1, "k0": self.mult.k0,
            "y0": list(self.y0), "t_end": self.t_end, "dt": self.dt, "n_paths": self.n_paths,
            "seed": self.seed, "boundary_shrink": self.boundary_shrink, "max_retries": self.max_retries,
            "max_resamples": self.max_resamples, "wall_eps": self.wall_eps,
        }


@dataclass
class PathEnsemble:
    config: SdeConfig
    terminal: np.ndarray
    rejected_steps: int
    exhausted_steps: int
    accepted_substeps: int
    min_step: float
    backend: str = field(default="")

    @property
    def mean_substep(self) -> float:
        return self.config.t_end * self.config.n_paths / max(self.accepted_substeps, 1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        m = self.terminal.shape[1]
        w.writerow(["path"] + [f"y{j + 1}" for j in range(m)])
        for i, row in enumerate(self.terminal):
            w.writerow([i] + [format(v, ".17g") for v in row])
        return buf.getvalue()


def simulate(config: SdeConfig, backend: str | None = None) -> PathEnsemble:
    """Simulate ``config.n_paths`` independent paths to ``t_end``.

    Raises :class:`SimulationAborted` if any step exhausts its resampling
    budget, or if more than ``max_exhausted_fraction`` of all steps needed
    increment resampling.
    """
    kernels = _backend.load(backend) if backend else _backend.kernels
    rs, c = config.rs, config
    roots = rs.positive_roots.astype(float)
    ks = c.mult.per_root(rs)
    active = ks != 0
    roots, ks = roots[active], ks[active]
    out = np.empty((c.n_paths, rs.m))
    stats = [0, 0, 0, c.step]
    for start in range(0, c.n_paths, CHUNK):
        n = min(CHUNK, c.n_paths - start)
        Y, st = kernels.simulate_paths(
            roots.reshape(-1, rs.m), ks, np.asarray(c.y0), c.n_steps, c.step, c.seed, start, n,
            c.boundary_shrink, c.max_retries, c.max_resamples, c.wall_eps)
        out[start:start + n] = Y
        stats[0] += st[0]
        stats[1] += st[1]
        stats[2] += st[2]
        stats[3] = min(stats[3], st[3])
    total_steps = c.n_paths * c.n_steps
    if stats[1] > c.max_exhausted_fraction * total_steps:
        raise SimulationAborted(
            f"{stats[1]} of {total_steps} steps exhausted the shrink budget "
            f"(limit {c.max_exhausted_fraction:.3g}); reduce dt")
    pr = out @ rs.positive_roots.T.astype(float)
    if pr.size and not np.all(pr > 0):
        raise SimulationAborted("a terminal point left the open chamber")
    return PathEnsemble(c, out, int(stats[0]), int(stats[1]), int(stats[2]), float(stats[3]), kernels.NAME)


# ---------------------------------------------------------------------------
# moments


def default_test_functions(rs: RootSystem, mult: Multiplicity) -> dict:
    """W-invariant functionals: ``p1(y^2)``, ``p2(y^2)`` and ``omega_k(y)``."""
    return {
        "p1(y^2)": lambda Y: np.sum(Y**2, axis=-1),
        "p2(y^2)": lambda Y: np.sum(Y**4, axis=-1),
        "omega_k": lambda Y: omega_k(rs, mult, Y, signed=False),
    }


@dataclass(frozen=True)
class MomentEstimate:
    function: str
    estimate: float
    std_error: float
    n_paths: int
    seed: int

    def as_dict(self) -> dict:
        return {"function": self.function, "estimate": self.estimate, "std_error": self.std_error,
                "n_paths": self.n_paths, "seed": self.seed}


def moment_report(ensemble: PathEnsemble, test_functions: dict | None = None) -> list[MomentEstimate]:
    """Sample means with standard errors ``std / sqrt(n)``."""
    n = len(ensemble.terminal)
    if n < 100:
        raise DomainError(f"moment report needs at least 100 paths, got {n}")
    c = ensemble.config
    funcs = test_functions or default_test_functions(c.rs, c.mult)
    out = []
    for name, f in funcs.items():
        v = np.asarray(f(ensemble.terminal), dtype=float) * np.ones(n)
        mean = float(np.sum(v) / n)
        sd = float(np.sqrt(np.sum((v - mean) ** 2) / (n - 1)))
        out.append(MomentEstimate(name, mean, sd / math.sqrt(n), n, c.seed))
    return out


def analytic_moments(rs: RootSystem, mult: Multiplicity, t: float, y0, test_functions: dict | None = None,
                     spec: QuadratureSpec = DEFAULT_QUADRATURE) -> dict:
    """``int_C f(y) p_t(y0, y) dy`` by chamber quadrature, per test function."""
    y0 = require_chamber(rs, y0, "y0")
    funcs = test_functions or default_test_functions(rs, mult)
    c = normalization_c(rs, mult, spec).c_k
    return {name: integrate_chamber(lambda Y, f=f: f(Y) * density_batch(rs, mult, t, y0, Y, c), rs, spec, mult).estimate
            for name, f in funcs.items()}


def compare_moments(estimates: list[MomentEstimate], reference: dict, n_sigma: float = 3.0) -> list[dict]:
    """Per function: reference value, z-score and pass flag at ``n_sigma``."""
    rows = []
    for e in estimates:
        ref = reference[e.function]
        z = (e.estimate - ref) / e.std_error if e.std_error > 0 else (0.0 if e.estimate == ref else math.inf)
        rows.append({"function": e.function, "estimate": e.estimate, "std_error": e.std_error,
                     "reference": ref, "z": z, "pass": bool(abs(z) <= n_sigma)})
    return rows


def report_json(ensemble: PathEnsemble, estimates: list[MomentEstimate], extra: dict | None = None) -> str:
    doc = {"config": ensemble.config.as_dict(), "moments": [e.as_dict() for e in estimates],
           "diagnostics": {"rejected_steps": ensemble.rejected_steps, "exhausted_steps": ensemble.exhausted_steps,
                           "accepted_substeps": ensemble.accepted_substeps, "min_step": ensemble.min_step,
                           "backend": ensemble.backend}}
    if extra:
        doc.update(extra)
    return dumps(doc)
