"""Jack polynomials C_tau^(alpha) in the monomial symmetric basis.

Coefficients come from the eigenoperator

    D = sum_i x_i^2 d_i^2 + (2/alpha) sum_{i != j} x_i^2 / (x_i - x_j) d_i,

which is triangular on monomial symmetric functions in dominance order.
For each weight ``n`` the monic eigenvectors ``P_tau`` are solved downward
from ``m_tau``; the C normalization is then fixed by
``sum_{|tau| = n} C_tau = (x_1 + ... + x_m)^n``.

Two arithmetic modes exist: exact (``fractions.Fraction``, needs rational
alpha) and float (any alpha > 0, solved by the backend kernel).
"""
from __future__ import annotations

import hashlib
import logging
import math
import os
import re
import tempfile
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import _backend
from ._summation import Neumaier
from .errors import DomainError, EigenvalueCollisionError
from .partitions import (
    Partition,
    distinct_permutations,
    dominance_leq,
    enumerate_partitions,
    monomial_at_ones,
    multinomial,
    operator_eigenvalue,
)

logger = logging.getLogger(__name__)

CACHE_VERSION = "v1"
CACHE_ENV = "CHAMBER_BESSEL_CACHE"
ALPHA_RANGE = (1e-3, 1e3)


# ---------------------------------------------------------------------------
# operator structure


@dataclass(frozen=True)
class OperatorStructure:
    """Alpha-independent part of the eigenoperator on weight-``n`` monomials.

    Off-diagonal entries: ``D m_mu = E_mu m_mu + (2/alpha) sum_nu c[nu, mu] m_nu``
    with ``nu < mu``; row ``nu`` of the CSR arrays lists its ``mu``.
    """

    n: int
    m: int
    partitions: tuple
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    dominance: np.ndarray  # dominance[nu, tau] <=> nu <= tau


@lru_cache(maxsize=None)
def operator_structure(n: int, m: int) -> OperatorStructure:
    parts = tuple(enumerate_partitions(n, m))
    index = {p: i for i, p in enumerate(parts)}
    indptr, indices, data = [0], [], []
    for nu in parts:
        row: dict[int, int] = {}
        v = list(nu.padded(m))
        for i in range(m):
            for j in range(i + 1, m):
                # preimage exponents (v_i + r, v_j - r) collapse onto nu
                for r in range(1, v[j] + 1):
                    a = v.copy()
                    a[i] += r
                    a[j] -= r
                    mu = Partition(sorted(a, reverse=True))
                    k = index[mu]
                    row[k] = row.get(k, 0) + (v[i] - v[j] + 2 * r)
        for k in sorted(row):
            indices.append(k)
            data.append(row[k])
        indptr.append(len(indices))
    P = len(parts)
    dom = np.zeros((P, P), dtype=bool)
    for a in range(P):
        for b in range(a + 1):
            dom[a, b] = dominance_leq(parts[a], parts[b])
    return OperatorStructure(
        n, m, parts,
        np.asarray(indptr, dtype=np.int64),
        np.asarray(indices, dtype=np.int64),
        np.asarray(data, dtype=np.float64),
        dom,
    )


def _check_alpha(alpha):
    if not alpha > 0:
        raise DomainError(f"Jack parameter must be positive, got {alpha}")
    if not ALPHA_RANGE[0] <= float(alpha) <= ALPHA_RANGE[1]:
        raise DomainError(f"Jack parameter {alpha} outside the supported range {ALPHA_RANGE}")


def _is_exact(alpha) -> bool:
    return isinstance(alpha, (int, Fraction)) and not isinstance(alpha, bool)


def _monic_exact(st: OperatorStructure, alpha: Fraction) -> list[list]:
    """Column-major monic eigenvectors with Fractions: ``U[tau][nu]``."""
    m = st.m
    E = [operator_eigenvalue(p, alpha, m) for p in st.partitions]
    scale = Fraction(2) / alpha
    P = len(st.partitions)
    cols = []
    for t in range(P):
        u = [Fraction(0)] * P
        u[t] = Fraction(1)
        for nu in range(t + 1, P):
            if not st.dominance[nu, t]:
                continue
            denom = E[t] - E[nu]
            if denom == 0:
                raise EigenvalueCollisionError(
                    f"eigenvalues of {tuple(st.partitions[t])} and {tuple(st.partitions[nu])} coincide")
            s = Fraction(0)
            for q in range(st.indptr[nu], st.indptr[nu + 1]):
                s += int(st.data[q]) * u[st.indices[q]]
            u[nu] = scale * s / denom
        cols.append(u)
    return cols


def _monic_float(st: OperatorStructure, alpha: float, kernels=None) -> np.ndarray:
    kernels = kernels or _backend.kernels
    E = np.array([float(operator_eigenvalue(p, float(alpha), st.m)) for p in st.partitions])
    return kernels.jack_solve(E, st.indptr, st.indices, st.data, st.dominance, 2.0 / float(alpha))


def _normalizers(st: OperatorStructure, U, exact: bool) -> list:
    """Solve ``sum_tau c_tau P_tau = (x_1 + ... + x_m)^n`` (triangular)."""
    P = len(st.partitions)
    c = []
    for nu in range(P):
        rhs = multinomial(st.partitions[nu])
        if exact:
            c.append(Fraction(rhs) - sum((U[t][nu] * c[t] for t in range(nu)), Fraction(0)))
        else:
            c.append(math.fsum([float(rhs)] + [-U[nu, t] * c[t] for t in range(nu) if U[nu, t]]))
    return c


# ---------------------------------------------------------------------------
# expansions


@dataclass(frozen=True)
class JackExpansion:
    """One Jack polynomial in the monomial basis ``{m_mu}``."""

    tau: Partition
    alpha: object
    m: int
    coeffs: dict
    normalization: str = "C"

    @property
    def exact(self) -> bool:
        return _is_exact(self.alpha)

    def terms(self) -> list[tuple[tuple, object]]:
        """Fully expanded ``(exponent vector, coefficient)`` pairs."""
        out = []
        for mu, c in self.coeffs.items():
            for a in distinct_permutations(mu.padded(self.m)):
                out.append((a, c))
        return out


def jack_expansion(tau, alpha, m: int, normalization: str = "C") -> JackExpansion:
    """Jack polynomial ``tau`` in ``m`` variables.

    ``alpha`` given as ``int``/``Fraction`` selects exact arithmetic.
    ``normalization`` is "C" or "P" (monic leading coefficient).
    """
    tau = Partition(tau)
    if len(tau) > m:
        raise DomainError(f"partition {tuple(tau)} longer than m={m}")
    return weight_expansions(tau.weight, alpha, m, normalization)[tau]


def weight_expansions(n: int, alpha, m: int, normalization: str = "C") -> dict:
    """All Jack polynomials of weight ``n`` from one triangular solve."""
    _check_alpha(alpha)
    if normalization not in ("C", "P"):
        raise ValueError(f"unknown normalization {normalization!r}")
    exact = _is_exact(alpha)
    alpha = Fraction(alpha) if exact else float(alpha)
    st = operator_structure(n, m)
    P = len(st.partitions)
    if exact:
        U = _monic_exact(st, alpha)
        scale = _normalizers(st, U, True) if normalization == "C" else [Fraction(1)] * P
        col = lambda t: U[t]  # noqa: E731
    else:
        Uf = _monic_float(st, alpha)
        scale = _normalizers(st, Uf, False) if normalization == "C" else [1.0] * P
        col = lambda t: Uf[:, t]  # noqa: E731
    out = {}
    for t, tau in enumerate(st.partitions):
        c = col(t)
        coeffs = {st.partitions[nu]: scale[t] * c[nu] for nu in range(P) if c[nu] != 0}
        out[tau] = JackExpansion(tau, alpha, m, coeffs, normalization)
    return out


def monomial_eval(mu, x):
    """Monomial symmetric function ``m_mu`` at ``x`` (last axis = variables).

    Exact inputs (Fractions/ints in a list or tuple) stay exact.
    """
    mu = Partition(mu)
    if isinstance(x, (list, tuple)) and any(isinstance(v, Fraction) for v in x):
        m = len(x)
        total = Fraction(0)
        for a in distinct_permutations(mu.padded(m)):
            total += math.prod((xi**e for xi, e in zip(x, a)), start=Fraction(1))
        return total
    X = np.asarray(x, dtype=float)
    m = X.shape[-1]
    acc = Neumaier(X.shape[:-1])
    for a in distinct_permutations(mu.padded(m)):
        term = np.ones(X.shape[:-1])
        for j, e in enumerate(a):
            if e:
                term = term * X[..., j] ** e
        acc.add(term)
    return acc.value


def jack_eval(expansion: JackExpansion, x):
    """``sum_mu coeff(mu) m_mu(x)`` with compensated summation."""
    if isinstance(x, (list, tuple)) and any(isinstance(v, Fraction) for v in x):
        if len(x) != expansion.m:
            raise DomainError(f"expected {expansion.m} coordinates, got {len(x)}")
        return sum((Fraction(c) * monomial_eval(mu, x) for mu, c in expansion.coeffs.items()), Fraction(0))
    X = np.asarray(x, dtype=float)
    if X.shape[-1] != expansion.m:
        raise DomainError(f"expected {expansion.m} coordinates, got {X.shape[-1]}")
    if not expansion.coeffs:
        return 0.0
    acc = Neumaier(X.shape[:-1])
    for mu, c in expansion.coeffs.items():
        acc.add(float(c) * monomial_eval(mu, X))
    return acc.value


def jack_at_ones(tau, alpha, m: int):
    """``C_tau(1, ..., 1)`` from ``m_mu(1^m) = m! / prod(multiplicities!)``."""
    e = jack_expansion(tau, alpha, m)
    if e.exact:
        return sum((c * monomial_at_ones(mu, m) for mu, c in e.coeffs.items()), Fraction(0))
    return math.fsum(float(c) * monomial_at_ones(mu, m) for mu, c in e.coeffs.items())


def apply_eigenoperator(expansion: JackExpansion, x):
    """Evaluate ``D f`` at one point with distinct coordinates, ``f`` the expansion.

    Derivatives come from the expanded polynomial, independent of the
    partition-level operator tables.  With Fraction coordinates the
    evaluation is exact, float coefficients included (each float is an
    exact rational), so only coefficient error shows in the residual.
    """
    m = expansion.m
    if len(x) != m:
        raise DomainError(f"expected {m} coordinates, got {len(x)}")
    exact = any(isinstance(v, Fraction) for v in x)
    one = Fraction(1) if exact else 1.0
    two_over = Fraction(2) / Fraction(expansion.alpha) if exact else 2.0 / float(expansion.alpha)
    grad = [one * 0] * m
    second = [one * 0] * m
    for a, c in expansion.terms():
        c = Fraction(c) if exact else float(c)
        for i in range(m):
            if a[i] == 0:
                continue
            rest = math.prod((x[j] ** a[j] for j in range(m) if j != i), start=one)
            grad[i] += c * a[i] * x[i] ** (a[i] - 1) * rest
            if a[i] > 1:
                second[i] += c * a[i] * (a[i] - 1) * x[i] ** (a[i] - 2) * rest
    out = sum((x[i] ** 2 * second[i] for i in range(m)), one * 0)
    for i in range(m):
        for j in range(m):
            if i != j:
                out += two_over * x[i] ** 2 * grad[i] / (x[i] - x[j])
    return out


# ---------------------------------------------------------------------------
# per-weight tables for series evaluation


@dataclass
class WeightLayer:
    """All C-normalized Jacks of one weight: ``coeffs[tau_idx, mu_idx]``."""

    n: int
    m: int
    partitions: tuple
    coeffs: np.ndarray
    at_ones: np.ndarray
    exponents: np.ndarray = field(repr=False, default=None)
    offsets: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.exponents is None:
            rows, offs = [], []
            for mu in self.partitions:
                offs.append(len(rows))
                rows.extend(distinct_permutations(mu.padded(self.m)))
            self.exponents = np.asarray(rows, dtype=np.int64).reshape(-1, self.m)
            self.offsets = np.asarray(offs, dtype=np.int64)

    def monomials(self, X: np.ndarray, powers: list[np.ndarray]) -> np.ndarray:
        """``m_mu(X)`` for every partition of the layer; shape ``(npts, P)``.

        ``powers[j]`` is the ``(npts, n+1)`` table of ``X[:, j]**k``.
        """
        vals = np.ones((X.shape[0], len(self.exponents)))
        for j in range(self.m):
            vals *= powers[j][:, self.exponents[:, j]]
        return np.add.reduceat(vals, self.offsets, axis=1)

    def jacks(self, X: np.ndarray, powers: list[np.ndarray]) -> np.ndarray:
        """``C_tau(X)`` for every partition of the layer; shape ``(npts, P)``."""
        return self.monomials(X, powers) @ self.coeffs.T


def compute_layer(n: int, m: int, alpha, kernels=None) -> tuple[list, WeightLayer]:
    """Weight-``n`` table; returns ``(exact_rows_or_None, float_layer)``."""
    st = operator_structure(n, m)
    P = len(st.partitions)
    if _is_exact(alpha):
        alpha = Fraction(alpha)
        U = _monic_exact(st, alpha)
        c = _normalizers(st, U, True)
        rows = [[c[t] * U[t][nu] for nu in range(P)] for t in range(P)]
        K = np.array([[float(v) for v in r] for r in rows]).reshape(P, P)
    else:
        rows = None
        U = _monic_float(st, float(alpha), kernels)
        c = _normalizers(st, U, False)
        K = (U * np.asarray(c)[None, :]).T.copy()
    ones = np.array([monomial_at_ones(mu, m) for mu in st.partitions], dtype=float)
    layer = WeightLayer(n, m, st.partitions, K, K @ ones)
    return rows, layer


def alpha_key(alpha) -> str:
    """Stable string key: exact rational string or shortest float repr."""
    if _is_exact(alpha):
        return str(Fraction(alpha))
    return repr(float(alpha))


@dataclass
class JackTable:
    """Layers ``0..max_weight`` for one ``(alpha, m, mode)``."""

    alpha: object
    m: int
    exact: bool
    layers: list = field(default_factory=list)
    exact_rows: list = field(default_factory=list)

    @property
    def max_weight(self) -> int:
        return len(self.layers) - 1

    def extend(self, up_to_weight: int, kernels=None) -> bool:
        grew = False
        while self.max_weight < up_to_weight:
            rows, layer = compute_layer(self.max_weight + 1, self.m, self.alpha, kernels)
            self.layers.append(layer)
            self.exact_rows.append(rows)
            grew = True
        return grew


def _fmt_coeff(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return format(float(v), ".17g")


def _fmt_part(p) -> str:
    return "(" + ",".join(str(v) for v in p) + ")"


_RECORD = re.compile(r"\(([\d,]*)\):([^,()]+)")


def cache_dir() -> Path | None:
    """Directory of the persistent cache, or ``None`` when disabled.

    ``CHAMBER_BESSEL_CACHE`` overrides the default user-local path; an
    empty value disables persistence.
    """
    env = os.environ.get(CACHE_ENV)
    if env is not None:
        return Path(env) if env else None
    return Path(os.path.expanduser("~")) / ".cache" / "chamber_bessel"


def _cache_path(alpha, m: int, exact: bool, directory: Path) -> Path:
    safe = alpha_key(alpha).replace("/", "_over_").replace("-", "m")
    return directory / f"jack_{'exact' if exact else 'float'}_a{safe}_m{m}.txt"


def _serialize(table: JackTable) -> str:
    lines = [f"jackcache {CACHE_VERSION} alpha={alpha_key(table.alpha)} m={table.m} "
             f"mode={'exact' if table.exact else 'float'} maxweight={table.max_weight}"]
    for n, layer in enumerate(table.layers):
        rows = table.exact_rows[n] if table.exact else None
        for t, tau in enumerate(layer.partitions):
            vals = rows[t] if rows is not None else layer.coeffs[t]
            body = ",".join(f"{_fmt_part(mu)}:{_fmt_coeff(v)}"
                            for mu, v in zip(layer.partitions, vals) if v != 0)
            lines.append(f"{_fmt_part(tau)}; {body}")
    digest = hashlib.sha256("\n".join(lines).encode()).hexdigest()
    lines.append(f"checksum sha256={digest}")
    return "\n".join(lines) + "\n"


def _deserialize(text: str, alpha, m: int, exact: bool) -> JackTable:
    lines = text.rstrip("\n").split("\n")
    if len(lines) < 2 or not lines[-1].startswith("checksum sha256="):
        raise ValueError("missing checksum trailer")
    body = lines[:-1]
    if hashlib.sha256("\n".join(body).encode()).hexdigest() != lines[-1].split("=", 1)[1]:
        raise ValueError("checksum mismatch")
    header = dict(tok.split("=", 1) for tok in body[0].split()[2:])
    if not body[0].startswith(f"jackcache {CACHE_VERSION} "):
        raise ValueError(f"unsupported cache version in {body[0]!r}")
    if header.get("alpha") != alpha_key(alpha) or int(header.get("m", -1)) != m \
            or header.get("mode") != ("exact" if exact else "float"):
        raise ValueError("cache key mismatch")
    maxw = int(header["maxweight"])
    parse = Fraction if exact else float
    records: dict = {}
    for line in body[1:]:
        head, rest = line.split(";", 1)
        tau = Partition(int(v) for v in head.strip()[1:-1].split(",") if v)
        records[tau] = {Partition(int(v) for v in mu.split(",") if v): parse(c)
                        for mu, c in _RECORD.findall(rest)}
    table = JackTable(Fraction(alpha) if exact else float(alpha), m, exact)
    ones_cache = {}
    for n in range(maxw + 1):
        parts = tuple(enumerate_partitions(n, m))
        rows = [[records[tau].get(mu, parse(0)) for mu in parts] for tau in parts]
        K = np.array([[float(v) for v in r] for r in rows]).reshape(len(parts), len(parts))
        ones = np.array([ones_cache.setdefault((mu, m), monomial_at_ones(mu, m)) for mu in parts], dtype=float)
        table.layers.append(WeightLayer(n, m, parts, K, K @ ones))
        table.exact_rows.append(rows if exact else None)
    return table


def cache_put(table: JackTable, directory: Path | None = None) -> Path | None:
    """Atomically write ``table``; returns the file path (``None`` if disabled)."""
    directory = Path(directory) if directory is not None else cache_dir()
    if directory is None:
        return None
    directory.mkdir(parents=True, exist_ok=True)
    path = _cache_path(table.alpha, table.m, table.exact, directory)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".jack", suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(_serialize(table))
    os.replace(tmp, path)
    return path


def cache_get(alpha, m: int, up_to_weight: int, exact: bool | None = None,
              directory: Path | None = None) -> JackTable | None:
    """Load a cached table covering ``up_to_weight``; ``None`` on a miss.

    Corrupt or mismatched files produce a warning and a miss.
    """
    exact = _is_exact(alpha) if exact is None else exact
    directory = Path(directory) if directory is not None else cache_dir()
    if directory is None:
        return None
    path = _cache_path(alpha, m, exact, directory)
    if not path.exists():
        return None
    try:
        table = _deserialize(path.read_text(), alpha, m, exact)
    except (ValueError, KeyError, ZeroDivisionError) as exc:
        warnings.warn(f"ignoring unusable Jack cache {path}: {exc}", RuntimeWarning, stacklevel=2)
        return None
    if table.max_weight < up_to_weight:
        return None
    return table


_TABLES: dict = {}


def get_table(alpha, m: int, up_to_weight: int, exact: bool = False, persist: bool = True) -> JackTable:
    """Shared table for ``(alpha, m)``; memory first, then disk, then compute.

    Series evaluation uses float mode; ``exact=True`` requires rational alpha.
    """
    _check_alpha(alpha)
    if exact and not _is_exact(alpha):
        raise DomainError("exact mode needs a rational alpha (int or Fraction)")
    alpha = Fraction(alpha) if exact else float(alpha)
    key = (alpha_key(alpha), m, exact)
    table = _TABLES.get(key)
    if table is None or table.max_weight < up_to_weight:
        loaded = cache_get(alpha, m, up_to_weight, exact) if persist else None
        if loaded is not None:
            table = loaded
        else:
            if table is None:
                table = JackTable(alpha, m, exact)
            table.extend(up_to_weight)
            if persist:
                try:
                    cache_put(table)
                except OSError as exc:
                    logger.warning("could not write Jack cache: %s", exc)
        _TABLES[key] = table
    return table


def clear_memory_cache():
    _TABLES.clear()
