"""Determinant forms of 0F0 and 0F1 at Jack parameter 1.

    0F0^(1)(x, y)        = kappa(m)      det[exp(x_i y_j)]           / (V(x) V(y))
    0F1^(1)(m+phi; x, y) = kappa(m, phi) det[0F1(1+phi; x_i y_j)]    / (V(x) V(y))

The constants are not hard-coded: :func:`calibrate` fits them once against
the series at a fixed set of probe points and stores them on disk.
"""
from __future__ import annotations

import hashlib
import logging
import math
import os
import tempfile
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CalibrationError, DegenerateCoordinatesError, DomainError
from .hyperseries import TruncationPolicy, mv_series_batch, uni_0F1
from .jack import cache_dir
from .rootsys import vandermonde

logger = logging.getLogger(__name__)

DEGENERACY_RTOL = 1e-6
SPREAD_TOL = 1e-8
N_PROBES = 10
PROBE_SEED = 7331
MAX_M = 6
CACHE_FILE = "detrep_v1.txt"


@dataclass(frozen=True)
class DetRepConstant:
    family: str
    m: int
    phi: float | None
    kappa: float
    spread: float

    @property
    def key(self) -> str:
        return _key(self.family, self.m, self.phi)


def _key(family: str, m: int, phi) -> str:
    return f"{family} m={m}" + ("" if phi is None else f" phi={float(phi)!r}")


def _check_family(family: str, phi):
    if family not in ("F00", "F01"):
        raise DomainError(f"unknown determinant family {family!r}")
    if family == "F01":
        if phi is None or not phi > -1:
            raise DomainError(f"F01 needs phi > -1, got {phi}")
    elif phi is not None:
        raise DomainError("F00 takes no phi")


def _check_separated(v: np.ndarray, name: str, rtol: float):
    scale = max(1.0, float(np.max(np.abs(v))))
    d = np.abs(v[:, None] - v[None, :])
    d[np.diag_indices_from(d)] = np.inf
    if np.min(d) <= rtol * scale:
        raise DegenerateCoordinatesError(
            f"coordinates of {name} closer than {rtol:g} x scale: {v.tolist()}")


def _raw(family: str, x, y, phi=None, rtol: float = DEGENERACY_RTOL) -> float:
    """Determinant over Vandermondes, without the constant."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise DomainError(f"x and y must be vectors of equal length, got {x.shape} and {y.shape}")
    if len(x) > 1:
        _check_separated(x, "x", rtol)
        _check_separated(y, "y", rtol)
    z = np.outer(x, y)
    M = np.exp(z) if family == "F00" else uni_0F1(1.0 + phi, z)
    return float(np.linalg.det(M)) / (vandermonde(x) * vandermonde(y))


def _probe_points(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic, well separated probes with ``|x_i y_j| <= 1``."""
    rng = np.random.default_rng(PROBE_SEED + m)
    base = np.linspace(0.9, -0.9, m) if m > 1 else np.array([0.7])
    jitter = 0.3 / max(m, 2)
    X = base + rng.uniform(-jitter, jitter, size=(N_PROBES, m))
    Y = base + rng.uniform(-jitter, jitter, size=(N_PROBES, m))
    return X, Y


def _cache_path() -> Path | None:
    d = cache_dir()
    return None if d is None else d / CACHE_FILE


def _read_store(path: Path) -> dict:
    if not path.exists():
        return {}
    lines = path.read_text().rstrip("\n").split("\n")
    try:
        if lines[0] != "detrep v1" or not lines[-1].startswith("checksum sha256="):
            raise ValueError("bad header or trailer")
        if hashlib.sha256("\n".join(lines[:-1]).encode()).hexdigest() != lines[-1].split("=", 1)[1]:
            raise ValueError("checksum mismatch")
        out = {}
        for line in lines[1:-1]:
            key, vals = line.split(";")
            kappa, spread = (float(tok.split("=")[1]) for tok in vals.split())
            out[key.strip()] = (kappa, spread)
        return out
    except (ValueError, IndexError) as exc:
        warnings.warn(f"ignoring unusable calibration cache {path}: {exc}", RuntimeWarning, stacklevel=3)
        return {}


def _write_store(path: Path, store: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["detrep v1"] + [f"{k}; kappa={v[0]:.17g} spread={v[1]:.17g}" for k, v in sorted(store.items())]
    lines.append("checksum sha256=" + hashlib.sha256("\n".join(lines).encode()).hexdigest())
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".detrep", suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


_MEMO: dict = {}


def calibrate(family: str, m: int, phi: float | None = None, persist: bool = True,
              max_weight: int = 30) -> DetRepConstant:
    """Fit ``kappa`` as the geometric mean of series / raw-determinant ratios.

    Raises :class:`CalibrationError` when the ratios spread by more than
    ``1e-8`` relative, which means the determinant shape is wrong.
    """
    _check_family(family, phi)
    if not 1 <= m <= MAX_M:
        raise DomainError(f"calibration supports 1 <= m <= {MAX_M}, got {m}")
    key = _key(family, m, phi)
    if key in _MEMO:
        return _MEMO[key]
    path = _cache_path() if persist else None
    store = _read_store(path) if path is not None else {}
    if key in store:
        kappa, spread = store[key]
        const = DetRepConstant(family, m, phi, kappa, spread)
        _MEMO[key] = const
        return const
    X, Y = _probe_points(m)
    q = () if family == "F00" else (m + phi,)
    series = mv_series_batch((), q, 1.0, X, Y, TruncationPolicy(max_weight=max_weight)).value
    raw = np.array([_raw(family, x, y, phi) for x, y in zip(X, Y)])
    ratio = series / raw
    if np.any(ratio <= 0):
        raise CalibrationError(f"{key}: non-positive series/determinant ratio")
    spread = float((ratio.max() - ratio.min()) / np.abs(ratio).mean())
    if spread > SPREAD_TOL:
        raise CalibrationError(f"{key}: ratio spread {spread:.3g} exceeds {SPREAD_TOL:g}")
    kappa = float(np.exp(np.mean(np.log(ratio))))
    const = DetRepConstant(family, m, phi, kappa, spread)
    _MEMO[key] = const
    if path is not None:
        store[key] = (kappa, spread)
        try:
            _write_store(path, store)
        except OSError as exc:
            logger.warning("could not write calibration cache: %s", exc)
    return const


def kappa_closed_form(m: int, phi: float | None = None) -> float:
    """``prod_{n<m} n! (1+phi)_n`` (``phi=None``: ``prod n!``); for comparison only."""
    out = 1.0
    for n in range(m):
        out *= math.factorial(n)
        if phi is not None:
            out *= math.prod(phi + 1 + j for j in range(n))
    return out


def f00_det(x, y, rtol: float = DEGENERACY_RTOL) -> float:
    """``0F0^(1)(x, y)`` from the exponential determinant."""
    m = len(np.atleast_1d(x))
    return calibrate("F00", m).kappa * _raw("F00", x, y, rtol=rtol)


def f01_det(phi: float, x, y, rtol: float = DEGENERACY_RTOL) -> float:
    """``0F1^(1)(m+phi; x, y)`` from the determinant of scalar 0F1's."""
    if not phi > -1:
        raise DomainError(f"phi must exceed -1, got {phi}")
    m = len(np.atleast_1d(x))
    return calibrate("F01", m, phi).kappa * _raw("F01", x, y, phi, rtol=rtol)
