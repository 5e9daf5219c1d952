"""Pure numpy implementations of the hot kernels.

Signatures and arithmetic order mirror ``_ckernels.pyx`` so the two
backends agree to rounding.
"""
from __future__ import annotations

import numpy as np

from .errors import EigenvalueCollisionError, SimulationAborted

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85
_MASK = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_TWO_PI = 6.283185307179586
_INV_2_53 = 1.0 / 9007199254740992.0

NAME = "python"


def philox4x32(c0, c1, c2, c3, k0: int, k1: int):
    """Philox4x32-10 block function, vectorized over counter arrays."""
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) & _MASK for c in (c0, c1, c2, c3))
    k0 &= 0xFFFFFFFF
    k1 &= 0xFFFFFFFF
    for r in range(10):
        if r:
            k0 = (k0 + _W0) & 0xFFFFFFFF
            k1 = (k1 + _W1) & 0xFFFFFFFF
        p0 = c0 * _M0
        p1 = c2 * _M1
        c0, c1, c2, c3 = (
            (p1 >> _S32) ^ c1 ^ np.uint64(k0),
            p1 & _MASK,
            (p0 >> _S32) ^ c3 ^ np.uint64(k1),
            p0 & _MASK,
        )
    return c0, c1, c2, c3


def _uniform53(a, b):
    return ((a >> np.uint64(5)).astype(np.float64) * 67108864.0
            + (b >> np.uint64(6)).astype(np.float64) + 0.5) * _INV_2_53


def std_normals(seed: int, path, step, sub, m: int) -> np.ndarray:
    """Gaussian increments for counters ``(step, sub, block, path)``.

    Returns shape ``(len(path), m)``.  Each Philox block yields two
    Box-Muller normals.
    """
    path = np.atleast_1d(np.asarray(path, dtype=np.uint64))
    n = path.shape[0]
    step = np.broadcast_to(np.asarray(step, dtype=np.uint64), (n,))
    sub = np.broadcast_to(np.asarray(sub, dtype=np.uint64), (n,))
    out = np.empty((n, m))
    k0, k1 = seed & 0xFFFFFFFF, (seed >> 32) & 0xFFFFFFFF
    for block in range((m + 1) // 2):
        w0, w1, w2, w3 = philox4x32(step, sub, np.full(n, block, dtype=np.uint64), path, k0, k1)
        u1 = _uniform53(w0, w1)
        u2 = _uniform53(w2, w3)
        r = np.sqrt(-2.0 * np.log(u1))
        th = _TWO_PI * u2
        out[:, 2 * block] = r * np.cos(th)
        if 2 * block + 1 < m:
            out[:, 2 * block + 1] = r * np.sin(th)
    return out


def jack_solve(energies, indptr, indices, data, dom, scale: float, rtol: float = 1e-12) -> np.ndarray:
    """Monic eigenvectors of a dominance-triangular operator, one per column.

    ``U[nu, tau]`` is the coefficient of ``m_nu`` in ``P_tau``.  Row ``nu``
    of the off-diagonal part lists predecessors (earlier indices) in CSR
    form; ``dom[nu, tau]`` marks ``nu <= tau`` in dominance.
    """
    P = len(energies)
    E = np.asarray(energies, dtype=np.float64)
    U = np.zeros((P, P))
    for nu in range(P):
        lo, hi = indptr[nu], indptr[nu + 1]
        mask = dom[nu].copy()
        mask[nu] = False
        if mask.any():
            denom = E - E[nu]
            bad = mask & (np.abs(denom) <= rtol * np.maximum(np.abs(E), 1.0))
            if bad.any():
                raise EigenvalueCollisionError(f"eigenvalue collision at row {nu}")
            if hi > lo:
                s = data[lo:hi] @ U[indices[lo:hi], :]
                U[nu, mask] = scale * s[mask] / denom[mask]
        U[nu, nu] = 1.0
    return U


def _pairing(y, root):
    # left-to-right sum, matching the compiled loop
    s = y[:, 0] * root[0]
    for j in range(1, len(root)):
        s = s + y[:, j] * root[j]
    return s


def simulate_paths(roots, ks, y0, n_steps: int, h: float, seed: int, path0: int, n_paths: int,
                   shrink: float, max_retries: int, max_resamples: int, wall_eps: float,
                   drift_cap: float = 0.5):
    """Euler-Maruyama with step shrinking near the walls; vectorized over paths.

    Each sub-step is also capped at ``drift_cap * <a,y>^2 / (k |a|^2)`` per
    root (floored at ``1e-4 h``), so the drift moves a point by at most a
    fraction of its distance to the wall.

    Returns ``(terminal, stats)`` with ``stats = [retries, exhausted_steps,
    accepted_substeps, min_step]``.
    """
    roots = np.asarray(roots, dtype=np.float64)
    ks = np.asarray(ks, dtype=np.float64)
    m = len(y0)
    Y = np.tile(np.asarray(y0, dtype=np.float64), (n_paths, 1))
    paths = np.uint64(path0) + np.arange(n_paths, dtype=np.uint64)
    has_roots = len(roots) > 0
    retries = exhausted_steps = accepted = 0
    min_step = h
    done_tol = 1e-12 * h
    hmin = 1e-4 * h
    nrm = np.array([sum(r[j] * r[j] for j in range(m)) for r in roots]) if has_roots else None
    for n in range(n_steps):
        remaining = np.full(n_paths, h)
        hcur = np.full(n_paths, h)
        sub = np.zeros(n_paths, dtype=np.uint64)
        fails = np.zeros(n_paths, dtype=np.int64)
        exh = np.zeros(n_paths, dtype=bool)
        active = np.arange(n_paths)
        while active.size:
            ya = Y[active]
            hh = np.minimum(hcur[active], remaining[active])
            z = std_normals(seed, paths[active], n, sub[active], m)
            sub[active] += np.uint64(1)
            if has_roots:
                drift = np.zeros_like(ya)
                cap = hh
                for r in range(len(roots)):
                    pr = _pairing(ya, roots[r])
                    drift += (ks[r] / pr)[:, None] * roots[r]
                    cap = np.minimum(cap, drift_cap * pr * pr / (ks[r] * nrm[r]))
                hh = np.where(cap < hmin, np.minimum(hmin, hh), cap)
                prop = ya + hh[:, None] * drift + np.sqrt(hh)[:, None] * z
                ok = np.ones(len(active), dtype=bool)
                for r in range(len(roots)):
                    ok &= _pairing(prop, roots[r]) > wall_eps
            else:
                prop = ya + np.sqrt(hh)[:, None] * z
                ok = np.ones(len(active), dtype=bool)
            acc = active[ok]
            Y[acc] = prop[ok]
            remaining[acc] -= hh[ok]
            accepted += int(ok.sum())
            if acc.size:
                min_step = min(min_step, float(hh[ok].min()))
            rej = active[~ok]
            if rej.size:
                fails[rej] += 1
                retries += rej.size
                shrinkable = fails[rej] <= max_retries
                hcur[rej[shrinkable]] = hh[~ok][shrinkable] * shrink
                exh[rej[~shrinkable]] = True
                if np.any(fails[rej] > max_retries + max_resamples):
                    raise SimulationAborted(
                        f"step {n}: resampling budget exhausted on {int(np.sum(fails > max_retries + max_resamples))} path(s)")
            active = active[remaining[active] > done_tol]
        exhausted_steps += int(exh.sum())
    return Y, [retries, exhausted_steps, accepted, min_step]
