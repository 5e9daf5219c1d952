# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_pykernels`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, cos, sin, fabs
from libc.stdint cimport uint32_t, uint64_t, int64_t

from .errors import EigenvalueCollisionError, SimulationAborted

cnp.import_array()

NAME = "cython"

cdef uint64_t M0 = 0xD2511F53
cdef uint64_t M1 = 0xCD9E8D57
cdef uint32_t W0 = 0x9E3779B9
cdef uint32_t W1 = 0xBB67AE85
cdef uint64_t LOW32 = 0xFFFFFFFF
cdef double TWO_PI = 6.283185307179586
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline void _philox(uint32_t* c, uint32_t k0, uint32_t k1) noexcept nogil:
    cdef uint64_t p0, p1
    cdef uint32_t a0, a1, a2, a3
    cdef int r
    for r in range(10):
        if r:
            k0 = k0 + W0
            k1 = k1 + W1
        p0 = M0 * <uint64_t>c[0]
        p1 = M1 * <uint64_t>c[2]
        a0 = <uint32_t>(p1 >> 32) ^ c[1] ^ k0
        a1 = <uint32_t>p1
        a2 = <uint32_t>(p0 >> 32) ^ c[3] ^ k1
        a3 = <uint32_t>p0
        c[0] = a0
        c[1] = a1
        c[2] = a2
        c[3] = a3


cdef inline double _u53(uint32_t a, uint32_t b) noexcept nogil:
    return (<double>(a >> 5) * 67108864.0 + <double>(b >> 6) + 0.5) * INV_2_53


cdef inline void _normals(uint64_t seed, uint32_t path, uint32_t step, uint32_t sub,
                          int m, double* out) noexcept nogil:
    cdef uint32_t c[4]
    cdef int block
    cdef double r, th
    for block in range((m + 1) // 2):
        c[0] = step
        c[1] = sub
        c[2] = <uint32_t>block
        c[3] = path
        _philox(c, <uint32_t>(seed & LOW32), <uint32_t>((seed >> 32) & LOW32))
        r = sqrt(-2.0 * log(_u53(c[0], c[1])))
        th = TWO_PI * _u53(c[2], c[3])
        out[2 * block] = r * cos(th)
        if 2 * block + 1 < m:
            out[2 * block + 1] = r * sin(th)


def philox4x32(c0, c1, c2, c3, k0, k1):
    """Philox4x32-10 block function over counter arrays."""
    a0 = np.array(np.asarray(c0, dtype=np.uint64) & 0xFFFFFFFF).ravel()
    n = a0.shape[0]
    a1 = np.array(np.broadcast_to(np.asarray(c1, dtype=np.uint64) & 0xFFFFFFFF, (n,)))
    a2 = np.array(np.broadcast_to(np.asarray(c2, dtype=np.uint64) & 0xFFFFFFFF, (n,)))
    a3 = np.array(np.broadcast_to(np.asarray(c3, dtype=np.uint64) & 0xFFFFFFFF, (n,)))
    out = np.empty((4, n), dtype=np.uint64)
    cdef uint64_t[:] v0 = a0, v1 = a1, v2 = a2, v3 = a3
    cdef uint64_t[:, :] o = out
    cdef uint32_t c[4]
    cdef uint32_t kk0 = <uint32_t>(k0 & 0xFFFFFFFF), kk1 = <uint32_t>(k1 & 0xFFFFFFFF)
    cdef Py_ssize_t i
    for i in range(n):
        c[0] = <uint32_t>v0[i]
        c[1] = <uint32_t>v1[i]
        c[2] = <uint32_t>v2[i]
        c[3] = <uint32_t>v3[i]
        _philox(c, kk0, kk1)
        o[0, i] = c[0]
        o[1, i] = c[1]
        o[2, i] = c[2]
        o[3, i] = c[3]
    return out[0], out[1], out[2], out[3]


def std_normals(seed, path, step, sub, int m):
    cdef cnp.ndarray[uint64_t, ndim=1] p = np.atleast_1d(np.asarray(path, dtype=np.uint64)).copy()
    cdef Py_ssize_t n = p.shape[0], i
    cdef cnp.ndarray[uint64_t, ndim=1] st = np.array(np.broadcast_to(np.asarray(step, dtype=np.uint64), (n,)))
    cdef cnp.ndarray[uint64_t, ndim=1] sb = np.array(np.broadcast_to(np.asarray(sub, dtype=np.uint64), (n,)))
    out = np.empty((n, m))
    cdef double[:, ::1] o = out
    cdef uint64_t s = seed
    for i in range(n):
        _normals(s, <uint32_t>p[i], <uint32_t>st[i], <uint32_t>sb[i], m, &o[i, 0])
    return out


def jack_solve(energies, indptr, indices, data, dom, double scale, double rtol=1e-12):
    cdef double[:] E = np.ascontiguousarray(energies, dtype=np.float64)
    cdef int64_t[:] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef int64_t[:] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef double[:] dv = np.ascontiguousarray(data, dtype=np.float64)
    cdef cnp.uint8_t[:, :] dm = np.ascontiguousarray(dom, dtype=np.uint8)
    cdef Py_ssize_t P = E.shape[0], nu, tau, q
    out = np.zeros((P, P))
    cdef double[:, ::1] U = out
    cdef double s, denom, tol
    for nu in range(P):
        for tau in range(nu):
            if not dm[nu, tau]:
                continue
            denom = E[tau] - E[nu]
            tol = rtol * (fabs(E[tau]) if fabs(E[tau]) > 1.0 else 1.0)
            if fabs(denom) <= tol:
                raise EigenvalueCollisionError(f"eigenvalue collision at row {nu}")
            s = 0.0
            for q in range(ip[nu], ip[nu + 1]):
                s += dv[q] * U[ix[q], tau]
            U[nu, tau] = scale * s / denom
        U[nu, nu] = 1.0
    return out


def simulate_paths(roots, ks, y0, int n_steps, double h, seed, path0, int n_paths,
                   double shrink, int max_retries, int max_resamples, double wall_eps,
                   double drift_cap=0.5):
    cdef double[:, ::1] R = np.ascontiguousarray(roots, dtype=np.float64).reshape(-1, len(y0))
    cdef double[:] K = np.ascontiguousarray(ks, dtype=np.float64)
    cdef double[:] Y0 = np.ascontiguousarray(y0, dtype=np.float64)
    cdef int m = Y0.shape[0], nr = R.shape[0]
    out = np.empty((n_paths, m))
    cdef double[:, ::1] Y = out
    cdef double[::1] y = np.empty(m), drift = np.empty(m), prop = np.empty(m), z = np.empty(m)
    cdef double[::1] nrm = np.empty(nr)
    cdef double cap, c
    cdef uint64_t s = seed
    cdef uint64_t p0 = path0
    cdef Py_ssize_t p, j, r
    cdef int n, fails
    cdef uint32_t sub
    cdef double remaining, hcur, hh, pr, sq, done_tol = 1e-12 * h, min_step = h, hmin = 1e-4 * h
    cdef bint ok, exh
    cdef int64_t retries = 0, exhausted_steps = 0, accepted = 0
    for r in range(nr):
        nrm[r] = 0.0
        for j in range(m):
            nrm[r] += R[r, j] * R[r, j]
    for p in range(n_paths):
        for j in range(m):
            y[j] = Y0[j]
        for n in range(n_steps):
            remaining = h
            hcur = h
            sub = 0
            fails = 0
            exh = False
            while remaining > done_tol:
                hh = hcur if hcur < remaining else remaining
                _normals(s, <uint32_t>(p0 + p), <uint32_t>n, sub, m, &z[0])
                sub += 1
                for j in range(m):
                    drift[j] = 0.0
                cap = hh
                for r in range(nr):
                    pr = y[0] * R[r, 0]
                    for j in range(1, m):
                        pr = pr + y[j] * R[r, j]
                    for j in range(m):
                        drift[j] += (K[r] / pr) * R[r, j]
                    c = drift_cap * pr * pr / (K[r] * nrm[r])
                    if c < cap:
                        cap = c
                if cap < hmin:
                    cap = hmin if hmin < hh else hh
                hh = cap
                sq = sqrt(hh)
                for j in range(m):
                    prop[j] = y[j] + hh * drift[j] + sq * z[j]
                ok = True
                for r in range(nr):
                    pr = prop[0] * R[r, 0]
                    for j in range(1, m):
                        pr = pr + prop[j] * R[r, j]
                    if not (pr > wall_eps):
                        ok = False
                        break
                if ok:
                    for j in range(m):
                        y[j] = prop[j]
                    remaining -= hh
                    accepted += 1
                    if hh < min_step:
                        min_step = hh
                else:
                    fails += 1
                    retries += 1
                    if fails <= max_retries:
                        hcur = hh * shrink
                    else:
                        exh = True
                    if fails > max_retries + max_resamples:
                        raise SimulationAborted(f"step {n}: resampling budget exhausted on path {p0 + p}")
            if exh:
                exhausted_steps += 1
        for j in range(m):
            Y[p, j] = y[j]
    return out, [int(retries), int(exhausted_steps), int(accepted), float(min_step)]
