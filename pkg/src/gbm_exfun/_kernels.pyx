# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: the Kummer power series and the Monte Carlo path integrator.

Mirrors ``_kernels_py`` exactly; see that module for the contract.
"""

from cython.parallel cimport prange
from libc.math cimport exp, log, sqrt, cos, sin, hypot
from libc.stdint cimport uint64_t, int64_t

import numpy as np

BACKEND_NAME = "cython"

cdef double EPS = 2.220446049250313e-16
cdef double RESCALE = 1e250
cdef double LOG_RESCALE = log(1e250)
cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef double TWO_PI = 6.283185307179586
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline double cmag(double complex v) noexcept nogil:
    return hypot(v.real, v.imag)


def kummer_series(a, b, z, double tol=1e-16, int max_terms=10000):
    cdef double complex ca = a, cb = b, cz = z
    cdef double complex term = 1.0, total = 1.0
    cdef double abs_total = 1.0, log_scale = 0.0, mag, ratio, err
    cdef int quiet = 0, n = 0
    while n < max_terms:
        term = term * (ca + n) / (cb + n) * cz / (n + 1)
        n += 1
        total = total + term
        mag = cmag(term)
        abs_total += mag
        if mag == 0.0:
            return complex(total), log_scale, n, EPS * abs_total, True
        if abs_total > RESCALE:
            term = term / RESCALE
            total = total / RESCALE
            abs_total /= RESCALE
            log_scale += LOG_RESCALE
            mag = cmag(term)
        ratio = cmag((ca + n) * cz) / (cmag(cb + n) * (n + 1))
        if ratio < 1.0 and mag <= tol * cmag(total):
            quiet += 1
            if quiet >= 3:
                err = mag * ratio / (1.0 - ratio) + 2.0 * EPS * abs_total
                return complex(total), log_scale, n, err, True
        else:
            quiet = 0
    return complex(total), log_scale, n, cmag(term) + 2.0 * EPS * abs_total, False


cdef inline uint64_t mix64(uint64_t x) noexcept nogil:
    x = (x ^ (x >> 30)) * MIX1
    x = (x ^ (x >> 27)) * MIX2
    return x ^ (x >> 31)


cdef inline double uniform(uint64_t key, uint64_t counter) noexcept nogil:
    cdef uint64_t bits = mix64(key + (counter + 1) * GOLDEN)
    return (<double>(bits >> 11) + 0.5) * INV_2_53


def path_keys(uint64_t seed, paths):
    cdef uint64_t[:] p = np.ascontiguousarray(paths, dtype=np.uint64)
    out = np.empty(p.shape[0], dtype=np.uint64)
    cdef uint64_t[:] o = out
    cdef Py_ssize_t i
    for i in range(p.shape[0]):
        o[i] = mix64(seed ^ mix64(p[i] + GOLDEN))
    return out


def integrate_paths(double mu, double sigma, dts, record_idx, uint64_t seed,
                    int64_t path_start, int64_t n_paths, bint trapezoid,
                    double[:, ::1] out, int num_threads=0):
    cdef double[::1] dt = np.ascontiguousarray(dts, dtype=np.float64)
    cdef double[::1] sq = np.sqrt(dt)
    cdef int64_t[::1] rec_idx = np.ascontiguousarray(record_idx, dtype=np.int64)
    cdef Py_ssize_t n_steps = dt.shape[0], n_rec = rec_idx.shape[0]
    cdef Py_ssize_t p, j, rec
    cdef uint64_t key
    cdef double x, e, e_prev, integral, radius, angle, normal
    if num_threads <= 0:
        num_threads = 1
    for p in prange(n_paths, nogil=True, schedule="static", num_threads=num_threads):
        key = mix64(seed ^ mix64(<uint64_t>(path_start + p) + GOLDEN))
        x = 0.0
        e_prev = 1.0
        integral = 0.0
        radius = 0.0
        angle = 0.0
        rec = 0
        for j in range(n_steps):
            if j % 2 == 0:
                radius = sqrt(-2.0 * log(uniform(key, j)))
                angle = TWO_PI * uniform(key, j + 1)
                normal = radius * cos(angle)
            else:
                normal = radius * sin(angle)
            x = x + mu * dt[j] + sigma * sq[j] * normal
            e = exp(-x)
            if trapezoid:
                integral = integral + 0.5 * dt[j] * (e_prev + e)
            else:
                integral = integral + dt[j] * e_prev
            e_prev = e
            while rec < n_rec and rec_idx[rec] == j:
                out[p, rec] = integral
                rec = rec + 1
    return np.asarray(out)
