"""Pure-Python / numpy fallback for the compiled kernels in ``_kernels.pyx``.

Both modules expose the same two functions with identical signatures and
semantics; ``_backend`` picks one at import time.
"""

import math

import numpy as np

BACKEND_NAME = "python"

EPS = 2.220446049250313e-16
RESCALE = 1e250
LOG_RESCALE = math.log(RESCALE)

# SplitMix64 constants (Steele, Lea & Flood 2014; Stafford "Mix13" finalizer)
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK = 0xFFFFFFFFFFFFFFFF
TWO_PI = 2.0 * math.pi
INV_2_53 = 1.0 / 9007199254740992.0


def kummer_series(a, b, z, tol=1e-16, max_terms=10000):
    """Sum the defining power series of M(a, b, z) with running rescaling.

    Returns ``(mantissa, log_scale, n_terms, abs_err, converged)``; the series
    value is ``mantissa * exp(log_scale)`` and ``abs_err`` is in mantissa units.
    Stops once ``|term| <= tol*|sum|`` holds for three consecutive terms past
    the peak of the term sequence.
    """
    a = complex(a)
    b = complex(b)
    z = complex(z)
    term = 1.0 + 0.0j
    total = 1.0 + 0.0j
    abs_total = 1.0
    log_scale = 0.0
    quiet = 0
    n = 0
    while n < max_terms:
        term = term * (a + n) / (b + n) * z / (n + 1)
        n += 1
        total += term
        mag = abs(term)
        abs_total += mag
        if mag == 0.0:
            return total, log_scale, n, EPS * abs_total, True
        if abs_total > RESCALE:
            term /= RESCALE
            total /= RESCALE
            abs_total /= RESCALE
            log_scale += LOG_RESCALE
            mag = abs(term)
        ratio = abs((a + n) * z) / (abs(b + n) * (n + 1))
        if ratio < 1.0 and mag <= tol * abs(total):
            quiet += 1
            if quiet >= 3:
                err = mag * ratio / (1.0 - ratio) + 2.0 * EPS * abs_total
                return total, log_scale, n, err, True
        else:
            quiet = 0
    return total, log_scale, n, abs(term) + 2.0 * EPS * abs_total, False


def _mix(x):
    x = (x ^ (x >> np.uint64(30))) * np.uint64(MIX1)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(MIX2)
    return x ^ (x >> np.uint64(31))


def path_keys(seed, paths):
    """Per-path stream keys derived from (seed, path index)."""
    p = np.asarray(paths, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix(np.uint64(seed) ^ _mix(p + np.uint64(GOLDEN)))


def _uniform(keys, counter):
    with np.errstate(over="ignore"):
        bits = _mix(keys + np.uint64(((counter + 1) * GOLDEN) & MASK))
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * INV_2_53


def integrate_paths(mu, sigma, dts, record_idx, seed, path_start, n_paths,
                    trapezoid, out, num_threads=0):
    """Fill ``out[p, r]`` with I_t for path ``path_start + p`` at record ``r``.

    ``dts`` are step lengths; ``record_idx[r]`` is the step after which the
    running integral is stored. Brownian increments are exact Gaussians.
    """
    dts = np.asarray(dts, dtype=np.float64)
    sq = np.sqrt(dts)
    record_idx = np.asarray(record_idx, dtype=np.int64)
    keys = path_keys(seed, np.arange(path_start, path_start + n_paths, dtype=np.uint64))
    x = np.zeros(n_paths)
    e_prev = np.ones(n_paths)
    integral = np.zeros(n_paths)
    rec = 0
    n_rec = len(record_idx)
    radius = angle = None
    for j in range(len(dts)):
        if j % 2 == 0:
            u1 = _uniform(keys, j)
            u2 = _uniform(keys, j + 1)
            radius = np.sqrt(-2.0 * np.log(u1))
            angle = TWO_PI * u2
            normal = radius * np.cos(angle)
        else:
            normal = radius * np.sin(angle)
        dt = dts[j]
        x += mu * dt + sigma * sq[j] * normal
        e = np.exp(-x)
        if trapezoid:
            integral += 0.5 * dt * (e_prev + e)
        else:
            integral += dt * e_prev
        e_prev = e
        while rec < n_rec and record_idx[rec] == j:
            out[:, rec] = integral
            rec += 1
    return out
