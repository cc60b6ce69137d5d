"""Confluent hypergeometric function M(a, b, z) and complex log-gamma.

M is evaluated in one of three regimes:

* ``series``: the defining power series, for Re(z) >= 0 and moderate |z|;
* ``kummer_transformed``: ``M(a, b, z) = e^z M(b - a, b, -z)`` for Re(z) < 0,
  which turns an alternating series into one with no cancellation for real
  parameters;
* ``asymptotic``: the standard large-|z| expansion (Abramowitz & Stegun), used
  only when its own truncation estimate is below tolerance.

Internally values are carried as ``mantissa * exp(log_scale)`` so that the
closed-form transforms can combine huge and tiny factors without overflow.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

from ._backend import kernels
from .errors import EvaluationError, NonConvergence, PoleError

Z_SWITCH = 40.0
SERIES_TOL = 1e-16
MAX_TERMS = 10_000
ASYMPTOTIC_TOL = 1e-14
POLE_TOL = 1e-8
# double-precision series whose rounding estimate exceeds this is re-summed in extended precision
CANCELLATION_TOL = 1e-12

REGIMES = ("series", "kummer_transformed", "asymptotic")

# Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients as tabulated in
# Press et al., Numerical Recipes 3rd ed. and many libraries); ~15 digits for Re(z) >= 1/2.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)


@dataclass(frozen=True)
class KummerEval:
    value: complex
    regime: str
    abs_error_estimate: float


class ScaledValue(NamedTuple):
    """``mantissa * exp(log_scale)`` with a relative error estimate."""

    mantissa: complex
    log_scale: float
    regime: str
    rel_error: float

    @property
    def value(self) -> complex:
        return self.mantissa * math.exp(self.log_scale) if self.mantissa else 0j


def _is_nonpositive_integer(z: complex, tol: float) -> bool:
    if abs(z.imag) > tol or z.real > tol:
        return False
    return abs(z.real - round(z.real)) <= tol


def _log_sin_pi(z: complex) -> complex:
    if abs(z.imag) < 20.0:
        return cmath.log(cmath.sin(math.pi * z))
    # sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}) for Im z > 0; conjugate below
    if z.imag > 0:
        return -1j * math.pi * z + cmath.log(0.5j) + cmath.log(1.0 - cmath.exp(2j * math.pi * z))
    return (_log_sin_pi(z.conjugate())).conjugate()


def log_gamma(z: complex) -> complex:
    """Log of the gamma function for complex ``z``.

    The imaginary part is determined only modulo 2*pi; real positive input
    gives a real result. Raises :class:`PoleError` at nonpositive integers.
    """
    z = complex(z)
    if _is_nonpositive_integer(z, 1e-14 * max(1.0, abs(z))):
        raise PoleError(f"log_gamma pole at z={z}")
    if z.real < 0.5:
        return _LOG_PI - _log_sin_pi(z) - log_gamma(1.0 - z)
    w = z - 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (w + i)
    t = w + _LANCZOS_G + 0.5
    out = _HALF_LOG_2PI + (w + 0.5) * cmath.log(t) - t + cmath.log(acc)
    if z.imag == 0.0:
        return complex(out.real, 0.0)
    return out


def gamma_ratio(num: complex, den: complex) -> complex:
    """Gamma(num) / Gamma(den) through log-gamma, safe for large arguments."""
    return cmath.exp(log_gamma(num) - log_gamma(den))


def _check_b(b: complex) -> None:
    if _is_nonpositive_integer(b, POLE_TOL):
        raise PoleError(f"Kummer parameter b={b} is at a pole of the series")


def _series(a, b, z, tol, max_terms) -> ScaledValue:
    s, log_scale, n, err, ok = kernels.kummer_series(a, b, z, tol, max_terms)
    if not ok:
        raise NonConvergence(f"M({a}, {b}, {z}) series not converged after {n} terms")
    rel = err / abs(s) if s else math.inf
    if rel > CANCELLATION_TOL:
        return _series_extended(a, b, z, tol, max_terms, rel)
    # term recurrence accumulates about one rounding per factor
    rel += 2.2e-16 * (4.0 + abs(z))
    return ScaledValue(complex(s), float(log_scale), "series", rel)


def _series_extended(a, b, z, tol, max_terms, rel) -> ScaledValue:
    """Same series and stopping rule in extended precision.

    Used when terms far larger than the sum cancel (e.g. z near the imaginary
    axis), where double precision loses about log10(rel / eps) digits.
    """
    import mpmath

    lost_bits = math.log2(rel / 1e-16) if math.isfinite(rel) else 200.0
    prec = 64 + int(math.ceil(max(lost_bits, 0.0)))
    with mpmath.workprec(prec):
        ma, mb, mz = mpmath.mpc(a), mpmath.mpc(b), mpmath.mpc(z)
        term = mpmath.mpc(1)
        total = mpmath.mpc(1)
        abs_sum = mpmath.mpf(1)
        small = 0
        for n in range(max_terms):
            term = term * (ma + n) / ((mb + n) * (n + 1)) * mz
            total += term
            mag = abs(term)
            abs_sum += mag
            ratio = abs((ma + n + 1) * mz / ((mb + n + 1) * (n + 2)))
            if ratio < 1 and mag <= tol * abs(total):
                small += 1
                if small >= 3:
                    break
            else:
                small = 0
        else:
            raise NonConvergence(f"M({a}, {b}, {z}) series not converged after {max_terms} terms")
        if total == 0:
            return ScaledValue(0j, 0.0, "series", math.inf)
        log_scale = float(mpmath.log(abs(total)))
        mant = complex(total / mpmath.exp(log_scale))
        rounding = float(abs_sum / abs(total)) * 2.0 ** (-prec + 4)
        tail = float(mag / abs(total))
    return ScaledValue(mant, log_scale, "series", rounding + tail + 1e-16)


def _asymptotic_sum(p: complex, q: complex, w: complex, max_terms: int = 500):
    """Sum (p)_n (q)_n / n! w^n until terms stop decreasing; (sum, error)."""
    term = 1.0 + 0j
    total = 1.0 + 0j
    last = 1.0
    for n in range(max_terms):
        term = term * (p + n) * (q + n) / (n + 1) * w
        mag = abs(term)
        if mag == 0.0:
            return total, 0.0
        if mag > last:
            return total, last
        total += term
        if mag <= 1e-17 * abs(total):
            return total, mag
        last = mag
    return total, last


def _asymptotic(a: complex, b: complex, z: complex) -> ScaledValue:
    log_z = cmath.log(z)
    lg_b = log_gamma(b)
    parts = []
    on_negative_axis = z.imag == 0.0 and z.real < 0.0
    on_positive_axis = z.imag == 0.0 and z.real > 0.0
    # algebraic term, (-z)^{-a} = e^{i pi a} z^{-a} on the upper sheet
    if not _is_nonpositive_integer(b - a, 0.0):
        s1, e1 = _asymptotic_sum(a, 1.0 + a - b, -1.0 / z)
        if on_negative_axis:
            log1 = lg_b - log_gamma(b - a) - a * math.log(-z.real)
        else:
            sign = 1.0 if -0.5 * math.pi < cmath.phase(z) <= math.pi else -1.0
            log1 = lg_b - log_gamma(b - a) + sign * 1j * math.pi * a - a * log_z
            if on_positive_axis:
                # Stokes line: average of both sheets keeps real input real
                s1 = s1 * cmath.cos(math.pi * a) / cmath.exp(1j * math.pi * a)
                e1 = e1 * abs(cmath.cos(math.pi * a) / cmath.exp(1j * math.pi * a))
        parts.append((log1, s1, e1))
    # exponential term e^z z^{a-b}
    if not _is_nonpositive_integer(a, 0.0):
        s2, e2 = _asymptotic_sum(b - a, 1.0 - a, 1.0 / z)
        if on_negative_axis:
            x = -z.real
            log2 = lg_b - log_gamma(a) + z.real + (a - b) * math.log(x)
            s2 = s2 * cmath.cos(math.pi * (a - b))
            e2 = e2 * abs(cmath.cos(math.pi * (a - b)))
        else:
            log2 = lg_b - log_gamma(a) + z + (a - b) * log_z
        parts.append((log2, s2, e2))
    if not parts:
        return ScaledValue(0j, 0.0, "asymptotic", 0.0)
    ref = max(p[0].real for p in parts)
    mant = 0j
    err = 0.0
    for log_mag, s, e in parts:
        f = cmath.exp(log_mag - ref)
        mant += f * s
        err += abs(f) * e
    rel = err / abs(mant) if mant else math.inf
    return ScaledValue(mant, ref, "asymptotic", rel)


def kummer_scaled(a: complex, b: complex, z: complex, *, z_switch: float = Z_SWITCH,
                  method: str = "auto", tol: float = SERIES_TOL,
                  max_terms: int = MAX_TERMS) -> ScaledValue:
    """M(a, b, z) as a :class:`ScaledValue`.

    ``method`` is ``"auto"`` or one of :data:`REGIMES` to force a regime.
    """
    a, b, z = complex(a), complex(b), complex(z)
    _check_b(b)
    if z == 0:
        return ScaledValue(1.0 + 0j, 0.0, "series", 0.0)
    if method == "auto":
        if abs(z) > z_switch:
            res = _asymptotic(a, b, z)
            if res.rel_error <= ASYMPTOTIC_TOL:
                return res
        method = "kummer_transformed" if z.real < 0.0 else "series"
    if method == "series":
        return _series(a, b, z, tol, max_terms)
    if method == "kummer_transformed":
        s = _series(b - a, b, -z, tol, max_terms)
        mant = s.mantissa * cmath.exp(1j * z.imag)
        # rounding of exp(z) grows with |z|
        rel = s.rel_error + 2.2e-16 * (abs(z) + 1.0)
        return ScaledValue(mant, s.log_scale + z.real, "kummer_transformed", rel)
    if method == "asymptotic":
        return _asymptotic(a, b, z)
    raise ValueError(f"unknown method {method!r}")


def kummer_m(a: complex, b: complex, z: complex, **kwargs) -> KummerEval:
    """Kummer's function M(a, b, z) = sum_n (a)_n z^n / ((b)_n n!).

    Keyword arguments are passed to :func:`kummer_scaled`.
    """
    s = kummer_scaled(a, b, z, **kwargs)
    try:
        value = s.value
    except OverflowError as exc:
        raise EvaluationError(f"M({a}, {b}, {z}) overflows double precision") from exc
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise EvaluationError(f"M({a}, {b}, {z}) is not finite")
    return KummerEval(value, s.regime, s.rel_error * abs(value))


def kummer_m_derivative(a: complex, b: complex, z: complex, **kwargs) -> KummerEval:
    """dM/dz = (a/b) M(a+1, b+1, z)."""
    a, b = complex(a), complex(b)
    _check_b(b)
    if a == 0:
        return KummerEval(0j, "series", 0.0)
    inner = kummer_m(a + 1.0, b + 1.0, z, **kwargs)
    f = a / b
    return KummerEval(f * inner.value, inner.regime, abs(f) * inner.abs_error_estimate)
