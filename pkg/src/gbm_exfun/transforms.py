"""Closed-form Laplace transforms (in t) of the law of I_t = int_0^t exp(-X_s) ds.

With ``k`` the positive root of (sigma^2/2) k^2 - mu k - lambda = 0,
``beta = 1 - 2 mu/sigma^2 + 2k`` and ``x = 2/(y sigma^2)``::

    P(y, lam)    = (1/lam) x^k Gamma(beta - k)/Gamma(beta) M(k, beta, -x)
    Fhat(y, lam) = 1/lam - P(y, lam)
    phat(y, lam) = -dP/dy

``P`` transforms the complementary CDF, ``Fhat`` the CDF and ``phat`` the
density. Everything is evaluated in log space. Complex ``lam`` with positive
real part is accepted; ``continuation=True`` extends this to the rest of the
plane off the branch cut, which contour inversion needs.

The density transform is the y-derivative of ``P`` worked out with
dM/dz = (a/b) M(a+1, b+1, z)::

    phat = (1/lam) Gamma-ratio x^k / y * [k M(k, beta, -x) - (k x/beta) M(k+1, beta+1, -x)]

An otherwise identical form with an extra factor y^(-k) does not satisfy
phat = -dP/dy; finite differences of P decide between them.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import EvaluationError
from .kummer import (ASYMPTOTIC_TOL, MAX_TERMS, SERIES_TOL, Z_SWITCH, _asymptotic_sum,
                     kummer_scaled, log_gamma)
from .model import GbmParams, compute_k

KINDS = ("ccdf_transform", "cdf_transform", "pdf_transform")


@dataclass(frozen=True)
class TransformConfig:
    """Evaluation tolerances for the closed forms."""

    rel_tol: float = 1e-6
    z_switch: float = Z_SWITCH
    series_tol: float = SERIES_TOL
    max_terms: int = MAX_TERMS


DEFAULT_CONFIG = TransformConfig()


@dataclass(frozen=True)
class TransformValue:
    value: complex
    kind: str
    regimes: tuple = field(default=())
    rel_error: float = 0.0

    @property
    def real(self) -> float:
        return self.value.real


def _validate(y: float, lam: complex, continuation: bool = False) -> None:
    if not y >= 0.0:
        raise ValueError(f"y must be >= 0, got {y!r}")
    if not continuation and not complex(lam).real > 0.0:
        raise ValueError(f"Re(lambda) must be > 0, got {lam!r}")


def _is_real(lam: complex) -> bool:
    return complex(lam).imag == 0.0


def _finish(value: complex, kind: str, regimes, rel_error: float, real: bool,
            cfg: TransformConfig) -> TransformValue:
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise EvaluationError(f"{kind} is not finite")
    if rel_error > cfg.rel_tol:
        raise EvaluationError(f"{kind} error estimate {rel_error:.3g} exceeds {cfg.rel_tol:.3g}")
    if real:
        value = complex(value.real, 0.0)
    return TransformValue(value, kind, tuple(regimes), rel_error)


class _Pieces:
    """Shared intermediate quantities for one (params, y, lam)."""

    def __init__(self, params: GbmParams, y: float, lam: complex):
        s2 = params.sigma2
        self.lam = complex(lam)
        self.k = compute_k(params, lam).value
        self.beta = 1.0 - 2.0 * params.mu / s2 + 2.0 * self.k
        self.x = 2.0 / (y * s2)
        self.log_x = math.log(self.x)
        # log of (1/lam) x^k Gamma(beta - k) / Gamma(beta)
        self.log_pref = (self.k * self.log_x + log_gamma(self.beta - self.k)
                         - log_gamma(self.beta) - cmath.log(self.lam))


def _ccdf(params, y, lam, cfg):
    lam = complex(lam)
    if y == 0.0:
        return 1.0 / lam, ("limit",), 0.0
    if math.isinf(y):
        return 0j, ("limit",), 0.0
    p = _Pieces(params, y, lam)
    m = kummer_scaled(p.k, p.beta, -p.x, z_switch=cfg.z_switch, tol=cfg.series_tol,
                      max_terms=cfg.max_terms)
    value = m.mantissa * cmath.exp(p.log_pref + m.log_scale)
    rel = m.rel_error + 4e-16 * (abs(p.log_pref) + abs(m.log_scale))
    return value, (m.regime,), rel


def ccdf_transform(params: GbmParams, y: float, lam: complex,
                   cfg: TransformConfig = DEFAULT_CONFIG, *,
                   continuation: bool = False) -> TransformValue:
    """Laplace transform in t of the complementary CDF, P(y, lam).

    ``continuation=True`` admits Re(lam) <= 0 off the branch cut, as needed
    by contour inversion.
    """
    _validate(y, lam, continuation)
    value, regimes, rel = _ccdf(params, y, lam, cfg)
    return _finish(value, "ccdf_transform", regimes, rel, _is_real(lam), cfg)


def ccdf_transform_complex(params: GbmParams, z: complex, y: float,
                           cfg: TransformConfig = DEFAULT_CONFIG) -> TransformValue:
    """Analytic extension P(y, z) for Re(z) > 0; identical to the real path on the axis."""
    if not y > 0.0:
        raise ValueError(f"y must be > 0, got {y!r}")
    return ccdf_transform(params, y, z, cfg)


def cdf_transform(params: GbmParams, y: float, lam: complex,
                  cfg: TransformConfig = DEFAULT_CONFIG, *,
                  continuation: bool = False) -> TransformValue:
    """Laplace transform in t of the CDF, 1/lam - P(y, lam)."""
    _validate(y, lam, continuation)
    lam = complex(lam)
    p_value, regimes, rel = _ccdf(params, y, lam, cfg)
    value = 1.0 / lam - p_value
    if value:
        rel = rel * abs(p_value) / abs(value)
    return _finish(value, "cdf_transform", regimes, rel, _is_real(lam), cfg)


def pdf_transform(params: GbmParams, y: float, lam: complex,
                  cfg: TransformConfig = DEFAULT_CONFIG, *,
                  continuation: bool = False) -> TransformValue:
    """Laplace transform in t of the density p_t(y), computed as -dP/dy."""
    _validate(y, lam, continuation)
    lam = complex(lam)
    real = _is_real(lam)
    if math.isinf(y):
        return _finish(0j, "pdf_transform", ("limit",), 0.0, real, cfg)
    if y == 0.0:
        # I_t ~ t for small t, so the transform of the density tends to 1
        return _finish(1.0 + 0j, "pdf_transform", ("limit",), 0.0, real, cfg)
    p = _Pieces(params, y, lam)
    k, beta, x = p.k, p.beta, p.x
    kw = dict(z_switch=cfg.z_switch, tol=cfg.series_tol, max_terms=cfg.max_terms)
    m0 = kummer_scaled(k, beta, -x, **kw)
    if m0.regime == "asymptotic":
        # k M(k,beta,-x) - (kx/beta) M(k+1,beta+1,-x) with the leading terms cancelled
        # analytically; what remains is lam * sum (k+1)_n (2+k-beta)_n / n! x^-n
        s, err = _asymptotic_sum(k + 1.0, 2.0 + k - beta, 1.0 / x)
        factor = 0.5 * params.sigma2 * k * (k - 2.0 * params.mu / params.sigma2) / lam
        value = factor * s
        rel = err / abs(s) + 1e-15
        if rel <= ASYMPTOTIC_TOL * 10:
            return _finish(value, "pdf_transform", ("asymptotic",), rel, real, cfg)
        m0 = kummer_scaled(k, beta, -x, method="kummer_transformed", **kw)
    m1 = kummer_scaled(k + 1.0, beta + 1.0, -x, method=m0.regime, **kw)
    ref = max(m0.log_scale, m1.log_scale)
    t0 = k * m0.mantissa * math.exp(m0.log_scale - ref)
    t1 = (k * x / beta) * m1.mantissa * math.exp(m1.log_scale - ref)
    bracket = t0 - t1
    err = abs(t0) * m0.rel_error + abs(t1) * m1.rel_error + 2.2e-16 * (abs(t0) + abs(t1))
    value = bracket * cmath.exp(p.log_pref + ref - math.log(y))
    rel = err / abs(bracket) if bracket else math.inf
    rel += 4e-16 * (abs(p.log_pref) + abs(ref))
    return _finish(value, "pdf_transform", (m0.regime, m1.regime), rel, real, cfg)


def moment_first(params: GbmParams, t: float) -> float:
    """E[I_t] = (e^{a t} - 1)/a with a = sigma^2/2 - mu (t when a = 0)."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    a = params.a
    if a == 0.0:
        return float(t)
    return math.expm1(a * t) / a
