"""Numerical inversion of Laplace transforms in t.

Three schemes are available:

``gaver_stehfest``
    Real frequencies only, ``s_k = k ln2 / t``. Weights are computed exactly
    in rational arithmetic and rounded once. The error estimate is the larger
    of ``|f_N - f_{N-2}|`` and ``|f_{N-2} - f_{N-4}|``, reusing the same
    transform values. It is a heuristic: at N = 14 the true error has been
    seen up to about 3.5 times the estimate.
``talbot``
    Fixed Talbot contour (Abate & Valko 2004). The contour crosses the real
    axis at ``r = 2M/(5t)``, which must lie right of every singularity.
``bromwich``
    Trapezoid rule on the vertical line ``Re(s) = contour_shift / t``
    with Euler summation of the alternating tail (Abate & Whitt 1995).
    The line runs over ``c - i*inf .. c + i*inf``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .errors import GbmExfunError, NodeFailure
from .model import GbmParams
from .transforms import DEFAULT_CONFIG, TransformConfig, cdf_transform, ccdf_transform, pdf_transform

METHODS = ("gaver_stehfest", "talbot", "bromwich")
_ALIASES = {"stehfest": "gaver_stehfest", "gs": "gaver_stehfest"}
DEFAULT_NODES = {"gaver_stehfest": 14, "talbot": 32, "bromwich": 50}
EULER_M = 11
NODE_PERTURBATION = 1e-6
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class InversionConfig:
    """How to invert: scheme, node count, Bromwich abscissa and target times.

    ``contour_shift`` is dimensionless: the Bromwich line sits at
    ``Re(s) = contour_shift / t`` and the discretization error is about
    ``exp(-2 * contour_shift)``.
    """

    method: str = "gaver_stehfest"
    nodes: int | None = None
    contour_shift: float = 11.5
    t_grid: tuple = field(default=())

    def __post_init__(self):
        method = _ALIASES.get(self.method, self.method)
        if method not in METHODS:
            raise ValueError(f"unknown inversion method {self.method!r}; choose from {METHODS}")
        object.__setattr__(self, "method", method)
        nodes = DEFAULT_NODES[method] if self.nodes is None else int(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if method == "gaver_stehfest" and (nodes % 2 or not 8 <= nodes <= 20):
            raise ValueError(f"Stehfest order must be even and in [8, 20], got {nodes}")
        if method == "talbot" and nodes < 8:
            raise ValueError(f"Talbot needs at least 8 nodes, got {nodes}")
        if method == "bromwich" and nodes < EULER_M + 3:
            raise ValueError(f"Bromwich needs at least {EULER_M + 3} nodes, got {nodes}")
        if not self.contour_shift > 0:
            raise ValueError(f"contour_shift must be > 0, got {self.contour_shift}")
        t_grid = tuple(float(t) for t in self.t_grid)
        if any(not t > 0 for t in t_grid):
            raise ValueError("t_grid entries must be > 0")
        object.__setattr__(self, "t_grid", t_grid)


@dataclass(frozen=True)
class InvertedValue:
    t: float
    value: float
    method_error_estimate: float
    raw: float | None = None


@lru_cache(maxsize=None)
def stehfest_weights(n: int) -> tuple:
    """Gaver-Stehfest weights V_1..V_n, exact rationals rounded to float."""
    if n % 2 or n < 2:
        raise ValueError(f"Stehfest order must be even and >= 2, got {n}")
    half = n // 2
    out = []
    for k in range(1, n + 1):
        acc = Fraction(0)
        for j in range((k + 1) // 2, min(k, half) + 1):
            acc += Fraction(
                j ** half * math.factorial(2 * j),
                math.factorial(half - j) * math.factorial(j) * math.factorial(j - 1)
                * math.factorial(k - j) * math.factorial(2 * j - k),
            )
        out.append(float((-1) ** (k + half) * acc))
    return tuple(out)


def _eval_node(transform, s):
    try:
        return complex(transform(s))
    except (GbmExfunError, ZeroDivisionError, OverflowError) as exc:
        first = exc
    if isinstance(s, complex) and s.imag != 0.0:
        try:
            return complex(transform(s * (1.0 + NODE_PERTURBATION)))
        except (GbmExfunError, ZeroDivisionError, OverflowError):
            pass
    raise NodeFailure(f"transform failed at node s={s}: {first}") from first


def _stehfest(transform, t, n):
    values = [_eval_node(transform, k * _LN2 / t).real for k in range(1, n + 1)]
    f = {m: _LN2 / t * math.fsum(w * v for w, v in zip(stehfest_weights(m), values))
         for m in (n, n - 2, n - 4) if m >= 2}
    # a single difference can vanish where successive orders cross; use two
    err = abs(f[n] - f[n - 2])
    if n - 4 in f:
        err = max(err, abs(f[n - 2] - f[n - 4]))
    return f[n], err


def _talbot_sum(transform, t, m):
    r = 2.0 * m / (5.0 * t)
    total = 0.5 * math.exp(r * t) * _eval_node(transform, complex(r, 0.0)).real
    for k in range(1, m):
        theta = k * math.pi / m
        cot = math.cos(theta) / math.sin(theta)
        delta = complex(r * theta * cot, r * theta)
        sig = theta + (theta * cot - 1.0) * cot
        total += (cmath.exp(t * delta) * _eval_node(transform, delta) * complex(1.0, sig)).real
    return r / m * total


def _talbot(transform, t, m, rightmost):
    r = 2.0 * m / (5.0 * t)
    if not r > rightmost:
        raise ValueError(f"Talbot contour crossing {r} is not right of singularity {rightmost}")
    coarse = max(8, m - 4)
    f = _talbot_sum(transform, t, m)
    g = _talbot_sum(transform, t, coarse)
    return f, abs(f - g)


def _bromwich(transform, t, nodes, shift):
    m = EULER_M
    n = nodes - m - 1
    a = 2.0 * shift
    scale = math.exp(shift) / t
    terms = [0.5 * scale * _eval_node(transform, complex(a / (2.0 * t), 0.0)).real]
    for k in range(1, n + m + 1):
        s = complex(a / (2.0 * t), k * math.pi / t)
        terms.append((-1) ** k * scale * _eval_node(transform, s).real)
    partial = []
    acc = 0.0
    for term in terms:
        acc += term
        partial.append(acc)
    binom = [math.comb(m, j) / 2.0 ** m for j in range(m + 1)]
    euler_n = sum(binom[j] * partial[n + j] for j in range(m + 1))
    euler_prev = sum(binom[j] * partial[n - 1 + j] for j in range(m + 1))
    return euler_n, abs(euler_n - euler_prev)


def invert(transform: Callable[[complex], complex], cfg: InversionConfig,
           t_grid: Sequence[float] | None = None, rightmost_singularity: float = 0.0):
    """Invert ``transform`` at every time in ``t_grid`` (default ``cfg.t_grid``).

    ``transform`` receives a float for Stehfest and a complex otherwise.
    ``rightmost_singularity`` bounds the singular set from the right and is
    only used to validate the Talbot contour.
    """
    times = cfg.t_grid if t_grid is None else tuple(float(t) for t in t_grid)
    out = []
    for t in times:
        if not t > 0:
            raise ValueError(f"inversion time must be > 0, got {t}")
        if cfg.method == "gaver_stehfest":
            value, err = _stehfest(transform, t, cfg.nodes)
        elif cfg.method == "talbot":
            value, err = _talbot(transform, t, cfg.nodes, rightmost_singularity)
        else:
            value, err = _bromwich(transform, t, cfg.nodes, cfg.contour_shift)
        out.append(InvertedValue(t, value, err, value))
    return out


def _check_point(t, y):
    if not t > 0:
        raise ValueError(f"t must be > 0, got {t!r}")
    if not y > 0:
        raise ValueError(f"y must be > 0, got {y!r}")


def _rightmost(params: GbmParams) -> float:
    # pole of 1/lambda at 0; branch point -mu^2/(2 sigma^2) and Gamma poles lie left of it
    return max(0.0, params.branch_point)


def cdf_at(params: GbmParams, t: float, y: float, cfg: InversionConfig = InversionConfig(),
           tcfg: TransformConfig = DEFAULT_CONFIG) -> InvertedValue:
    """F(t, y) = P(I_t <= y), clamped to [0, 1]; the unclamped value is in ``raw``."""
    _check_point(t, y)
    (res,) = invert(lambda s: cdf_transform(params, y, s, tcfg, continuation=True).value, cfg, (t,),
                    _rightmost(params))
    return InvertedValue(t, min(1.0, max(0.0, res.value)), res.method_error_estimate, res.value)


def ccdf_at(params: GbmParams, t: float, y: float, cfg: InversionConfig = InversionConfig(),
            tcfg: TransformConfig = DEFAULT_CONFIG) -> InvertedValue:
    """P(I_t > y) by inverting P(y, .) directly, unclamped."""
    _check_point(t, y)
    (res,) = invert(lambda s: ccdf_transform(params, y, s, tcfg, continuation=True).value, cfg, (t,),
                    _rightmost(params))
    return res


def pdf_at(params: GbmParams, t: float, y: float, cfg: InversionConfig = InversionConfig(),
           tcfg: TransformConfig = DEFAULT_CONFIG) -> InvertedValue:
    """Density p_t(y) of I_t (not clamped; may dip below 0 by the error estimate)."""
    _check_point(t, y)
    (res,) = invert(lambda s: pdf_transform(params, y, s, tcfg, continuation=True).value, cfg, (t,),
                    _rightmost(params))
    return res
