"""Finite-difference residuals of the forward equations satisfied by the law of I_t.

In t-space the CDF F(t, y) solves::

    F_t = (sigma^2/2) d/dy (y^2 F_y) - (a y + 1) F_y,          a = sigma^2/2 - mu
        = (sigma^2/2) y^2 F_yy + (b y - 1) F_y,                 b = mu + sigma^2/2

and its Laplace transform P(y, lam) of 1 - F solves::

    (sigma^2/2) y^2 P'' + (b y - 1) P' - lam P = 0.

Derivatives use five-point centred stencils with steps proportional to the
coordinate. Residuals are normalised by the largest individual term on the
grid so tolerances do not depend on scale.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .inversion import InversionConfig, InvertedValue, cdf_at
from .model import GbmParams
from .transforms import ccdf_transform


@dataclass
class ResidualReport:
    coord1: np.ndarray
    coord2: np.ndarray
    residuals: np.ndarray
    term_scale: np.ndarray
    norm_rel: float
    step_sizes: tuple
    inversion_error: float = 0.0


def _d1(fm2, fm1, fp1, fp2, h):
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)


def _d2(fm2, fm1, f0, fp1, fp2, h):
    return (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h)


def _norm(residuals, scale):
    top = float(np.max(scale)) if len(scale) else 0.0
    if top == 0.0:
        return math.inf
    return float(np.max(np.abs(residuals))) / top


def ode_residual(params: GbmParams, lam: float, y_grid: Sequence[float],
                 P: Callable[[float], float] | None = None,
                 rel_step: float = 1e-4) -> ResidualReport:
    """Residual of (sigma^2/2) y^2 P'' + (b y - 1) P' - lam P on ``y_grid``.

    ``P`` defaults to the closed-form transform of the complementary CDF.
    """
    if P is None:
        def P(y):
            return ccdf_transform(params, y, lam).real
    ys = np.asarray(y_grid, dtype=float)
    if np.any(ys * (1.0 - 2.0 * rel_step) <= 0):
        raise ValueError("y_grid must be positive so centred stencils stay in y > 0")
    res = np.empty_like(ys)
    scale = np.empty_like(ys)
    steps = []
    half_s2, b = 0.5 * params.sigma2, params.b
    for i, y in enumerate(ys):
        h = rel_step * y
        f = [P(y + j * h) for j in (-2, -1, 0, 1, 2)]
        p1 = _d1(f[0], f[1], f[3], f[4], h)
        p2 = _d2(*f, h)
        terms = (half_s2 * y * y * p2, (b * y - 1.0) * p1, -lam * f[2])
        res[i] = sum(terms)
        scale[i] = max(abs(v) for v in terms)
        steps.append(h)
    return ResidualReport(ys, np.full_like(ys, lam), res, scale, _norm(res, scale), tuple(steps))


def _value(v):
    if isinstance(v, InvertedValue):
        return (v.raw if v.raw is not None else v.value), v.method_error_estimate
    return float(v), 0.0


def pde_residual(params: GbmParams, t_grid: Sequence[float], y_grid: Sequence[float],
                 F: Callable[[float, float], InvertedValue | float] | None = None,
                 cfg: InversionConfig | None = None, rel_step_t: float = 1e-2,
                 rel_step_y: float = 1e-2, form: str = "divergence") -> ResidualReport:
    """Residual of the forward PDE for the CDF on the tensor grid ``t_grid x y_grid``.

    ``F(t, y)`` defaults to the inverted CDF (unclamped) under ``cfg``.
    ``form`` selects the divergence form ``(sigma^2/2)(y^2 F_y)_y - (a y + 1) F_y``
    or the ``"expanded"`` form ``(sigma^2/2) y^2 F_yy + (b y - 1) F_y``; both
    are computed from the same stencil values. ``inversion_error`` in the
    report is the largest method error estimate seen on any stencil point.
    """
    if form not in ("divergence", "expanded"):
        raise ValueError(f"form must be 'divergence' or 'expanded', got {form!r}")
    if F is None:
        cfg = cfg or InversionConfig()

        def F(t, y):
            return cdf_at(params, t, y, cfg)
    half_s2, a, b = 0.5 * params.sigma2, params.a, params.b
    c1, c2, res, scale = [], [], [], []
    worst_err = 0.0
    for t in t_grid:
        ht = rel_step_t * t
        if t - 2 * ht <= 0:
            raise ValueError("t_grid must be positive so centred stencils stay in t > 0")
        for y in y_grid:
            hy = rel_step_y * y
            if y - 2 * hy <= 0:
                raise ValueError("y_grid must be positive so centred stencils stay in y > 0")
            fy, ft = [], []
            for j in (-2, -1, 0, 1, 2):
                v, e = _value(F(t, y + j * hy))
                fy.append(v)
                worst_err = max(worst_err, e)
            for j in (-2, -1, 1, 2):
                v, e = _value(F(t + j * ht, y))
                ft.append(v)
                worst_err = max(worst_err, e)
            f_t = _d1(ft[0], ft[1], ft[2], ft[3], ht)
            f_y = _d1(fy[0], fy[1], fy[3], fy[4], hy)
            f_yy = _d2(*fy, hy)
            if form == "divergence":
                terms = (half_s2 * y * y * f_yy, 2.0 * half_s2 * y * f_y, -(a * y + 1.0) * f_y)
            else:
                terms = (half_s2 * y * y * f_yy, (b * y - 1.0) * f_y)
            res.append(f_t - sum(terms))
            scale.append(max(abs(f_t), *(abs(v) for v in terms)))
            c1.append(t)
            c2.append(y)
    res = np.asarray(res)
    scale = np.asarray(scale)
    return ResidualReport(np.asarray(c1), np.asarray(c2), res, scale, _norm(res, scale),
                          (rel_step_t, rel_step_y), worst_err)


def write_residual_csv(fh, report: ResidualReport) -> None:
    """Rows ``coord1,coord2,residual,term_scale`` (17 significant digits)."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["coord1", "coord2", "residual", "term_scale"])
    for row in zip(report.coord1, report.coord2, report.residuals, report.term_scale):
        writer.writerow([f"{float(v):.17g}" for v in row])
