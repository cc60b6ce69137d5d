"""Monte Carlo ground truth for the law of I_t.

X is sampled exactly on a time grid (Gaussian increments); only the time
integral of exp(-X) is discretized. Each path draws from its own
counter-based stream keyed by (seed, path index), so results do not depend
on block size or thread count.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._backend import kernels, thread_count
from .model import GbmParams

INTEGRATORS = ("trapezoid", "riemann_left")
BLOCK_PATHS = 1 << 16


@dataclass(frozen=True)
class McConfig:
    paths: int = 100_000
    steps_per_unit_time: int = 1000
    horizon: float = 1.0
    seed: int = 0
    integrator: str = "trapezoid"

    def __post_init__(self):
        if int(self.paths) < 1:
            raise ValueError(f"paths must be >= 1, got {self.paths}")
        if int(self.steps_per_unit_time) < 1:
            raise ValueError(f"steps_per_unit_time must be >= 1, got {self.steps_per_unit_time}")
        if not self.horizon > 0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}, got {self.integrator!r}")


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    n_effective: int
    bias_note: str = "first_order_in_dt"
    bandwidth: float | None = None


def time_grid(t_points: Sequence[float], steps_per_unit_time: int):
    """Step lengths and record indices for a uniform grid refined by ``t_points``."""
    t_points = np.asarray(t_points, dtype=float)
    t_max = float(t_points[-1])
    n_uniform = int(math.floor(t_max * steps_per_unit_time + 1e-9))
    nodes = np.concatenate([np.arange(1, n_uniform + 1) / steps_per_unit_time, t_points])
    nodes = np.unique(nodes)
    keep = np.concatenate([[True], np.diff(nodes) > 1e-12 * max(1.0, t_max)])
    nodes = nodes[keep]
    record_idx = np.searchsorted(nodes, t_points - 1e-12 * max(1.0, t_max))
    dts = np.diff(np.concatenate([[0.0], nodes]))
    return dts, record_idx.astype(np.int64)


def simulate_integrals(params: GbmParams, cfg: McConfig, t_points: Sequence[float]) -> np.ndarray:
    """Sample I_t for every path (rows) at every time in ``t_points`` (columns)."""
    t_points = [float(t) for t in t_points]
    if not t_points:
        raise ValueError("t_points must be nonempty")
    if any(t <= 0 for t in t_points) or any(b <= a for a, b in zip(t_points, t_points[1:])):
        raise ValueError("t_points must be positive and strictly increasing")
    if t_points[-1] > cfg.horizon * (1 + 1e-12):
        raise ValueError(f"t_points exceed horizon {cfg.horizon}")
    dts, record_idx = time_grid(t_points, int(cfg.steps_per_unit_time))
    out = np.empty((int(cfg.paths), len(t_points)), dtype=np.float64)
    threads = thread_count()
    trapezoid = cfg.integrator == "trapezoid"
    for start in range(0, int(cfg.paths), BLOCK_PATHS):
        n = min(BLOCK_PATHS, int(cfg.paths) - start)
        kernels.integrate_paths(params.mu, params.sigma, dts, record_idx, int(cfg.seed),
                                start, n, trapezoid, out[start:start + n], threads)
    return out


def empirical_cdf(samples, y: float) -> McEstimate:
    """Fraction of samples <= y with binomial standard error."""
    samples = np.asarray(samples, dtype=float).ravel()
    n = samples.size
    if n == 0:
        raise ValueError("samples must be nonempty")
    p = np.count_nonzero(samples <= y) / n
    return McEstimate(float(p), math.sqrt(p * (1.0 - p) / n), n)


def silverman_bandwidth(samples) -> float:
    samples = np.asarray(samples, dtype=float).ravel()
    n = samples.size
    spread = samples.std(ddof=1) if n > 1 else 0.0
    q75, q25 = np.percentile(samples, [75, 25])
    iqr = (q75 - q25) / 1.34
    scale = min(spread, iqr) if iqr > 0 else spread
    if not scale > 0:
        scale = 1.0
    return 0.9 * scale * n ** (-0.2)


def empirical_pdf(samples, y: float, bandwidth: float | None = None) -> McEstimate:
    """Gaussian-kernel density estimate at ``y``; Silverman's rule when no bandwidth given.

    The standard error is the sample standard deviation of the kernel values
    over sqrt(n); it ignores smoothing bias.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    n = samples.size
    if n == 0:
        raise ValueError("samples must be nonempty")
    h = silverman_bandwidth(samples) if bandwidth is None else float(bandwidth)
    if not h > 0:
        raise ValueError(f"bandwidth must be > 0, got {bandwidth}")
    u = (y - samples) / h
    k = np.exp(-0.5 * u * u) / (h * math.sqrt(2.0 * math.pi))
    se = float(k.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return McEstimate(float(k.mean()), se, n, bandwidth=h)


def dump_samples_csv(fh, samples, t_points) -> None:
    """Write ``path_id,t,I_t`` rows to an open text file."""
    samples = np.asarray(samples, dtype=float)
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["path_id", "t", "I_t"])
    for pid, row in enumerate(samples):
        for t, v in zip(t_points, row):
            writer.writerow([pid, repr(float(t)), repr(float(v))])
