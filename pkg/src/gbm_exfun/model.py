"""Model parameters for X_t = mu*t + sigma*W_t and the constants derived from them."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import BranchError

# relative distance from the nonpositive real axis treated as "on the cut"
BRANCH_TOL = 1e-14


@dataclass(frozen=True)
class GbmParams:
    """Drift ``mu`` and volatility ``sigma`` of the driving Brownian motion.

    Derived quantities are properties, so they can never go stale.
    """

    mu: float
    sigma: float

    def __post_init__(self):
        mu = float(self.mu)
        sigma = float(self.sigma)
        if not math.isfinite(mu):
            raise ValueError(f"mu must be finite, got {self.mu!r}")
        if not (math.isfinite(sigma) and sigma > 0.0):
            raise ValueError(f"sigma must be finite and > 0, got {self.sigma!r}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def sigma2(self) -> float:
        return self.sigma * self.sigma

    @property
    def a(self) -> float:
        """Drift coefficient of the forward PDE, sigma^2/2 - mu."""
        return derived_a(self)

    @property
    def b(self) -> float:
        """Drift coefficient of the expanded PDE, mu + sigma^2/2."""
        return derived_b(self)

    @property
    def branch_point(self) -> float:
        """Frequency where mu^2 + 2*lambda*sigma^2 vanishes (always <= 0)."""
        return -self.mu * self.mu / (2.0 * self.sigma2)


@dataclass(frozen=True)
class ExponentK:
    """Root k of (sigma^2/2) k^2 - mu k - lambda = 0 on the principal branch."""

    value: complex

    def residual(self, params: GbmParams, lam: complex) -> complex:
        k = self.value
        return 0.5 * params.sigma2 * k * k - params.mu * k - lam


def derived_a(params: GbmParams) -> float:
    return 0.5 * params.sigma2 - params.mu


def derived_b(params: GbmParams) -> float:
    return params.mu + 0.5 * params.sigma2


def compute_k(params: GbmParams, lam: complex) -> ExponentK:
    """Positive-branch exponent ``k = (mu + sqrt(mu^2 + 2 lam sigma^2)) / sigma^2``.

    Real ``lam > 0`` gives a real, strictly positive k. For complex ``lam`` the
    principal square root is used; a discriminant on the cut raises
    :class:`BranchError` so the caller can move its node.
    """
    lam = complex(lam)
    mu, s2 = params.mu, params.sigma2
    disc = mu * mu + 2.0 * lam * s2
    if lam.imag == 0.0:
        if disc.real < 0.0:
            raise BranchError(f"discriminant {disc} negative for real lambda={lam.real}")
        return ExponentK(complex(_stable_root(mu, math.sqrt(disc.real), lam.real, s2), 0.0))
    scale = abs(mu * mu) + abs(2.0 * lam * s2)
    if disc.real <= 0.0 and abs(disc.imag) <= BRANCH_TOL * scale:
        raise BranchError(f"discriminant {disc} on the branch cut (lambda={lam})")
    return ExponentK(_stable_root(mu, cmath.sqrt(disc), lam, s2))


def _stable_root(mu, root, lam, s2):
    # (mu + root)(root - mu) = 2 lam s2; pick the form without cancellation
    if mu >= 0.0:
        return (mu + root) / s2
    return 2.0 * lam / (root - mu)
