"""Analytic distribution families: exact CDFs, quantile (VaR) functions and
inverse-transform sampling.

Families
--------
Uniform(a, b), Exponential(rate), Normal(mean, stddev), Pareto(scale, tail),
GeneralizedPareto(shape, scale) and ExcessGPD -- a random variable whose
excess distribution over a threshold ``u`` is generalized Pareto, described
by the scalar base CDF value at ``u`` only.

All quantiles are closed-form.  The normal quantile uses the Cephes inverse
normal CDF (``scipy.special.ndtri``, absolute error below 1e-15); the normal
CDF uses the error-function route (``scipy.special.ndtr``).

Sampling is inverse-transform with a fixed, named 64-bit generator (PCG64),
so results are bit-reproducible for a given seed.  Seed 0 is legal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import (
    ExcessGPDBelowThreshold,
    ExcessGPDLevelBelowBase,
    InvalidParameter,
    LevelOutOfRange,
)

__all__ = [
    "Uniform",
    "Exponential",
    "Normal",
    "Pareto",
    "GeneralizedPareto",
    "ExcessGPD",
    "DistributionModel",
    "cdf",
    "quantile",
    "tail_quantile",
    "sample",
]


def _check_level(p: float) -> None:
    # VaR at p=0 would be -inf by convention; we reject it instead.
    if not 0.0 < p < 1.0:
        raise LevelOutOfRange(f"level must lie in (0, 1), got {p}")


@dataclass(frozen=True)
class Uniform:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise InvalidParameter("Uniform requires lower < upper")

    def cdf(self, x: float) -> float:
        if x <= self.lower:
            return 0.0
        if x >= self.upper:
            return 1.0
        return (x - self.lower) / (self.upper - self.lower)

    def quantile(self, p: float) -> float:
        _check_level(p)
        return self.lower + (self.upper - self.lower) * p


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise InvalidParameter("Exponential requires rate > 0")

    def cdf(self, x: float) -> float:
        if x < 0:
            return 0.0
        return -math.expm1(-self.rate * x)

    def quantile(self, p: float) -> float:
        _check_level(p)
        return -math.log1p(-p) / self.rate


@dataclass(frozen=True)
class Normal:
    mean: float
    stddev: float

    def __post_init__(self):
        if not self.stddev > 0:
            raise InvalidParameter("Normal requires stddev > 0")

    def cdf(self, x: float) -> float:
        return float(ndtr((x - self.mean) / self.stddev))

    def quantile(self, p: float) -> float:
        _check_level(p)
        return self.mean + self.stddev * float(ndtri(p))


@dataclass(frozen=True)
class Pareto:
    scale: float  # k, left endpoint of the support
    tail: float   # alpha; first moment needs tail > 1

    def __post_init__(self):
        if not (self.scale > 0 and self.tail > 0):
            raise InvalidParameter("Pareto requires scale > 0 and tail > 0")

    def cdf(self, x: float) -> float:
        if x < self.scale:
            return 0.0
        return 1.0 - (self.scale / x) ** self.tail

    def quantile(self, p: float) -> float:
        _check_level(p)
        return self.scale * (1.0 - p) ** (-1.0 / self.tail)


@dataclass(frozen=True)
class GeneralizedPareto:
    shape: float  # kappa; first moment needs shape < 1
    scale: float  # beta

    def __post_init__(self):
        if not self.scale > 0:
            raise InvalidParameter("GeneralizedPareto requires scale > 0")

    def cdf(self, x: float) -> float:
        k, b = self.shape, self.scale
        if x < 0:
            return 0.0
        if k == 0.0:
            return -math.expm1(-x / b)
        if k < 0 and x > -b / k:
            return 1.0
        return 1.0 - (1.0 + k * x / b) ** (-1.0 / k)

    def quantile(self, p: float) -> float:
        _check_level(p)
        k, b = self.shape, self.scale
        if k == 0.0:
            return -b * math.log1p(-p)
        return (b / k) * ((1.0 - p) ** (-k) - 1.0)


@dataclass(frozen=True)
class ExcessGPD:
    """Random variable whose excess distribution over ``threshold`` is
    generalized Pareto.  Only the base CDF value at the threshold enters any
    formula above it, so the base distribution is reduced to that scalar."""

    threshold: float       # u
    shape: float           # kappa
    scale: float           # beta
    base_cdf_at_u: float   # F_X(u)

    def __post_init__(self):
        if self.threshold < 0:
            raise InvalidParameter("ExcessGPD requires threshold >= 0")
        if not self.scale > 0:
            raise InvalidParameter("ExcessGPD requires scale > 0")
        if not 0.0 <= self.base_cdf_at_u < 1.0:
            raise InvalidParameter("ExcessGPD requires base_cdf_at_u in [0, 1)")

    def cdf(self, x: float) -> float:
        if x < self.threshold:
            raise ExcessGPDBelowThreshold(
                f"CDF undefined below threshold u={self.threshold}, got x={x}"
            )
        fu = self.base_cdf_at_u
        g = GeneralizedPareto(self.shape, self.scale).cdf(x - self.threshold)
        return fu + (1.0 - fu) * g

    def quantile(self, p: float) -> float:
        _check_level(p)
        fu = self.base_cdf_at_u
        if p <= fu:
            raise ExcessGPDLevelBelowBase(
                f"quantile requires p > base_cdf_at_u={fu}, got p={p}"
            )
        k, b, u = self.shape, self.scale, self.threshold
        ratio = (1.0 - p) / (1.0 - fu)
        if k == 0.0:
            return u - b * math.log(ratio)
        return u + (b / k) * (ratio ** (-k) - 1.0)


DistributionModel = Union[
    Uniform, Exponential, Normal, Pareto, GeneralizedPareto, ExcessGPD
]


def cdf(dist: DistributionModel, x: float) -> float:
    """Exact cumulative distribution function of ``dist`` at ``x``."""
    return dist.cdf(x)


def quantile(dist: DistributionModel, p: float) -> float:
    """Value at Risk of ``dist`` at level ``p`` in (0, 1): the lower
    quantile inf{x : F(x) >= p}, by the family's closed form."""
    return dist.quantile(p)


def tail_quantile(dist: DistributionModel, t: float) -> float:
    """VaR at level 1 - t, computed from the tail probability ``t`` directly.

    Equals quantile(dist, 1 - t) but stays accurate for t far below the
    float spacing at 1, which matters when integrating heavy tails.
    """
    if not 0.0 < t < 1.0:
        raise LevelOutOfRange(f"tail probability must lie in (0, 1), got {t}")
    if isinstance(dist, Uniform):
        return dist.upper - (dist.upper - dist.lower) * t
    if isinstance(dist, Exponential):
        return -math.log(t) / dist.rate
    if isinstance(dist, Normal):
        return dist.mean - dist.stddev * float(ndtri(t))
    if isinstance(dist, Pareto):
        return dist.scale * t ** (-1.0 / dist.tail)
    if isinstance(dist, GeneralizedPareto):
        k, b = dist.shape, dist.scale
        if k == 0.0:
            return -b * math.log(t)
        return (b / k) * (t ** -k - 1.0)
    if isinstance(dist, ExcessGPD):
        fu = dist.base_cdf_at_u
        if t >= 1.0 - fu:
            raise ExcessGPDLevelBelowBase(
                f"tail probability must be below 1 - base_cdf_at_u = {1.0 - fu}"
            )
        k, b, u = dist.shape, dist.scale, dist.threshold
        ratio = t / (1.0 - fu)
        if k == 0.0:
            return u - b * math.log(ratio)
        return u + (b / k) * (ratio ** -k - 1.0)
    raise InvalidParameter(f"unsupported distribution {dist!r}")


def _quantile_array(dist: DistributionModel, u: np.ndarray) -> np.ndarray:
    # Vectorized mirror of the per-family closed forms above.
    if isinstance(dist, Uniform):
        return dist.lower + (dist.upper - dist.lower) * u
    if isinstance(dist, Exponential):
        return -np.log1p(-u) / dist.rate
    if isinstance(dist, Normal):
        return dist.mean + dist.stddev * ndtri(u)
    if isinstance(dist, Pareto):
        return dist.scale * (1.0 - u) ** (-1.0 / dist.tail)
    if isinstance(dist, GeneralizedPareto):
        if dist.shape == 0.0:
            return -dist.scale * np.log1p(-u)
        return (dist.scale / dist.shape) * ((1.0 - u) ** (-dist.shape) - 1.0)
    return np.array([dist.quantile(ui) for ui in u])


def sample(dist: DistributionModel, seed: int, count: int) -> np.ndarray:
    """Draw ``count`` inverse-transform samples, deterministic in ``seed``.

    Uses PCG64 uniforms pushed through the closed-form quantile, so samples
    of any family share one reproducible source of randomness.
    """
    if count < 1:
        raise InvalidParameter(f"count must be >= 1, got {count}")
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(count)
    # rng.random() yields [0, 1); shift exact zeros off the rejected level 0.
    u[u == 0.0] = np.finfo(float).tiny
    if isinstance(dist, ExcessGPD):
        # Map uniforms into (base_cdf_at_u, 1) where the model is defined.
        u = dist.base_cdf_at_u + (1.0 - dist.base_cdf_at_u) * u
        return np.array([dist.quantile(ui) for ui in u])
    return _quantile_array(dist, u)
