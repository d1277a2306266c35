"""Probability-equivalent level of VaR and n-th-order Expected Shortfall.

For a level eps in (0, 1), the equivalent multiplier is the smallest
c in [1, 1/eps] with ES_n(1 - c*eps) <= VaR(1 - eps); the result is
infinite when no such c exists, which happens exactly when
ES_n(0) > VaR(1 - eps).

The solver is plain bisection: c -> ES_n(1 - c*eps) is continuous and
nonincreasing in c, and nothing stronger (differentiability in particular)
is guaranteed, so Newton-type schemes are out.  Closed-form values and the
small-level limit for regularly varying tails are exposed alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .distributions import (
    DistributionModel,
    ExcessGPD,
    Exponential,
    GeneralizedPareto,
    Normal,
    Pareto,
    Uniform,
    quantile,
)
from .errors import (
    AlphaOutOfRange,
    BracketFailure,
    InvalidParameter,
    KappaOutOfRange,
    LevelOutOfRange,
    NoClosedForm,
)
from .risk_measures import (
    _GL_NODES,
    _GL_WEIGHTS,
    DEFAULT_REL_TOL,
    _pareto_order_sum,
    es_n,
    es_n_quadrature,
    harmonic_number,
)

__all__ = [
    "PelveResult",
    "DEFAULT_C_TOL",
    "pelve_exists",
    "pelve",
    "pelve_from_quantile",
    "pelve_closed",
    "pelve2_rv_limit",
    "karamata_ratio",
]

DEFAULT_C_TOL = 1e-9


@dataclass(frozen=True)
class PelveResult:
    """Outcome of an equivalent-level computation.

    ``value`` is the finite multiplier c in [1, 1/eps], or None when the
    defining set is empty.  ``residual`` is |ES_n(1 - c*eps) - VaR(1 - eps)|
    at the returned c (zero for closed forms and for the infinite outcome).
    """

    value: Optional[float]
    iterations: int = 0
    residual: float = 0.0

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    @staticmethod
    def finite(c: float, iterations: int = 0, residual: float = 0.0) -> "PelveResult":
        return PelveResult(c, iterations, residual)

    @staticmethod
    def infinite() -> "PelveResult":
        return PelveResult(None)


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise LevelOutOfRange(f"epsilon must lie in (0, 1), got {eps}")


def _check_c_tol(c_tol: float) -> None:
    if not 1e-12 <= c_tol <= 1e-3:
        raise InvalidParameter(f"c_tol must lie in [1e-12, 1e-3], got {c_tol}")


def _level_floor(dist: DistributionModel) -> float:
    # An excess-over-threshold model is specified only above its base CDF
    # value, so ES evaluations (and the solver's c range) stop there.
    return dist.base_cdf_at_u if isinstance(dist, ExcessGPD) else 0.0


def pelve_exists(
    dist: DistributionModel,
    n: int,
    eps: float,
    rel_tol: float = DEFAULT_REL_TOL,
) -> bool:
    """Finiteness check: ES_n(0) <= VaR(1 - eps).

    Equivalent to the multiplier being finite, because ES_n(0) is the
    infimum of c -> ES_n(1 - c*eps) over [1, 1/eps].  For an
    excess-over-threshold model the infimum is taken at the base CDF value,
    below which the model says nothing.
    """
    _check_eps(eps)
    floor = _level_floor(dist)
    return es_n(dist, n, floor, rel_tol).value <= quantile(dist, 1.0 - eps)


def _solve(
    es_fn: Callable[[float], float],
    var_at_level: float,
    eps: float,
    c_tol: float,
    p_floor: float = 0.0,
) -> PelveResult:
    """Bisection on g(c) = ES_n(1 - c*eps) - var_at_level over
    [1, (1 - p_floor)/eps]; assumes g at the right endpoint <= 0 has
    already been established."""
    g1 = es_fn(1.0 - eps) - var_at_level
    if g1 <= 0.0:
        # Infimum attained at the left endpoint; the equation form need not
        # hold there, so the residual is reported as-is.
        return PelveResult.finite(1.0, iterations=0, residual=abs(g1))

    c_max = (1.0 - p_floor) / eps

    def g(c: float) -> float:
        # 1 - c*eps can round a hair below the floor at c = c_max; clamp it.
        return es_fn(max(1.0 - c * eps, p_floor)) - var_at_level

    if g(c_max) > 0.0:
        raise BracketFailure(
            "ES_n(0) > VaR(1 - eps) at solver precision despite a passing "
            "existence check; retry with a tighter rel_tol"
        )

    lo, hi = 1.0, c_max
    width_goal = c_tol * (c_max - 1.0)
    iterations = 0
    while hi - lo > width_goal:
        mid = 0.5 * (lo + hi)
        iterations += 1
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    c = 0.5 * (lo + hi)
    return PelveResult.finite(c, iterations, abs(g(c)))


def pelve(
    dist: DistributionModel,
    n: int,
    eps: float,
    c_tol: float = DEFAULT_C_TOL,
    rel_tol: float = DEFAULT_REL_TOL,
) -> PelveResult:
    """Equivalent-level multiplier of ``dist`` at level ``eps`` and order
    ``n``, by existence check plus bisection."""
    _check_eps(eps)
    _check_c_tol(c_tol)
    if not pelve_exists(dist, n, eps, rel_tol):
        return PelveResult.infinite()
    var_level = quantile(dist, 1.0 - eps)
    return _solve(
        lambda p: es_n(dist, n, p, rel_tol).value,
        var_level,
        eps,
        c_tol,
        p_floor=_level_floor(dist),
    )


def pelve_from_quantile(
    quantile_fn: Callable[[float], float],
    n: int,
    eps: float,
    c_tol: float = DEFAULT_C_TOL,
    rel_tol: float = DEFAULT_REL_TOL,
    tail_quantile_fn: Callable[[float], float] = None,
) -> PelveResult:
    """Same contract as :func:`pelve`, for an arbitrary quantile function;
    every Expected Shortfall evaluation goes through quadrature.  An
    optional ``tail_quantile_fn(t)`` = quantile at 1 - t sharpens heavy
    tails (see :func:`es_n_quadrature`)."""
    _check_eps(eps)
    _check_c_tol(c_tol)
    var_level = quantile_fn(1.0 - eps)

    def es_at(p: float) -> float:
        return es_n_quadrature(quantile_fn, n, p, rel_tol, tail_quantile_fn).value

    if es_at(0.0) > var_level:
        return PelveResult.infinite()
    return _solve(es_at, var_level, eps, c_tol)


def _closed_value_and_threshold(
    dist: DistributionModel, n: int
) -> tuple[float, float]:
    """(multiplier, largest eps for which it applies) for the closed-form
    table; raises NoClosedForm outside it."""
    if isinstance(dist, Uniform):
        return float(n + 1), 1.0 / (n + 1)

    if isinstance(dist, Exponential):
        h = harmonic_number(n)
        return math.exp(h), math.exp(-h)

    if isinstance(dist, Pareto):
        if dist.tail <= 1.0:
            raise NoClosedForm("Pareto needs tail > 1 for a first moment")
        s = _pareto_order_sum(n, dist.tail)
        return s ** dist.tail, s ** -dist.tail

    if isinstance(dist, (GeneralizedPareto, ExcessGPD)):
        if n != 2:
            raise NoClosedForm(
                "generalized-Pareto closed form is available at order 2 only"
            )
        if isinstance(dist, ExcessGPD):
            kappa, fu = dist.shape, dist.base_cdf_at_u
        else:
            kappa, fu = dist.shape, 0.0
        if kappa >= 1.0:
            raise NoClosedForm("generalized Pareto needs shape < 1")
        if kappa == 0.0:
            value = math.exp(1.5)
        else:
            value = (2.0 / ((1.0 - kappa) * (2.0 - kappa))) ** (1.0 / kappa)
        # The applicable eps range is scaled down by the survival mass above
        # the threshold; the endpoint is treated as attained.
        return value, (1.0 - fu) / value

    raise NoClosedForm(f"no closed multiplier for {dist!r}")


def pelve_closed(dist: DistributionModel, n: int, eps: float) -> PelveResult:
    """Closed-form multiplier where the family admits one: uniform,
    exponential and Pareto at every order; generalized-Pareto-type models
    at order 2.  Below the family threshold the value is a constant
    independent of eps; above it the result is infinite."""
    _check_eps(eps)
    value, threshold = _closed_value_and_threshold(dist, n)
    if eps <= threshold:
        return PelveResult.finite(value)
    return PelveResult.infinite()


def pelve2_rv_limit(alpha: float) -> float:
    """Small-level limit of the order-2 multiplier for a nonnegative random
    variable with a regularly varying tail of index alpha > 1:
    (2*alpha^2 / ((alpha-1)*(2*alpha-1)))^alpha.

    Strictly decreasing in alpha with infimum e^(3/2).
    """
    if not alpha > 1.0:
        raise AlphaOutOfRange(f"tail index must exceed 1, got {alpha}")
    return (2.0 * alpha * alpha / ((alpha - 1.0) * (2.0 * alpha - 1.0))) ** alpha


def _power_integral(kappa: float, eps: float, levels: int) -> float:
    # integral(0..eps) v^kappa dv on panels [eps*2^-(j+1), eps*2^-j] plus a
    # closing panel [0, eps*2^-levels].  Grading toward 0 works arbitrarily
    # deep because doubles stay dense near 0, unlike near 1.
    hi = eps * 2.0 ** -np.arange(levels + 1)
    lo = np.concatenate((hi[1:], [0.0]))
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo))[:, None] + half[:, None] * _GL_NODES[None, :]
    return float(((nodes ** kappa) @ _GL_WEIGHTS * half).sum())


def karamata_ratio(
    kappa_rv: float, eps: float, rel_tol: float = DEFAULT_REL_TOL
) -> float:
    """Numeric ratio integral(0..eps) v^kappa dv / (eps * eps^kappa) for the
    power kernel, which equals 1/(kappa + 1) for every eps.

    Serves as a numeric verification of the small-level limit that drives
    the regularly-varying asymptotics; the kernel has an integrable
    singularity at 0 for kappa < 0, resolved by geometric panel grading
    toward the origin.
    """
    if not kappa_rv > -1.0:
        raise KappaOutOfRange(f"index must exceed -1, got {kappa_rv}")
    _check_eps(eps)
    levels = 64
    prev = _power_integral(kappa_rv, eps, levels)
    while levels <= 1024:
        levels *= 2
        cur = _power_integral(kappa_rv, eps, levels)
        if abs(cur - prev) <= rel_tol * abs(cur):
            return cur / eps ** (kappa_rv + 1.0)
        prev = cur
    raise KappaOutOfRange(
        f"power integral did not converge for index {kappa_rv}"
    )
