"""Recovery threshold curve rho*(p) for lp decoding over Gaussian ensembles.

For each exponent p in (0, 1] the threshold is defined through the
half-normal tail moment g(t): find the split point z* where g(z*) = g(0)/2,
then rho*(p) = 1 - F(z*).  The curve is strictly decreasing in p, from 1/2
in the p -> 0 limit down to 0.239... at p = 1.

An order-statistics Monte Carlo oracle estimates the same quantity from
raw samples (sort |X_i|**p, find the prefix holding half the total mass),
providing an independent anti-regression route for the analytic curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import halfnormal
from .errors import DomainError, NumericError
from .halfnormal import DEFAULT_QUADRATURE, MomentQuery, QuadratureConfig
from .seeding import generator_from

_BISECTION_MAX_ITER = 200
_BRACKET_HIGH = 10.0


@dataclass(frozen=True)
class ThresholdPoint:
    """One sample of the threshold curve: (p, z*, rho*, optional drho*/dp)."""

    p: float
    z_star: float
    rho_star: float
    drho_dp: float | None = None

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise DomainError(f"p must be in (0, 1], got {self.p}")
        if not self.z_star > 0:
            raise DomainError(f"z_star must be positive, got {self.z_star}")
        if not 0 < self.rho_star < 0.5:
            raise DomainError(f"rho_star must lie in (0, 0.5), got {self.rho_star}")
        if self.drho_dp is not None and not self.drho_dp < 0:
            raise DomainError(f"drho_dp must be negative when populated, got {self.drho_dp}")


@dataclass(frozen=True)
class CurveRequest:
    """Uniform p-grid sweep request; steps is the number of emitted points."""

    p_min: float
    p_max: float
    steps: int
    with_derivative: bool = False

    def __post_init__(self):
        if not (0 < self.p_min <= self.p_max <= 1):
            raise DomainError(
                f"need 0 < p_min <= p_max <= 1, got p_min={self.p_min}, p_max={self.p_max}"
            )
        if self.steps < 1:
            raise DomainError(f"steps must be >= 1, got {self.steps}")
        if self.steps == 1 and self.p_min != self.p_max:
            raise DomainError("a single-point request needs p_min == p_max")

    def p_values(self) -> list[float]:
        if self.steps == 1:
            return [self.p_min]
        span = self.p_max - self.p_min
        return [self.p_min + span * i / (self.steps - 1) for i in range(self.steps)]


def solve_zstar(
    p: float,
    tol: float = 1e-10,
    quadrature: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Split point z* with g(z*) = g(0)/2, by bisection on [0, 10].

    g is continuous and strictly decreasing from g(0) = E|X|**p to 0, so the
    root exists and is unique; bisection is unconditionally convergent.
    Returns z* with |g(z*) - g(0)/2| <= tol * g(0).
    """
    if not (math.isfinite(p) and 0 < p <= 1):
        raise DomainError(f"solve_zstar requires p in (0, 1], got {p}")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")

    g0 = halfnormal.tail_moment(MomentQuery(p=p, t=0.0), quadrature)
    target = 0.5 * g0
    lo, hi = 0.0, min(_BRACKET_HIGH, quadrature.z_max)
    best_z, best_resid = lo, g0 - target
    for _ in range(_BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        resid = halfnormal.tail_moment(MomentQuery(p=p, t=mid), quadrature) - target
        if abs(resid) < abs(best_resid):
            best_z, best_resid = mid, resid
        if abs(resid) <= tol * g0:
            return mid
        if resid > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, hi):
            break
    if abs(best_resid) <= tol * g0:
        return best_z
    raise NumericError(
        f"bisection could not reach |g(z*) - g(0)/2| <= {tol:g} * g(0) for p={p}; "
        f"best residual {best_resid:.3e}"
    )


def rho_star(
    p: float,
    tol: float = 1e-10,
    quadrature: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Recovery threshold rho*(p) = 1 - F(z*(p)); lies in (0, 1/2)."""
    zs = solve_zstar(p, tol=tol, quadrature=quadrature)
    return 1.0 - halfnormal.cdf(zs, quadrature)


def drho_dp(
    p: float,
    tol: float = 1e-10,
    quadrature: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Derivative of the threshold curve.

    Equals [int_0^z* x**p ln(x) f(x) dx - int_z*^inf x**p ln(x) f(x) dx] / (2 z***p),
    which is strictly negative: the defining balance of z* forces the
    numerator below zero.
    """
    zs = solve_zstar(p, tol=tol, quadrature=quadrature)
    lower, upper = halfnormal.log_moment_integrals(p, zs, quadrature)
    return (lower - upper) / (2.0 * zs ** p)


def curve(
    req: CurveRequest,
    tol: float = 1e-10,
    quadrature: QuadratureConfig = DEFAULT_QUADRATURE,
) -> list[ThresholdPoint]:
    """Threshold points on the uniform p-grid of ``req``.

    p = 0 is never sampled: the curve is defined for p > 0 only, and the
    limit value 1/2 is an annotation, not a data point.
    """
    points = []
    for p in req.p_values():
        zs = solve_zstar(p, tol=tol, quadrature=quadrature)
        rho = 1.0 - halfnormal.cdf(zs, quadrature)
        deriv = None
        if req.with_derivative:
            lower, upper = halfnormal.log_moment_integrals(p, zs, quadrature)
            deriv = (lower - upper) / (2.0 * zs ** p)
        points.append(ThresholdPoint(p=p, z_star=zs, rho_star=rho, drho_dp=deriv))
    return points


def mc_threshold_oracle(p: float, m: int, seed: int) -> float:
    """Empirical threshold from one sorted sample of m half-normal draws.

    Draw X_1..X_m ~ N(0,1), sort |X_i|**p in non-increasing order and return
    k/m for the smallest k whose prefix sum reaches half the total sum.  A
    consistent estimator of rho*(p); the draw is owned by a private stream,
    so identical seeds give identical estimates.
    """
    if not (math.isfinite(p) and 0 < p <= 1):
        raise DomainError(f"mc_threshold_oracle requires p in (0, 1], got {p}")
    if m < 10_000:
        raise DomainError(f"need m >= 10^4 for a meaningful estimate, got {m}")
    gen = generator_from(seed, 0)
    y = np.sort(np.abs(gen.standard_normal(m)) ** p)[::-1]
    prefix = np.cumsum(y)
    k = int(np.searchsorted(prefix, 0.5 * prefix[-1], side="left")) + 1
    return k / m


def curve_csv(points: list[ThresholdPoint]) -> str:
    """CSV rendering, header ``p,z_star,rho_star,drho_dp``, 9 significant digits.

    The derivative field is left empty for points where it was not computed.
    """
    lines = ["p,z_star,rho_star,drho_dp"]
    for pt in points:
        deriv = "" if pt.drho_dp is None else f"{pt.drho_dp:.9g}"
        lines.append(f"{pt.p:.9g},{pt.z_star:.9g},{pt.rho_star:.9g},{deriv}")
    return "\n".join(lines) + "\n"
