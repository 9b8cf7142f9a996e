"""Concentration bounds for beta_0 and for the Euler characteristic (d = 2).

Both bounds are of the Poisson-functional concentration type
exp(-(u/c) * log(1 + u/v)): super-exponential upper bounds on the upper
tail, valid above the stated centering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .moments import ModelParams


class TailQuantity(Enum):
    BETA0 = "beta0"
    CHI_2D = "chi2d"


@dataclass(frozen=True)
class TailBoundCurve:
    quantity: TailQuantity
    grid: tuple[tuple[float, float], ...]  # (threshold, bound) pairs

    def __post_init__(self):
        for _, b in self.grid:
            if not (0.0 < b <= 1.0):
                raise ValueError(f"bound values must lie in (0, 1], got {b}")


def beta0_tail_bound(params: ModelParams, y: float) -> float:
    """Upper bound on P(beta_0 >= y), valid for y > lambda * a^d.

    beta_0 is at most the number of points, whose mean is lambda * a^d; the
    bound compares against that proxy.  The constant (2^d - 1)^2 comes from
    the maximal change in beta_0 when one point is added.
    """
    d, a = params.spec.d, params.spec.a
    mean_proxy = params.lam * a ** d
    if y <= mean_proxy:
        raise ValueError(
            f"bound valid only above the mean proxy lambda*a^d = {mean_proxy}")
    u = y - mean_proxy
    v = (2 ** d - 1) ** 2 * params.lam
    return math.exp(-(u / 2.0) * math.log1p(u / v))


def chi2d_tail_bound(var_chi: float, x: float) -> float:
    """Upper bound on P(chi - E[chi] >= x) on the 2-torus.

    Uses that adding one point changes chi by at most 2.
    """
    if x <= 0.0:
        raise ValueError("deviation x must be positive")
    if var_chi <= 0.0:
        raise ValueError("var_chi must be positive")
    return math.exp(-(x / 4.0) * math.log1p(2.0 * x / var_chi))


def beta0_curve(params: ModelParams, thresholds) -> TailBoundCurve:
    grid = tuple((float(y), beta0_tail_bound(params, y)) for y in thresholds)
    return TailBoundCurve(quantity=TailQuantity.BETA0, grid=grid)


def chi2d_curve(var_chi: float, deviations) -> TailBoundCurve:
    grid = tuple((float(x), chi2d_tail_bound(var_chi, x)) for x in deviations)
    return TailBoundCurve(quantity=TailQuantity.CHI_2D, grid=grid)


@dataclass(frozen=True)
class BoundViolation:
    threshold: float
    bound: float
    empirical: float
    stderr: float


@dataclass(frozen=True)
class BoundReport:
    quantity: TailQuantity
    rows: tuple[tuple[float, float, float, float, bool], ...]
    violations: tuple[BoundViolation, ...]

    def to_csv(self) -> str:
        lines = ["quantity,threshold,bound,empirical,stderr,violated"]
        for thr, bound, emp, se, bad in self.rows:
            lines.append(f"{self.quantity.value},{thr!r},{bound!r},{emp!r},"
                         f"{se!r},{str(bad).lower()}")
        return "\n".join(lines) + "\n"


def validate_bound(curve: TailBoundCurve, empirical) -> BoundReport:
    """Check empirical tail estimates against a bound curve.

    ``empirical`` is a sequence of (threshold, p_hat, stderr) triples aligned
    with the curve's grid.  A grid point is violated when the empirical tail
    minus 3 standard errors of Monte Carlo noise still exceeds the bound.
    """
    rows = []
    violations = []
    by_thr = {float(t): (float(p), float(se)) for t, p, se in empirical}
    for thr, bound in curve.grid:
        if thr not in by_thr:
            raise ValueError(f"no empirical estimate at threshold {thr}")
        p_hat, se = by_thr[thr]
        bad = p_hat - 3.0 * se > bound
        rows.append((thr, bound, p_hat, se, bad))
        if bad:
            violations.append(BoundViolation(threshold=thr, bound=bound,
                                             empirical=p_hat, stderr=se))
    return BoundReport(quantity=curve.quantity, rows=tuple(rows),
                       violations=tuple(violations))
