"""Scalar free energy of the edge-p-star model.

The free energy is approximated by

    L = sup_{0 <= x <= 1} { a b1 x + a b2 x^p - I(x)/2 },

with entropy ``I(x) = x ln x + (1-x) ln(1-x)``. For b1, b2 < 0 the
maximiser is the unique root of ``a b1 + a b2 p x^{p-1} = (1/2) logit(x)``,
solved here by bisection in log-odds ``u = logit(x)`` because ``x`` can be
far below the smallest normal double.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import expit, log_expit

from .errors import NumericalDefect

MAX_BISECTION = 500
TINY_X = 1e-8


@dataclass(frozen=True)
class BoundParams:
    """Unspecified constants of the free-energy error bound (default 1)."""

    c: float = 1.0
    C: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and self.C > 0):
            raise ValueError("bound constants must be strictly positive")


@dataclass(frozen=True)
class VariationalResult:
    x_star: float
    log_odds: float
    residual: float
    L_n: float = math.nan
    ratio_Ln: float = math.nan

    def to_dict(self) -> dict:
        return {
            "x_star": self.x_star,
            "log_odds": self.log_odds,
            "L_n": self.L_n,
            "ratio_Ln": self.ratio_Ln,
            "residual": self.residual,
        }


def entropy_I(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"entropy_I needs x in [0, 1], got {x}")
    out = 0.0
    if x > 0:
        out += x * math.log(x)
    if x < 1:
        out += (1 - x) * math.log1p(-x)
    return out


def objective(x: float, beta1: float, beta2: float, p: int, alpha: float) -> float:
    """a b1 x + a b2 x^p - I(x)/2."""
    return alpha * beta1 * x + alpha * beta2 * x ** p - 0.5 * entropy_I(x)


def _rhs(u: float, beta1, beta2, p, alpha) -> float:
    # sigma(u)^{p-1} via log_expit: stays accurate when sigma(u) underflows
    return 2 * alpha * beta1 + 2 * alpha * beta2 * p * math.exp((p - 1) * float(log_expit(u)))


def solve_fixed_point(beta1: float, beta2: float, p: int, alpha: float) -> VariationalResult:
    """Unique optimiser x* of the scalar free energy for b1, b2 <= 0.

    Solves ``u = 2 a b1 + 2 a b2 p sigma(u)^{p-1}`` on the bracket
    ``[2a(b1 + b2 p), 2a b1]``; the right side decreases in u so
    ``u - rhs(u)`` is strictly increasing and changes sign on the bracket.
    """
    if beta1 > 0 or beta2 > 0:
        raise ValueError("solve_fixed_point needs beta1, beta2 <= 0")
    if p < 2 or alpha <= 0:
        raise ValueError("need p >= 2 and alpha > 0")
    lo = 2 * alpha * (beta1 + beta2 * p)
    hi = 2 * alpha * beta1

    def f(u):
        return u - _rhs(u, beta1, beta2, p, alpha)

    flo, fhi = f(lo), f(hi)
    for _ in range(MAX_BISECTION):
        if lo == hi:
            break
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = f(mid)
        if fm > 0:
            hi, fhi = mid, fm
        elif fm < 0:
            lo, flo = mid, fm
        else:
            lo = hi = mid
            flo = fhi = 0.0
            break
    else:
        raise NumericalDefect("fixed-point bisection did not converge")
    u = lo if abs(flo) <= abs(fhi) else hi
    return VariationalResult(x_star=float(expit(u)), log_odds=u, residual=abs(f(u)))


def variational_value(beta1: float, beta2: float, p: int, alpha: float) -> VariationalResult:
    """L_n at the optimiser and its ratio to e^{2 a b1}."""
    r = solve_fixed_point(beta1, beta2, p, alpha)
    x = r.x_star
    if x < TINY_X:
        # stationarity eliminates the linear term: a b2 x^p (1-p) - ln(1-x)/2
        L = alpha * beta2 * x ** p * (1 - p) - 0.5 * math.log1p(-x)
    else:
        L = objective(x, beta1, beta2, p, alpha)
    return VariationalResult(
        x_star=x,
        log_odds=r.log_odds,
        residual=r.residual,
        L_n=L,
        ratio_Ln=L * math.exp(-2 * alpha * beta1),
    )


def chatterjee_dembo_bound(B: float, n: float, bp: BoundParams = BoundParams()) -> tuple[float, float]:
    """Gap bracket for log Z_n / n^2 - L_n, up to the unspecified constants.

    lower = -c B / n
    upper = C B^{8/5} n^{-1/5} (ln n)^{1/5} (1 + ln B / ln n) + C B^2 n^{-1/2}
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if B <= 0:
        raise ValueError("B must be positive")
    ln = math.log(n)
    lower = -bp.c * B / n
    upper = (bp.C * B ** 1.6 * n ** -0.2 * ln ** 0.2 * (1 + math.log(B) / ln)
             + bp.C * B ** 2 * n ** -0.5)
    return lower, upper


def er_log_partition_approx(alpha: float, beta1: float) -> float:
    """Per-pair Erdos-Renyi log partition value -(1/2) ln(1 - e^{2 a b1})."""
    t = 2 * alpha * beta1
    if not t < 0:
        raise ValueError("need e^{2 alpha beta1} < 1")
    return -0.5 * math.log1p(-math.exp(t))
