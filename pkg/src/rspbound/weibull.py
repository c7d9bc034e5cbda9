"""Weibull transition times: density, survival, moments, sampling and the
mean residual time to failure (MRTF) ``G(h) = E[X | X >= h]``.

The MRTF needs the upper incomplete gamma function, implemented here with the
usual split: power series for the lower function when ``x < a + 1``,
modified-Lentz continued fraction for the upper function otherwise.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

_EPS = sys.float_info.epsilon
_TINY = sys.float_info.min / _EPS

INCGAMMA_RTOL = 1e-15
INCGAMMA_MAX_ITER = 500


@dataclass(frozen=True)
class WeibullParams:
    """Scale ``eta`` (time units) and shape ``gamma`` of one transition time.

    Construction does not validate, so that graph diagnostics can report bad
    parameters; every function below checks positivity.
    """

    eta: float
    gamma: float

    def is_valid(self) -> bool:
        return bool(self.eta > 0 and self.gamma > 0 and math.isfinite(self.eta) and math.isfinite(self.gamma))


@dataclass(frozen=True)
class BetaCondition:
    """``E[X | X >= h] <= E[X] + beta * h`` for all ``h >= 0``."""

    beta: float = 1.0

    def __post_init__(self):
        if not self.beta >= 1:
            raise DomainError(f"beta must be >= 1, got {self.beta}")


def _check(p: WeibullParams) -> None:
    if not p.is_valid():
        raise DomainError(f"Weibull parameters must be positive and finite, got eta={p.eta}, gamma={p.gamma}")


def _nonneg(name: str, t):
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError(f"{name} must be >= 0")
    return arr


def _out(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


def pdf(p: WeibullParams, t):
    _check(p)
    t = _nonneg("t", t)
    z = t / p.eta
    with np.errstate(divide="ignore"):
        dens = (p.gamma / p.eta) * z ** (p.gamma - 1) * np.exp(-(z**p.gamma))
    return _out(dens)


def survival(p: WeibullParams, h):
    _check(p)
    h = _nonneg("h", h)
    return _out(np.exp(-((h / p.eta) ** p.gamma)))


def hazard(p: WeibullParams, h):
    _check(p)
    h = _nonneg("h", h)
    with np.errstate(divide="ignore"):
        return _out((p.gamma / p.eta) * (h / p.eta) ** (p.gamma - 1))


def mean(p: WeibullParams) -> float:
    _check(p)
    return p.eta * math.gamma(1 + 1 / p.gamma)


def second_moment(p: WeibullParams) -> float:
    _check(p)
    return p.eta**2 * math.gamma(1 + 2 / p.gamma)


def sample(p: WeibullParams, u):
    """Inverse-CDF draw ``eta * (-ln u) ** (1/gamma)`` for ``u`` in (0, 1)."""
    _check(p)
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0) & (u < 1))):
        raise DomainError("u must lie in the open interval (0, 1)")
    return _out(p.eta * (-np.log(u)) ** (1 / p.gamma))


def _lower_series(a: float, x: float, rtol: float, max_iter: int) -> float:
    """Sum of the series for ``gamma(a, x) * exp(x) * x**-a``."""
    term = total = 1.0 / a
    ap = a
    for _ in range(max_iter):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * rtol:
            return total
    raise ConvergenceError(f"incomplete gamma series did not converge for a={a}, x={x}")


def _upper_cf(a: float, x: float, rtol: float, max_iter: int) -> float:
    """Continued fraction for ``Gamma(a, x) * exp(x) * x**-a`` (modified Lentz)."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b if b != 0 else 1.0 / _TINY
    h = d
    for i in range(1, max_iter + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < rtol:
            return h
    raise ConvergenceError(f"incomplete gamma continued fraction did not converge for a={a}, x={x}")


def _check_incgamma_args(a: float, x: float) -> None:
    if not (a > 0 and math.isfinite(a)):
        raise DomainError(f"a must be > 0, got {a}")
    if not (x >= 0):
        raise DomainError(f"x must be >= 0, got {x}")


def log_upper_incomplete_gamma(a: float, x: float, rtol: float = INCGAMMA_RTOL,
                               max_iter: int = INCGAMMA_MAX_ITER) -> float:
    """``log Gamma(a, x)``, finite even where ``Gamma(a, x)`` underflows."""
    _check_incgamma_args(a, x)
    if x == 0:
        return math.lgamma(a)
    if math.isinf(x):
        return -math.inf
    if x < a + 1:
        lower = math.exp(-x + a * math.log(x) - math.lgamma(a)) * _lower_series(a, x, rtol, max_iter)
        return math.lgamma(a) + math.log1p(-lower)
    return -x + a * math.log(x) + math.log(_upper_cf(a, x, rtol, max_iter))


def upper_incomplete_gamma(a: float, x: float, rtol: float = INCGAMMA_RTOL,
                           max_iter: int = INCGAMMA_MAX_ITER) -> float:
    """``Gamma(a, x) = integral from x to infinity of t**(a-1) exp(-t) dt``."""
    _check_incgamma_args(a, x)
    if x == 0:
        return math.gamma(a)
    if x < a + 1:
        series = _lower_series(a, x, rtol, max_iter)
        return math.gamma(a) - math.exp(-x + a * math.log(x)) * series
    return math.exp(-x + a * math.log(x)) * _upper_cf(a, x, rtol, max_iter)


def mrtf(p: WeibullParams, h: float) -> float:
    """Mean residual time to failure ``G(h) = E[X | X >= h]``.

    ``G(h) = eta * exp(x) * Gamma(1 + 1/gamma, x)`` with ``x = (h/eta)**gamma``;
    evaluated as ``eta * exp(x + log Gamma(...))`` so large ``h`` cannot overflow.
    """
    _check(p)
    if not h >= 0:
        raise DomainError(f"h must be >= 0, got {h}")
    x = (h / p.eta) ** p.gamma
    a = 1 + 1 / p.gamma
    if x < a + 1:
        return p.eta * math.exp(x) * upper_incomplete_gamma(a, x)
    # exp(x) * Gamma(a, x) = x**a * cf, which never overflows
    return p.eta * math.exp(a * math.log(x)) * _upper_cf(a, x, INCGAMMA_RTOL, INCGAMMA_MAX_ITER)


def mrtf_deriv(p: WeibullParams, h: float) -> float:
    """``G'(h) = gamma (h/eta)**gamma * ((eta/h) exp(x) Gamma(1+1/gamma, x) - 1)``.

    Equivalently hazard(h) * (G(h) - h).
    """
    _check(p)
    if not h > 0:
        raise DomainError(f"h must be > 0, got {h}")
    return p.gamma * (h / p.eta) ** p.gamma * (mrtf(p, h) / h - 1.0)


def mrtf_second_deriv(p: WeibullParams, h: float) -> float:
    """Derivative of :func:`mrtf_deriv`: ``lam'(h) (G - h) + lam(h) (G' - 1)``."""
    _check(p)
    if not h > 0:
        raise DomainError(f"h must be > 0, got {h}")
    g = p.gamma
    lam = (g / p.eta) * (h / p.eta) ** (g - 1)
    dlam = (g * (g - 1) / p.eta**2) * (h / p.eta) ** (g - 2)
    resid = mrtf(p, h) - h
    return dlam * resid + lam * (lam * resid - 1.0)


def verify_beta_condition(p: WeibullParams, beta: BetaCondition | float, h_grid, slack: float = 1e-9) -> bool:
    """True iff ``mrtf(h) <= mean + beta*h`` (within ``slack``) at every grid point."""
    _check(p)
    if not 1 <= p.gamma <= 2:
        raise DomainError(f"the beta condition is checked for shapes in [1, 2], got gamma={p.gamma}")
    b = beta.beta if isinstance(beta, BetaCondition) else BetaCondition(float(beta)).beta
    mu = mean(p)
    return all(mrtf(p, float(h)) <= mu + b * float(h) + slack for h in _nonneg("h", h_grid).ravel())
