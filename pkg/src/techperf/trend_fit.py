"""Log-linear trend estimation: exponential (Moore-type) and power-law
(Wright-type) fits by ordinary least squares."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["FitResult", "WrightFit", "fit_exponential", "fit_wright", "predict", "ols"]


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    n_points: int


@dataclass(frozen=True)
class WrightFit:
    c0: float
    w: float
    r_squared: float


def ols(x, y) -> tuple[float, float, float]:
    """Simple linear regression of ``y`` on ``x``.

    Returns (slope, intercept, r_squared). Uses centred sums, which keeps the
    slope unchanged under a shift of ``x``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if x.size < 2:
        raise ValueError("need at least two points")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite input")
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    dy = y - ym
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise ValueError("abscissa is constant; slope is undefined")
    slope = float(dx @ dy) / sxx
    intercept = float(ym - slope * xm)
    ss_tot = float(dy @ dy)
    resid = dy - slope * dx
    ss_res = float(resid @ resid)
    if ss_tot == 0.0:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return slope, intercept, r2


def _positive(name, v):
    v = np.asarray(v, dtype=float)
    if np.any(~(v > 0)):
        raise ValueError(f"{name} must be strictly positive")
    return v


def fit_exponential(t, values) -> FitResult:
    """Fit ``value = exp(intercept + slope * t)`` by OLS on ``ln(value)``."""
    t = np.asarray(t, dtype=float)
    v = _positive("values", values)
    slope, intercept, r2 = ols(t, np.log(v))
    return FitResult(slope, intercept, r2, int(t.size))


def fit_wright(production, cost) -> WrightFit:
    """Fit ``cost = c0 * production ** -w`` by OLS in log-log space."""
    p = _positive("production", production)
    c = _positive("cost", cost)
    slope, intercept, r2 = ols(np.log(p), np.log(c))
    return WrightFit(math.exp(intercept), -slope, r2)


def predict(fit: FitResult, t):
    out = np.exp(fit.intercept + fit.slope * np.asarray(t, dtype=float))
    return float(out) if np.ndim(out) == 0 else out
