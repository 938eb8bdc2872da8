"""Least-squares fringe fitting: ``y = C + A cos(2 pi x / period + phase)``.

For a fixed period the model is linear in ``(C, A cos(phase), -A sin(phase))``,
so the period is found by a frequency grid search followed by golden-section
refinement of the residual, and everything else comes from one linear solve.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np


class DegenerateFitError(ValueError):
    """Raised when the fitted baseline is not positive or the period search fails."""


@dataclass(frozen=True)
class FitResult:
    visibility: float
    period: float
    phase_offset: float
    baseline: float
    visibility_sigma: float

    def to_dict(self) -> dict:
        return {k: (None if isinstance(v, float) and math.isnan(v) else v)
                for k, v in asdict(self).items()}


def _design(x: np.ndarray, freq: float) -> np.ndarray:
    w = 2.0 * np.pi * freq * x
    return np.column_stack([np.ones_like(x), np.cos(w), np.sin(w)])


def _solve(x: np.ndarray, y: np.ndarray, freq: float):
    X = _design(x, freq)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    return coef, float(resid @ resid), X


def fit_sinusoid_xy(x, y, period_bounds: tuple[float, float] | None = None,
                    oversample: int = 20) -> FitResult:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if x.size < 4:
        raise ValueError("need at least 4 points to fit a fringe")
    if np.any(np.diff(x) <= 0):
        raise ValueError("x must be strictly increasing")

    scale = max(float(np.max(np.abs(y))), 1e-300)
    if float(np.ptp(y)) <= 1e-12 * scale:
        mean = float(np.mean(y))
        if mean <= 0:
            raise DegenerateFitError(f"nonpositive constant baseline {mean}")
        return FitResult(0.0, math.nan, 0.0, mean, 0.0)

    span = float(x[-1] - x[0])
    if period_bounds is None:
        period_bounds = (2.0 * float(np.median(np.diff(x))), 2.0 * span)
    pmin, pmax = period_bounds
    if not 0 < pmin < pmax:
        raise ValueError(f"bad period bounds {period_bounds}")

    # Uniform in frequency: the residual well has width ~1/span there.
    fmin, fmax = 1.0 / pmax, 1.0 / pmin
    n = max(64, int(math.ceil((fmax - fmin) * span * oversample)) + 1)
    freqs = np.linspace(fmin, fmax, n)
    rss = np.array([_solve(x, y, f)[1] for f in freqs])
    i = int(np.argmin(rss))
    lo, hi = freqs[max(i - 1, 0)], freqs[min(i + 1, n - 1)]

    best_f = _golden(lambda f: _solve(x, y, f)[1], lo, hi, float(freqs[i]))
    if not np.isfinite(best_f):
        raise DegenerateFitError("period search did not converge")

    coef, _, X = _solve(x, y, best_f)
    C, a, b = (float(c) for c in coef)
    if C <= 0:
        raise DegenerateFitError(f"nonpositive baseline {C}")
    A = math.hypot(a, b)
    V = A / C
    phase = math.atan2(-b, a)

    # Poisson propagation with the fitted model as variance, period held fixed.
    var_y = np.clip(X @ coef, 0.0, None)
    XtX_inv = np.linalg.inv(X.T @ X)
    H = XtX_inv @ X.T
    cov = H @ (var_y[:, None] * H.T)
    if A > 0:
        grad = np.array([-V / C, a / (A * C), b / (A * C)])
    else:
        grad = np.array([0.0, 1.0 / C, 0.0])
    sigma = math.sqrt(max(float(grad @ cov @ grad), 0.0))
    return FitResult(V, float(1.0 / best_f), phase, C, sigma)


def _golden(fun, a: float, b: float, fallback: float, tol: float = 1e-15,
            maxiter: int = 300) -> float:
    """Golden-section minimum on ``[a, b]``; returns ``fallback`` if that is lower."""
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - gr * (b - a), a + gr * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(maxiter):
        if b - a <= tol * abs(b):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = fun(d)
    best = (a + b) / 2.0
    return best if fun(best) <= fun(fallback) else fallback
