"""Five-parameter logistic mapping from objective to subjective scores.

    f(x) = b1 * (1/2 - 1 / (1 + exp(b2 * (x - b3)))) + b4 * x + b5

The fit minimises the sum of squared residuals with scipy's adaptive
Nelder-Mead simplex.  It works on standardised scores and maps the
parameters back afterwards.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

MAX_ITERATIONS = 20000
PARAM_TOL = 1e-9  # relative to the largest parameter
SSE_TOL = 1e-12   # relative to the current residual sum
EXACT_FIT_RMSE = 1e-10  # in standardised subjective units


class FitWarning(UserWarning):
    pass


@dataclass(frozen=True)
class LogisticParams:
    b1: float
    b2: float
    b3: float
    b4: float
    b5: float
    converged: bool = True
    iterations: int = 0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_tuple()):
            raise ValueError(f"non-finite logistic parameters: {self.as_tuple()}")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.b1, self.b2, self.b3, self.b4, self.b5)

    def __call__(self, x) -> np.ndarray:
        return logistic5(x, self.as_tuple())


def logistic5(x, b) -> np.ndarray:
    b1, b2, b3, b4, b5 = b
    x = np.asarray(x, dtype=np.float64)
    # 1 / (1 + exp(z)) == expit(-z), without overflow
    return b1 * (0.5 - expit(-b2 * (x - b3))) + b4 * x + b5


def initial_params(objective, subjective) -> np.ndarray:
    x = np.asarray(objective, dtype=np.float64)
    y = np.asarray(subjective, dtype=np.float64)
    sx = float(np.std(x))
    if sx == 0.0:
        raise ValueError("objective scores have zero variance; cannot fit a logistic")
    cov = float(np.mean((x - x.mean()) * (y - y.mean())))
    sign = -1.0 if cov < 0 else 1.0
    return np.array([
        float(np.ptp(y)) * sign,
        4.0 / sx,
        float(np.median(x)),
        0.0,
        float(np.mean(y)),
    ])


def fit_logistic5(objective, subjective, max_iter: int = MAX_ITERATIONS) -> LogisticParams:
    """Least-squares fit of :func:`logistic5`.

    Starts from b1 = range(subjective) * sign(correlation),
    b2 = 4 / std(objective), b3 = median(objective), b4 = 0 and
    b5 = mean(subjective).  Converged simplices are restarted around the best
    point while that still lowers the error.  If the iteration budget runs
    out, the best parameters so far are returned with ``converged=False``
    and a :class:`FitWarning` is issued.
    """
    x = np.asarray(objective, dtype=np.float64).ravel()
    y = np.asarray(subjective, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 5:
        raise ValueError(f"need at least 5 points to fit, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("inputs must be finite")
    b0 = initial_params(x, y)

    # standardise both axes so the simplex sees O(1) parameters
    mx, sx = float(x.mean()), float(np.std(x))
    my, sy = float(y.mean()), float(np.std(y))
    sy = sy if sy > 0 else 1.0
    z = (x - mx) / sx
    u = (y - my) / sy

    def to_internal(b):
        b1, b2, b3, b4, b5 = b
        return np.array([b1 / sy, b2 * sx, (b3 - mx) / sx, b4 * sx / sy, (b5 + b4 * mx - my) / sy])

    def to_external(c):
        c1, c2, c3, c4, c5 = c
        b4 = c4 * sy / sx
        return (c1 * sy, c2 / sx, c3 * sx + mx, b4, c5 * sy + my - b4 * mx)

    def sse(c):
        r = logistic5(z, c) - u
        v = float(np.dot(r, r))
        return v if math.isfinite(v) else math.inf

    c = to_internal(b0)
    f = sse(c)
    # residuals at rounding level: parameters along flat directions stay put
    exact = x.size * EXACT_FIT_RMSE ** 2

    def stop_when_exact(intermediate_result):
        if intermediate_result.fun <= exact:
            raise StopIteration

    used = 0
    converged = f <= exact
    while f > exact and used < max_iter:
        step = 0.1 * np.maximum(np.abs(c), 1.0)
        res = minimize(sse, c, method="Nelder-Mead", callback=stop_when_exact, options=dict(
            adaptive=True,
            initial_simplex=np.vstack([c, c + np.diag(step)]),
            maxiter=max_iter - used,
            maxfev=math.inf,
            xatol=PARAM_TOL * (1.0 + np.max(np.abs(c))),
            fatol=SSE_TOL * (1.0 + f),
        ))
        used += res.nit
        converged = res.status == 0 or res.fun <= exact
        improved = res.fun < f * (1.0 - 1e-12)
        if res.fun <= f:
            c, f = res.x, float(res.fun)
        if not converged or not improved:
            break
    if not converged:
        warnings.warn(
            f"logistic fit stopped after {used} iterations without converging; "
            "returning best parameters found",
            FitWarning,
            stacklevel=2,
        )
    return LogisticParams(*to_external(c), converged=converged, iterations=used)
