"""
Five-parameter logistic mapping of objective scores onto the MOS scale
======================================================================

    g(x) = b1 * (1/2 - 1 / (1 + exp(b2 * (x - b3)))) + b4 * x + b5

b2 is kept positive by fitting u = log(b2).

Fit procedure:
    1. Nelder-Mead from a fixed data-derived starting point
    2. Nelder-Mead restarted from its own optimum while it keeps improving
    3. the least-squares line (b1 = 0) replaces it if that fits better
    4. Levenberg-Marquardt polish, kept only when it lowers the squared error

The result is never worse than the starting point or the straight line.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import optimize, special

from utils.errors import DegenerateScores, InsufficientData

logger = logging.getLogger(__name__)

MIN_FIT_SAMPLES = 5
MAX_ITER = 5000
XATOL = 1e-10
MAX_RESTARTS = 3


@dataclass(frozen=True)
class LogisticParams:
    b1: float
    b2: float
    b3: float
    b4: float
    b5: float

    def __post_init__(self):
        values = self.as_tuple()
        if not all(np.isfinite(values)):
            raise ValueError(f"logistic parameters must be finite, got {values}")
        if self.b2 <= 0:
            raise ValueError(f"b2 must be > 0, got {self.b2}")

    def as_tuple(self) -> Tuple[float, float, float, float, float]:
        return (self.b1, self.b2, self.b3, self.b4, self.b5)

    def __call__(self, x):
        return logistic(x, self)


@dataclass(frozen=True)
class LogisticFit:
    params: LogisticParams
    rmse: float
    initial_rmse: float
    iterations: int


def _curve(x: np.ndarray, b1, b2, b3, b4, b5) -> np.ndarray:
    # 1 / (1 + exp(t)) == expit(-t), which never overflows
    return b1 * (0.5 - special.expit(-b2 * (x - b3))) + b4 * x + b5


def logistic(x, params: LogisticParams):
    arr = np.asarray(x, dtype=np.float64)
    out = _curve(arr, *params.as_tuple())
    return float(out) if out.ndim == 0 else out


def _unpack(theta: np.ndarray) -> Tuple[float, ...]:
    b1, u, b3, b4, b5 = theta
    return b1, float(np.exp(np.clip(u, -700.0, 700.0))), b3, b4, b5


def _residuals(theta, x, y) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        return _curve(x, *_unpack(theta)) - y


def _sse(theta, x, y) -> float:
    r = _residuals(theta, x, y)
    value = float(np.dot(r, r))
    return value if np.isfinite(value) else np.inf


def initial_guess(scores, mos) -> np.ndarray:
    x = np.asarray(scores, dtype=np.float64)
    y = np.asarray(mos, dtype=np.float64)
    spread = float(np.ptp(y)) or 1.0
    return np.array([spread, -np.log(np.std(x)), np.mean(x), 0.0, np.mean(y)])


def fit_logistic(scores, mos) -> LogisticFit:
    """Least-squares fit of g to (scores, mos); deterministic for given inputs"""
    x = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(mos, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise InsufficientData(f"score/MOS length mismatch: {x.size} vs {y.size}")
    if x.size < MIN_FIT_SAMPLES:
        raise InsufficientData(f"logistic fit needs at least {MIN_FIT_SAMPLES} samples, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InsufficientData("scores and MOS must be finite")
    if np.var(x) == 0:
        raise DegenerateScores("cannot fit a logistic to constant scores")

    theta0 = initial_guess(x, y)
    best, best_sse = theta0, _sse(theta0, x, y)
    iterations = 0
    # converge on simplex size alone
    options = {"maxiter": MAX_ITER, "xatol": XATOL, "fatol": np.inf}

    start = theta0
    for attempt in range(1 + MAX_RESTARTS):
        res = optimize.minimize(_sse, start, args=(x, y), method="Nelder-Mead", options=options)
        iterations += int(res.nit)
        if not res.fun < best_sse:
            break
        best, best_sse = res.x, float(res.fun)
        start = res.x
        logger.debug(f"Nelder-Mead pass {attempt + 1}: sse={best_sse:.6g}")

    # the straight line (b1 = 0) is nested in g
    slope, intercept = np.polyfit(x, y, 1)
    linear = np.array([0.0, theta0[1], theta0[2], slope, intercept])
    linear_sse = _sse(linear, x, y)
    if linear_sse < best_sse:
        best, best_sse = linear, linear_sse

    method = "lm" if x.size >= len(theta0) else "trf"
    try:
        polish = optimize.least_squares(_residuals, best, args=(x, y), method=method, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        polished_sse = _sse(polish.x, x, y)
        if polished_sse < best_sse:
            best, best_sse = polish.x, polished_sse
    except (ValueError, np.linalg.LinAlgError) as e:
        logger.debug(f"least-squares polish skipped: {e}")

    n = x.size
    params = LogisticParams(*(float(v) for v in _unpack(best)))
    return LogisticFit(
        params=params,
        rmse=float(np.sqrt(best_sse / n)),
        initial_rmse=float(np.sqrt(_sse(theta0, x, y) / n)),
        iterations=iterations,
    )
