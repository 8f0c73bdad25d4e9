"""
Rank and linear agreement between objective scores and MOS
"""

import numpy as np
from scipy import stats

from utils.errors import DegenerateScores, InsufficientData


def _paired(scores, mos):
    x = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(mos, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise InsufficientData(f"score/MOS length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise InsufficientData(f"need at least 2 samples, got {x.size}")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise DegenerateScores("correlation undefined for constant input")
    return x, y


def srcc(scores, mos) -> float:
    """Spearman rank correlation; ties get average ranks"""
    x, y = _paired(scores, mos)
    rx = stats.rankdata(x, method="average")
    ry = stats.rankdata(y, method="average")
    return float(np.corrcoef(rx, ry)[0, 1])


def krcc(scores, mos) -> float:
    """Kendall tau-b"""
    x, y = _paired(scores, mos)
    tau, _ = stats.kendalltau(x, y, variant="b")
    return float(tau)


def pearson(x, y) -> float:
    x, y = _paired(x, y)
    return float(np.corrcoef(x, y)[0, 1])
