"""
Full evaluation protocol over a scored dataset
==============================================

Usage:
    from evaluation.report import evaluate

    report = evaluate(scores, mos)
    print(report.srcc, report.plcc, report.rmse)
"""

import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from evaluation.correlation import krcc, pearson, srcc
from evaluation.logistic import LogisticParams, fit_logistic, logistic
from utils.errors import InsufficientData

logger = logging.getLogger(__name__)

MIN_REPORT_SAMPLES = 4


@dataclass(frozen=True)
class EvaluationReport:
    srcc: float
    krcc: float
    plcc: float
    rmse: float
    n: int
    params: LogisticParams

    def as_record(self) -> Dict[str, float]:
        """Flat key/value view used by the text and CSV outputs"""
        record = {"n": self.n, "srcc": self.srcc, "krcc": self.krcc, "plcc": self.plcc, "rmse": self.rmse}
        record.update({f"beta{i}": v for i, v in enumerate(self.params.as_tuple(), start=1)})
        return record


def plcc_rmse(scores, mos, params: LogisticParams) -> Tuple[float, float]:
    """Pearson correlation and RMSE between g(scores) and MOS"""
    y = np.asarray(mos, dtype=np.float64).ravel()
    mapped = np.atleast_1d(logistic(np.asarray(scores, dtype=np.float64).ravel(), params))
    plcc = pearson(mapped, y)
    rmse = float(np.sqrt(np.mean((mapped - y) ** 2)))
    return plcc, rmse


def evaluate(scores, mos) -> EvaluationReport:
    x = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(mos, dtype=np.float64).ravel()
    if x.size < MIN_REPORT_SAMPLES:
        raise InsufficientData(f"evaluation needs at least {MIN_REPORT_SAMPLES} samples, got {x.size}")

    fit = fit_logistic(x, y)
    plcc, rmse = plcc_rmse(x, y, fit.params)
    report = EvaluationReport(
        srcc=srcc(x, y),
        krcc=krcc(x, y),
        plcc=plcc,
        rmse=rmse,
        n=int(x.size),
        params=fit.params,
    )
    logger.info(f"Evaluated {report.n} samples: SRCC={report.srcc:.4f} PLCC={report.plcc:.4f} RMSE={report.rmse:.4f}")
    return report
