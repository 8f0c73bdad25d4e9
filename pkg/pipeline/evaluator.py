"""
Evaluation runs and weighting ablations
=======================================

Modes:
    srif     Q = w_d * D + w_s * S_sim (calibrated weights)
    df_only  Q = D
    sf_only  Q = S_sim
    avg      Q = (D + S_sim) / 2

Results can also be split by SR algorithm, by scale factor or by an
algorithm -> category mapping (e.g. interpolation / dictionary / DNN), with
one report per group and mode.

Usage:
    from pipeline.evaluator import Evaluator

    reports = Evaluator(scorer, workers=4).run(entries, modes=("srif", "avg"))
    per_group = Evaluator(scorer).run_grouped(entries, modes=("srif",), by="algorithm")
"""

import logging
from pathlib import Path
from typing import Dict, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd
from dotenv import dotenv_values

from datasets.manifest import ManifestEntry
from evaluation.logistic import logistic
from evaluation.report import EvaluationReport, evaluate
from pipeline.batch_processor import BatchProcessor
from pipeline.scorer import FidelityScorer
from utils.errors import ConfigError, DegenerateScores, InsufficientData

logger = logging.getLogger(__name__)

MODES = ("srif", "df_only", "sf_only", "avg")
GROUP_KEYS = ("algorithm", "scale", "category")
UNCATEGORIZED = "uncategorized"


def mode_scores(frame: pd.DataFrame, mode: str) -> np.ndarray:
    if mode == "srif":
        return frame["Q_ds"].to_numpy(dtype=np.float64)
    if mode == "df_only":
        return frame["D"].to_numpy(dtype=np.float64)
    if mode == "sf_only":
        return frame["S_sim"].to_numpy(dtype=np.float64)
    if mode == "avg":
        return 0.5 * (frame["D"].to_numpy(dtype=np.float64) + frame["S_sim"].to_numpy(dtype=np.float64))
    raise ConfigError(f"unknown evaluation mode '{mode}', expected one of {MODES}")


def _check_modes(modes: Sequence[str]):
    for mode in modes:
        if mode not in MODES:
            raise ConfigError(f"unknown evaluation mode '{mode}', expected one of {MODES}")


def read_categories(path: Union[str, Path]) -> Dict[str, str]:
    """``algorithm = category`` lines"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"category file {path} not found")
    categories = {}
    for algorithm, category in dotenv_values(path).items():
        if category is None or not category.strip():
            raise ConfigError(f"category file {path}: '{algorithm}' has no category")
        categories[algorithm] = category.strip()
    return categories


def _check_grouping(by: str, categories: Optional[Mapping[str, str]]):
    if by not in GROUP_KEYS:
        raise ConfigError(f"unknown grouping '{by}', expected one of {GROUP_KEYS}")
    if by == "category" and not categories:
        raise ConfigError("grouping by category needs an algorithm -> category mapping")


def group_labels(frame: pd.DataFrame, by: str, categories: Optional[Mapping[str, str]] = None) -> pd.Series:
    """Group name per scored row"""
    _check_grouping(by, categories)
    if by == "algorithm":
        return frame["algorithm"].fillna("").astype(str).replace("", "unlabeled")
    if by == "scale":
        return frame["scale"].map(lambda s: f"x{int(s)}")
    if by == "category":
        labels = frame["algorithm"].fillna("").astype(str).map(lambda a: categories.get(a, UNCATEGORIZED))
        missing = sorted(set(frame["algorithm"][labels == UNCATEGORIZED].astype(str)))
        if missing:
            logger.warning(f"Algorithms without a category: {', '.join(missing)}")
        return labels


def prediction_frame(frame: pd.DataFrame, reports: Mapping[str, EvaluationReport]) -> pd.DataFrame:
    """(mos, mode, score, prediction) rows; prediction is the fitted logistic of the mode's score"""
    mos = frame["mos"].to_numpy(dtype=np.float64)
    parts = []
    for mode, report in reports.items():
        scores = mode_scores(frame, mode)
        parts.append(pd.DataFrame({
            "mos": mos,
            "mode": mode,
            "score": scores,
            "prediction": np.atleast_1d(logistic(scores, report.params)),
        }))
    return pd.concat(parts, ignore_index=True)


class Evaluator:
    def __init__(self, scorer: FidelityScorer, workers: int = 1):
        self.scorer = scorer
        self.workers = workers

    def score(self, entries: Sequence[ManifestEntry]) -> pd.DataFrame:
        """Batch frame of the labeled entries"""
        labeled = [e for e in entries if e.labeled]
        if len(labeled) < len(entries):
            logger.warning(f"Skipping {len(entries) - len(labeled)} entries without MOS")
        if not labeled:
            raise InsufficientData("no labeled entries to evaluate")

        frame = BatchProcessor(self.scorer, self.workers).run(labeled).frame()
        if frame.empty:
            raise InsufficientData("no entry could be scored")
        return frame

    def evaluate_frame(self, frame: pd.DataFrame, modes: Sequence[str] = ("srif",)) -> Dict[str, EvaluationReport]:
        _check_modes(modes)
        mos = frame["mos"].to_numpy(dtype=np.float64)
        reports = {}
        for mode in modes:
            logger.info(f"🔍 Evaluating mode {mode}")
            reports[mode] = evaluate(mode_scores(frame, mode), mos)
        return reports

    def run(self, entries: Sequence[ManifestEntry], modes: Sequence[str] = ("srif",)) -> Dict[str, EvaluationReport]:
        _check_modes(modes)
        return self.evaluate_frame(self.score(entries), modes)

    def evaluate_groups(self, frame: pd.DataFrame, modes: Sequence[str] = ("srif",), by: str = "algorithm",
                        categories: Optional[Mapping[str, str]] = None) -> Dict[str, Dict[str, EvaluationReport]]:
        """One report per (group, mode), groups sorted by name.

        Groups too small or too uniform to evaluate are skipped with a warning.
        """
        _check_modes(modes)
        labels = group_labels(frame, by, categories)
        results = {}
        for group in sorted(labels.unique()):
            subset = frame[labels == group].reset_index(drop=True)
            try:
                results[group] = self.evaluate_frame(subset, modes)
            except (InsufficientData, DegenerateScores) as e:
                logger.warning(f"Skipping {by} '{group}' ({len(subset)} pairs): {e}")
        if not results:
            raise InsufficientData(f"no {by} group could be evaluated")
        return results

    def run_grouped(self, entries: Sequence[ManifestEntry], modes: Sequence[str] = ("srif",), by: str = "algorithm",
                    categories: Optional[Mapping[str, str]] = None) -> Dict[str, Dict[str, EvaluationReport]]:
        _check_modes(modes)
        _check_grouping(by, categories)
        return self.evaluate_groups(self.score(entries), modes, by, categories)
