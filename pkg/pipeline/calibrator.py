"""
Calibration runs
================

Scores the train split of a labeled manifest, optionally searches DF level
weights, grid-searches (alpha, gamma) and builds the calibration table.

Usage:
    from pipeline.calibrator import Calibrator

    outcome = Calibrator(cfg).run(entries)
    outcome.write("tables/qads.table")
"""

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from datasets.manifest import ManifestEntry, filter_split
from fidelity.calibration_table import write_table
from fidelity.deterministic import search_level_weights
from fidelity.uncertainty import (
    ALPHA_GRID,
    GAMMA_GRID,
    CalibrationTable,
    LabeledScore,
    select_calibration,
    weights_curve,
)
from pipeline.batch_processor import BatchProcessor
from pipeline.config import RunConfig, config_hash, write_config
from pipeline.scorer import FidelityScorer
from reporting.plots import write_weights_plot
from utils.errors import InsufficientData
from utils.report_formatter import write_hashed_csv

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CalibrationOutcome:
    table: CalibrationTable
    srcc: float
    cfg: RunConfig
    n_samples: int
    level_weights_searched: bool = False

    @property
    def config_hash(self) -> str:
        return config_hash(self.cfg)

    def curve_frame(self) -> pd.DataFrame:
        return pd.DataFrame(weights_curve(self.table))

    def write(self, table_path: Union[str, Path], plot: bool = False) -> List[Path]:
        """Table, ``<stem>_curve.csv`` and, when level weights were searched, ``<stem>_config.txt``"""
        table_path = Path(table_path)
        written = [write_table(self.table, table_path)]
        curve_path = table_path.with_name(f"{table_path.stem}_curve.csv")
        written.append(write_hashed_csv(self.curve_frame(), curve_path, self.config_hash))
        if self.level_weights_searched:
            written.append(write_config(self.cfg, table_path.with_name(f"{table_path.stem}_config.txt")))
        if plot:
            written.append(write_weights_plot(self.curve_frame(), curve_path.with_suffix(".html"), self.config_hash))
        return written


class Calibrator:
    def __init__(self, cfg: RunConfig, search_weights: bool = False, fixed_alpha: Optional[float] = None,
                 fixed_gamma: Optional[float] = None, dataset: str = "unknown"):
        self.cfg = cfg
        self.search_weights = search_weights
        self.alphas: Tuple[float, ...] = (fixed_alpha,) if fixed_alpha is not None else ALPHA_GRID
        self.gammas: Tuple[float, ...] = (fixed_gamma,) if fixed_gamma is not None else GAMMA_GRID
        self.dataset = dataset

    def run(self, entries: Sequence[ManifestEntry]) -> CalibrationOutcome:
        train = [e for e in filter_split(entries, "train") if e.labeled]
        if not train:
            raise InsufficientData("calibration needs labeled entries in the train split")
        logger.info(f"🎯 Calibrating on {len(train)} labeled train pairs")

        batch = BatchProcessor(FidelityScorer(self.cfg), self.cfg.workers).run(train)
        scored = batch.scored
        if not scored:
            raise InsufficientData("no train pair could be scored")

        mos = np.array([s.entry.mos for s in scored])
        d = np.array([s.measurements.d for s in scored])
        cfg = self.cfg
        if self.search_weights:
            levels = np.array([s.measurements.df_levels for s in scored])
            weights, rho = search_level_weights(levels, mos)
            cfg = replace(cfg, df=replace(cfg.df, level_weights=weights))
            d = levels @ np.asarray(cfg.df.level_weights)
            logger.info(f"DF level weights set to {cfg.df.level_weights} (SRCC of D {rho:.4f})")

        records = [
            LabeledScore(float(di), s.measurements.s_raw, s.measurements.sr, s.measurements.tr, float(m))
            for di, s, m in zip(d, scored, mos)
        ]
        selection = select_calibration(
            records, alphas=self.alphas, gammas=self.gammas,
            bins=cfg.bins, min_bin_count=cfg.min_bin_count,
            config_hash_for=lambda a, g: config_hash(replace(cfg, alpha=a, gamma=g)),
            dataset=self.dataset,
        )
        chosen = replace(cfg, alpha=selection.table.alpha, gamma=selection.table.gamma)
        return CalibrationOutcome(
            table=selection.table, srcc=selection.srcc, cfg=chosen,
            n_samples=len(records), level_weights_searched=self.search_weights,
        )
