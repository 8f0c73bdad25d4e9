"""
Single-pair SRIF scoring
========================

Runs every measure on one (reference, test) pair and combines them:

    1. Gaussian-Laplacian pyramids of both images
    2. D (deterministic fidelity) and S_raw / S_sim (statistical fidelity)
    3. sr, tr and the assorted factor f
    4. (w_d, w_s) looked up in the calibration table, Q_ds = w_d * D + w_s * S_sim

A missing table falls back to (0.5, 0.5) with a warning. When a table is
loaded its alpha and gamma replace the run config's.

Usage:
    from pipeline.scorer import FidelityScorer

    scorer = FidelityScorer.from_config(cfg)
    report = scorer.score(reference, test)
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, Optional, Tuple

from fidelity.calibration_table import read_table, table_digest
from fidelity.deterministic import df_total
from fidelity.statistical import sf_total, similarity
from fidelity.uncertainty import (
    NEUTRAL_WEIGHTS,
    CalibrationTable,
    assorted_factor,
    lookup_weights,
    sharpness_ratio,
    srif,
    texture_ratio,
)
from imaging.plane import ImagePlane
from imaging.pyramid import PyramidPair
from pipeline.config import RunConfig, config_hash, resolve_table_path
from utils.errors import DegenerateReference

logger = logging.getLogger(__name__)

REPORT_FIELDS = ("D", "S_raw", "S_sim", "sr", "tr", "f", "w_d", "w_s", "Q_ds")
NEUTRAL_RATIO = 1.0


@dataclass(frozen=True)
class Measurements:
    """Everything about a pair that does not depend on alpha, gamma or a table"""
    d: float
    s_raw: float
    sr: float
    tr: float
    df_levels: Tuple[float, ...]
    sf_levels: Tuple[float, ...]
    warnings: Tuple[str, ...] = ()


@dataclass(frozen=True)
class FidelityReport:
    d: float
    s_raw: float
    s_sim: float
    sr: float
    tr: float
    f: float
    w_d: float
    w_s: float
    q_ds: float
    df_levels: Tuple[float, ...]
    sf_levels: Tuple[float, ...]
    warnings: Tuple[str, ...]
    config_hash: str

    def values(self) -> Dict[str, float]:
        return dict(zip(REPORT_FIELDS, (
            self.d, self.s_raw, self.s_sim, self.sr, self.tr, self.f, self.w_d, self.w_s, self.q_ds,
        )))

    def as_row(self) -> Dict[str, object]:
        row: Dict[str, object] = dict(self.values())
        row.update({f"D_{i}": v for i, v in enumerate(self.df_levels, start=1)})
        row.update({f"S_{i}": v for i, v in enumerate(self.sf_levels, start=1)})
        row["warnings"] = ";".join(self.warnings)
        return row


def measure(reference: ImagePlane, test: ImagePlane, cfg: RunConfig) -> Measurements:
    pair = PyramidPair.build(reference, test, cfg.depth)
    df = df_total(pair, cfg.df)
    sf = sf_total(pair, cfg.sf, cfg.gamma)

    warnings = []
    try:
        sr = sharpness_ratio(pair, cfg.lpc)
    except DegenerateReference as e:
        warnings.append(f"sr: {e}")
        sr = NEUTRAL_RATIO
    try:
        tr = texture_ratio(pair, cfg.sf)
    except DegenerateReference as e:
        warnings.append(f"tr: {e}")
        tr = NEUTRAL_RATIO
    if df.clamped_scales:
        warnings.append(f"D: {df.clamped_scales} scale score(s) clamped to {df.clamp_floor:g}")

    return Measurements(
        d=df.score, s_raw=sf.raw, sr=sr, tr=tr,
        df_levels=df.level_scores, sf_levels=sf.level_scores, warnings=tuple(warnings),
    )


class FidelityScorer:
    def __init__(self, cfg: RunConfig, table: Optional[CalibrationTable] = None):
        """Bind a run config to an optional calibration table"""
        self.table = table
        if table is not None:
            cfg = replace(cfg, alpha=table.alpha, gamma=table.gamma)
            expected = config_hash(cfg)
            if table.config_hash != expected:
                logger.warning(
                    f"Calibration table was built under config {table.config_hash}, "
                    f"current settings hash to {expected}"
                )
        self.cfg = cfg
        self.config_hash = config_hash(cfg, table_digest(table) if table is not None else None)

    @classmethod
    def from_config(cls, cfg: RunConfig) -> "FidelityScorer":
        path = resolve_table_path(cfg)
        if path is None:
            logger.warning("⚠️ No calibration table given (--table / SRIF_TABLE): using fixed weights w_d = w_s = 0.5")
            return cls(cfg)
        table = read_table(path)
        logger.info(f"Using calibration table {path} (alpha={table.alpha:g}, gamma={table.gamma:g}, {len(table.bins)} bins)")
        return cls(cfg, table)

    def weights(self, f: float) -> Tuple[float, float]:
        return lookup_weights(self.table, f) if self.table is not None else NEUTRAL_WEIGHTS

    def combine(self, m: Measurements) -> FidelityReport:
        s_sim = similarity(m.s_raw, self.cfg.gamma)
        f = assorted_factor(m.sr, m.tr, self.cfg.alpha)
        w_d, w_s = self.weights(f)
        return FidelityReport(
            d=m.d, s_raw=m.s_raw, s_sim=s_sim, sr=m.sr, tr=m.tr, f=f,
            w_d=w_d, w_s=w_s, q_ds=srif(m.d, s_sim, (w_d, w_s)),
            df_levels=m.df_levels, sf_levels=m.sf_levels,
            warnings=m.warnings, config_hash=self.config_hash,
        )

    def score(self, reference: ImagePlane, test: ImagePlane) -> FidelityReport:
        return self.combine(measure(reference, test, self.cfg))


def score_pair(reference: ImagePlane, test: ImagePlane, cfg: Optional[RunConfig] = None,
               table: Optional[CalibrationTable] = None) -> FidelityReport:
    """One-off scoring without the table-path lookup"""
    return FidelityScorer(cfg or RunConfig(), table).score(reference, test)
