"""
Batch scoring of manifest entries
=================================

Scores every manifest entry with a bounded process pool. Results are gathered
by manifest index, so the output is identical for any worker count. Entries
that fail to load or score become logged exclusions; the rest still produce
rows.

Usage:
    from pipeline.batch_processor import BatchProcessor

    result = BatchProcessor(scorer, workers=4).run(entries)
    result.write_csv("results.csv")
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from datasets.loader import Exclusion, exclude, load_pair
from datasets.manifest import ManifestEntry
from pipeline.config import TABULAR_FLOAT_FORMAT
from pipeline.scorer import FidelityScorer, Measurements, measure
from utils.errors import SrifError
from utils.report_formatter import write_hashed_csv

logger = logging.getLogger(__name__)

_worker_scorer: Optional[FidelityScorer] = None


@dataclass
class ScoredEntry:
    entry: ManifestEntry
    measurements: Measurements


@dataclass
class BatchResult:
    scored: List[ScoredEntry] = field(default_factory=list)
    exclusions: List[Exclusion] = field(default_factory=list)
    scorer: Optional[FidelityScorer] = None

    @property
    def config_hash(self) -> str:
        return self.scorer.config_hash if self.scorer else "none"

    def rows(self) -> List[Dict[str, object]]:
        rows = []
        for item in self.scored:
            e = item.entry
            row: Dict[str, object] = {
                "ref_path": str(e.ref_path), "test_path": str(e.test_path),
                "mos": e.mos, "algorithm": e.algorithm, "scale": e.scale, "split": e.split,
            }
            row.update(self.scorer.combine(item.measurements).as_row())
            rows.append(row)
        return rows

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows())

    def write_csv(self, path: Union[str, Path]) -> Path:
        return write_hashed_csv(self.frame(), path, self.config_hash, float_format=TABULAR_FLOAT_FORMAT)


def _score_entry(scorer: FidelityScorer, entry: ManifestEntry) -> Tuple[str, object]:
    try:
        pair = load_pair(entry)
        return "ok", measure(pair.reference, pair.test, scorer.cfg)
    except SrifError as e:
        return "excluded", (type(e).__name__, str(e))


def _init_worker(scorer: FidelityScorer):
    global _worker_scorer
    _worker_scorer = scorer


def _score_in_worker(entry: ManifestEntry) -> Tuple[str, object]:
    return _score_entry(_worker_scorer, entry)


class BatchProcessor:
    def __init__(self, scorer: FidelityScorer, workers: int = 1):
        self.scorer = scorer
        self.workers = max(1, int(workers))

    def run(self, entries: Sequence[ManifestEntry]) -> BatchResult:
        """Score entries in manifest order"""
        start = time.monotonic()
        entries = list(entries)
        if self.workers == 1 or len(entries) <= 1:
            outcomes = [_score_entry(self.scorer, e) for e in entries]
        else:
            with ProcessPoolExecutor(
                max_workers=self.workers, initializer=_init_worker, initargs=(self.scorer,),
            ) as pool:
                outcomes = list(pool.map(_score_in_worker, entries))

        result = BatchResult(scorer=self.scorer)
        for entry, (status, payload) in zip(entries, outcomes):
            if status == "ok":
                result.scored.append(ScoredEntry(entry, payload))
            else:
                reason, message = payload
                result.exclusions.append(exclude(entry, reason, message))

        elapsed = time.monotonic() - start
        logger.info(
            f"📊 Scored {len(result.scored)} of {len(entries)} pairs "
            f"({len(result.exclusions)} excluded) in {elapsed:.1f}s with {self.workers} worker(s)"
        )
        return result
