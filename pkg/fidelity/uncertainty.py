"""
Uncertainty weighting of DF and SF
==================================

Two content features decide how far D and S_sim can be trusted for an image:

    sr = lpc_si(test G_1) / lpc_si(reference G_2)        sharpness ratio
    tr = H(normalized test L_1) / H(reference G_2)       texture-richness ratio
    f  = sr^alpha + tr^alpha                             assorted factor

Calibration bins a labeled set along f and, per bin, weights each measure by
the other's residual variance after a logistic fit onto MOS:

    w_d = v_s / (v_d + v_s),  w_s = 1 - w_d,  Q_ds = w_d * D + w_s * S_sim

Components:
    - AssortedFeatures / CalibrationBin / CalibrationTable: immutable records
    - calibrate(): table from (D, S_sim, f, MOS) samples
    - select_calibration(): grid search over alpha and gamma
    - lookup_weights() / srif(): scoring with a table

Usage:
    from fidelity.uncertainty import calibrate, lookup_weights, srif

    table = calibrate(samples, bins=8, min_bin_count=20)
    q = srif(d, s_sim, lookup_weights(table, f))
"""

import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from evaluation.correlation import srcc
from evaluation.logistic import fit_logistic, logistic
from fidelity.sharpness import LpcConfig, lpc_si
from fidelity.statistical import SfConfig, entropy_bits, normalize_band
from imaging.plane import ImagePlane
from imaging.pyramid import PyramidPair
from utils.errors import (
    ConfigError,
    DegenerateReference,
    DegenerateScores,
    InsufficientData,
    TableFormatError,
    WeightNormalization,
)

logger = logging.getLogger(__name__)

TABLE_VERSION = 1
DEFAULT_ALPHA = 1.0
ALPHA_GRID = (0.5, 1.0, 2.0, 3.0)
GAMMA_GRID = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0)
DEFAULT_BINS = 8
MIN_BIN_COUNT = 20
SAMPLES_PER_BIN = 10
ENTROPY_BINS = 256
RATIO_FLOOR = 1e-9
WEIGHT_TOLERANCE = 1e-9
NEUTRAL_WEIGHTS = (0.5, 0.5)


@dataclass(frozen=True)
class AssortedFeatures:
    sr: float
    tr: float
    f: float
    alpha: float

    def __post_init__(self):
        if self.sr < 0 or self.tr < 0 or self.f < 0:
            raise ValueError(f"assorted features must be >= 0, got sr={self.sr} tr={self.tr} f={self.f}")


@dataclass(frozen=True)
class CalibrationBin:
    lo: float
    hi: float
    v_d: float
    v_s: float
    w_d: float
    w_s: float
    count: int
    degenerate: bool = False

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)


@dataclass(frozen=True)
class CalibrationTable:
    bins: Tuple[CalibrationBin, ...]
    alpha: float = DEFAULT_ALPHA
    gamma: float = 10.0
    config_hash: str = "none"
    dataset: str = "unknown"
    version: int = TABLE_VERSION

    def __post_init__(self):
        if not self.bins:
            raise TableFormatError("calibration table has no bins")
        for b in self.bins:
            if not b.lo < b.hi:
                raise TableFormatError(f"bin edges must increase, got [{b.lo}, {b.hi})")
            if not (0.0 <= b.w_d <= 1.0 and 0.0 <= b.w_s <= 1.0) or b.w_d + b.w_s != 1.0:
                raise TableFormatError(f"bin [{b.lo}, {b.hi}) weights ({b.w_d}, {b.w_s}) are not on the simplex")
        for left, right in zip(self.bins[:-1], self.bins[1:]):
            if left.hi != right.lo:
                raise TableFormatError(f"bins are not contiguous at {left.hi} / {right.lo}")
        if self.alpha <= 0 or self.gamma <= 0:
            raise TableFormatError("table alpha and gamma must be > 0")

    @property
    def edges(self) -> np.ndarray:
        return np.array([self.bins[0].lo] + [b.hi for b in self.bins])


class LabeledScore(NamedTuple):
    """Per-pair measurements that calibration can recombine under any alpha/gamma"""
    d: float
    s_raw: float
    sr: float
    tr: float
    mos: float


@dataclass(frozen=True)
class CalibrationSelection:
    table: CalibrationTable
    srcc: float


# ---------------------------------------------------------------- features


def _ratio(numerator: float, denominator: float, what: str) -> float:
    if denominator < RATIO_FLOOR:
        raise DegenerateReference(f"{what} of the reference is {denominator:.3g}, ratio undefined")
    return numerator / denominator


def sharpness_ratio_from_levels(test_g1: ImagePlane, ref_g2: ImagePlane, lpc: LpcConfig) -> float:
    return _ratio(lpc_si(test_g1, lpc), lpc_si(ref_g2, lpc), "LPC-SI")


def sharpness_ratio(pair: PyramidPair, lpc: LpcConfig) -> float:
    """lpc_si(test G_1) / lpc_si(reference G_2)"""
    return sharpness_ratio_from_levels(pair.test_gaussian[0], pair.ref_gaussian[1], lpc)


def texture_ratio(pair: PyramidPair, cfg: SfConfig, bins: int = ENTROPY_BINS) -> float:
    """Entropy of the normalized test L_1 over entropy of the reference G_2, both in bits"""
    band = normalize_band(pair.test_laplacian[0], cfg)
    numerator = entropy_bits(band.data, -cfg.support, cfg.support, bins)
    denominator = entropy_bits(pair.ref_gaussian[1].data, 0.0, 1.0, bins)
    return _ratio(numerator, denominator, "entropy")


def assorted_factor(sr: float, tr: float, alpha: float) -> float:
    if alpha <= 0:
        raise ConfigError(f"alpha must be > 0, got {alpha}")
    if sr < 0 or tr < 0:
        raise ValueError(f"sr and tr must be >= 0, got {sr}, {tr}")
    return float(sr ** alpha + tr ** alpha)


# ------------------------------------------------------------- calibration


def weights_from_variances(v_d: float, v_s: float) -> Tuple[float, float, bool]:
    """Inverse-uncertainty weights; (0.5, 0.5, True) when both variances vanish"""
    total = v_d + v_s
    if total <= 0.0:
        return NEUTRAL_WEIGHTS[0], NEUTRAL_WEIGHTS[1], True
    w_d = v_s / total
    return w_d, 1.0 - w_d, False


def _quantile_groups(f: np.ndarray, bins: int, min_bin_count: int) -> Tuple[np.ndarray, List[np.ndarray]]:
    """Equal-mass bins over f, adjacent bins merged until each holds min_bin_count.

    Returns (edges, member indices per bin). Bins are half-open [lo, hi) except
    the last, which also holds max(f).
    """
    edges = np.unique(np.quantile(f, np.linspace(0.0, 1.0, bins + 1)))
    if edges.size < 2:
        # every sample shares one f value
        edges = np.array([edges[0], np.nextafter(edges[0], np.inf)])
    counts = np.histogram(f, bins=edges)[0].tolist()
    edge_list = edges.tolist()

    while len(counts) > 1 and min(counts) < min_bin_count:
        i = counts.index(min(counts))
        if i == 0:
            j = 1
        elif i == len(counts) - 1:
            j = i - 1
        else:
            j = i - 1 if counts[i - 1] <= counts[i + 1] else i + 1
        lo, hi = min(i, j), max(i, j)
        counts[lo:hi + 1] = [counts[lo] + counts[hi]]
        del edge_list[hi]

    edges = np.asarray(edge_list)
    index = np.clip(np.searchsorted(edges[1:-1], f, side="right"), 0, len(counts) - 1)
    members = [np.flatnonzero(index == k) for k in range(len(counts))]
    return edges, members


def calibrate(
    samples: Sequence[Sequence[float]],
    bins: int = DEFAULT_BINS,
    min_bin_count: int = MIN_BIN_COUNT,
    alpha: float = DEFAULT_ALPHA,
    gamma: float = 10.0,
    config_hash: str = "none",
    dataset: str = "unknown",
) -> CalibrationTable:
    """Build a table from (D, S_sim, f, MOS) samples"""
    if bins < 1 or min_bin_count < 1:
        raise ConfigError(f"bins and min_bin_count must be >= 1, got {bins}, {min_bin_count}")
    data = np.asarray(samples, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != 4:
        raise InsufficientData("calibration samples must be (D, S_sim, f, MOS) rows")
    n = data.shape[0]
    required = max(SAMPLES_PER_BIN * bins, min_bin_count)
    if n < required:
        raise InsufficientData(f"calibration with {bins} bins needs at least {required} samples, got {n}")
    if not np.all(np.isfinite(data)):
        raise InsufficientData("calibration samples must be finite (unlabeled pairs cannot be used)")

    d, s_sim, f, mos = data.T
    fit_d = fit_logistic(d, mos)
    fit_s = fit_logistic(s_sim, mos)
    e_d = logistic(d, fit_d.params) - mos
    e_s = logistic(s_sim, fit_s.params) - mos

    edges, members = _quantile_groups(f, bins, min_bin_count)
    table_bins = []
    for k, idx in enumerate(members):
        v_d = float(np.var(e_d[idx]))
        v_s = float(np.var(e_s[idx]))
        w_d, w_s, degenerate = weights_from_variances(v_d, v_s)
        if degenerate:
            logger.warning(f"Degenerate calibration bin [{edges[k]:.4g}, {edges[k + 1]:.4g}): zero residual variance, using 0.5/0.5")
        table_bins.append(CalibrationBin(
            lo=float(edges[k]), hi=float(edges[k + 1]),
            v_d=v_d, v_s=v_s, w_d=w_d, w_s=w_s,
            count=int(idx.size), degenerate=degenerate,
        ))

    if len(table_bins) < bins:
        logger.info(f"Calibration merged {bins} requested bins into {len(table_bins)}")
    return CalibrationTable(
        bins=tuple(table_bins), alpha=float(alpha), gamma=float(gamma),
        config_hash=config_hash, dataset=dataset,
    )


def lookup_weights(table: CalibrationTable, f: float) -> Tuple[float, float]:
    """Weights of the bin holding f; values outside the calibrated range clamp to the end bins"""
    inner = [b.lo for b in table.bins[1:]]
    k = int(np.searchsorted(inner, f, side="right"))
    chosen = table.bins[k]
    return chosen.w_d, chosen.w_s


def srif(d: float, s_sim: float, weights: Tuple[float, float]) -> float:
    """Q_ds = w_d * D + w_s * S_sim"""
    w_d, w_s = weights
    if abs(w_d + w_s - 1.0) > WEIGHT_TOLERANCE or min(w_d, w_s) < 0.0:
        raise WeightNormalization(f"weights ({w_d}, {w_s}) must be non-negative and sum to 1")
    q = w_d * d + w_s * s_sim
    return float(min(max(q, min(d, s_sim)), max(d, s_sim)))


def select_calibration(
    records: Sequence[LabeledScore],
    alphas: Sequence[float] = ALPHA_GRID,
    gammas: Sequence[float] = GAMMA_GRID,
    bins: int = DEFAULT_BINS,
    min_bin_count: int = MIN_BIN_COUNT,
    config_hash_for=None,
    dataset: str = "unknown",
) -> CalibrationSelection:
    """Grid search over (alpha, gamma) maximizing SRCC of Q_ds against MOS.

    Grid order is alpha-major; the first best candidate wins ties.
    ``config_hash_for(alpha, gamma)`` stamps each table with the hash of the
    settings that produced it.
    """
    data = np.asarray(records, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] == 0:
        raise InsufficientData("no labeled records to calibrate on")
    d, s_raw, sr, tr, mos = data.T

    best: Optional[CalibrationSelection] = None
    for alpha in alphas:
        f = np.array([assorted_factor(a, b, alpha) for a, b in zip(sr, tr)])
        for gamma in gammas:
            s_sim = np.exp(-gamma * s_raw)
            stamp = config_hash_for(alpha, gamma) if config_hash_for else "none"
            try:
                table = calibrate(
                    np.column_stack([d, s_sim, f, mos]), bins=bins, min_bin_count=min_bin_count,
                    alpha=alpha, gamma=gamma, config_hash=stamp, dataset=dataset,
                )
                q = [srif(di, si, lookup_weights(table, fi)) for di, si, fi in zip(d, s_sim, f)]
                rho = srcc(q, mos)
            except DegenerateScores as e:
                logger.debug(f"alpha={alpha} gamma={gamma} skipped: {e}")
                continue
            logger.debug(f"alpha={alpha} gamma={gamma}: SRCC={rho:.4f}")
            if best is None or rho > best.srcc:
                best = CalibrationSelection(table=table, srcc=float(rho))

    if best is None:
        raise DegenerateScores("every (alpha, gamma) candidate produced degenerate scores")
    logger.info(f"Selected alpha={best.table.alpha} gamma={best.table.gamma} (SRCC {best.srcc:.4f})")
    return best


def weights_curve(table: CalibrationTable) -> List[dict]:
    """Rows of (bin center f, edges, w_d, w_s, count) for the weights-vs-f curve"""
    return [
        {"f": b.center, "lo": b.lo, "hi": b.hi, "w_d": b.w_d, "w_s": b.w_s, "count": b.count}
        for b in table.bins
    ]
