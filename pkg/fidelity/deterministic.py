"""
Deterministic fidelity (DF)
===========================

Structure comparison between reference and test Gaussian maps, pooled with
information-content weights, combined across K dyadic scales with MS-SSIM
exponents and finally averaged across pyramid levels.

Usage:
    from fidelity.deterministic import DfConfig, df_total

    result = df_total(pair, DfConfig())
    result.score        # D
    result.level_scores # D_1..D_n
"""

import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from evaluation.correlation import srcc
from imaging.filters import gaussian_window, windowed_moments
from imaging.plane import ImagePlane
from imaging.pyramid import PyramidPair, reduce
from utils.errors import ConfigError, DimensionMismatch, DimensionTooSmall

logger = logging.getLogger(__name__)

MS_SSIM_EXPONENTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)


def normalize_weights(values: Sequence[float], name: str, strictly_positive: bool) -> Tuple[float, ...]:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ConfigError(f"{name} must be a non-empty vector")
    if strictly_positive and np.any(arr <= 0):
        raise ConfigError(f"{name} must all be > 0, got {tuple(arr)}")
    if np.any(arr < 0):
        raise ConfigError(f"{name} must all be >= 0, got {tuple(arr)}")
    total = arr.sum()
    if total <= 0:
        raise ConfigError(f"{name} must not sum to 0")
    return tuple(float(v) for v in arr / total)


@dataclass(frozen=True)
class DfConfig:
    window: int = 11
    sigma: float = 1.5
    # SSIM convention (K * L)^2 with K = 0.03 and L = 1
    c1: float = 0.03 ** 2
    # IW-SSIM visual noise variance 0.4, rescaled from 0-255 to 0-1
    cw: float = 0.4 / 255.0 ** 2
    alphas: Tuple[float, ...] = MS_SSIM_EXPONENTS
    level_weights: Tuple[float, ...] = (1.0 / 3, 1.0 / 3, 1.0 / 3)
    clamp_floor: float = 1e-4

    def __post_init__(self):
        if self.window < 1 or self.window % 2 != 1:
            raise ConfigError(f"df window must be a positive odd integer, got {self.window}")
        if self.sigma <= 0:
            raise ConfigError("df sigma must be > 0")
        if self.c1 <= 0 or self.cw <= 0:
            raise ConfigError("df constants c1 and cw must be > 0")
        if self.clamp_floor <= 0:
            raise ConfigError("df clamp_floor must be > 0")
        normalize_weights(self.alphas, "df alphas", strictly_positive=True)
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        normalize_weights(self.level_weights, "df level_weights", strictly_positive=False)
        object.__setattr__(self, "level_weights", tuple(float(w) for w in self.level_weights))


@dataclass(frozen=True)
class DfMap:
    """Per-pixel structure comparison and its information-content weights"""
    values: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class DfResult:
    score: float
    level_scores: Tuple[float, ...]
    scales_used: Tuple[int, ...]
    clamp_floor: float
    clamped_scales: int


def _check_pair(ref_level: ImagePlane, test_level: ImagePlane, cfg: DfConfig):
    if ref_level.shape != test_level.shape:
        raise DimensionMismatch(f"DF level shapes differ: {ref_level.shape} vs {test_level.shape}")
    if ref_level.width < cfg.window or ref_level.height < cfg.window:
        raise DimensionTooSmall(
            f"DF level {ref_level.width}x{ref_level.height} smaller than window {cfg.window}"
        )


def _moments(ref_level: ImagePlane, test_level: ImagePlane, cfg: DfConfig):
    _check_pair(ref_level, test_level, cfg)
    window = gaussian_window(cfg.window, cfg.sigma)
    return windowed_moments(ref_level.data, test_level.data, window)


def _information_from_variances(var_x: np.ndarray, var_y: np.ndarray, cw: float) -> np.ndarray:
    # mutual information of two Gaussian channels, in bits
    return (np.log1p(var_x / cw) + np.log1p(var_y / cw)) / np.log(2.0)


def information_weights(ref_level: ImagePlane, test_level: ImagePlane, cfg: DfConfig) -> np.ndarray:
    """Information content weight per valid-window position.

    Zero for flat patches, increasing in either local variance.
    """
    _, _, var_x, var_y, _ = _moments(ref_level, test_level, cfg)
    return _information_from_variances(var_x, var_y, cfg.cw)


def structure_map(ref_level: ImagePlane, test_level: ImagePlane, cfg: DfConfig) -> DfMap:
    """D_local = (sigma_xy + C1) / (sigma_x * sigma_y + C1) over the valid region"""
    _, _, var_x, var_y, cov_xy = _moments(ref_level, test_level, cfg)
    values = (cov_xy + cfg.c1) / (np.sqrt(var_x) * np.sqrt(var_y) + cfg.c1)
    # Cauchy-Schwarz holds analytically; clip float drift
    values = np.clip(values, -1.0, 1.0)
    weights = _information_from_variances(var_x, var_y, cfg.cw)
    return DfMap(values=values, weights=weights)


def pool(dfmap: DfMap) -> float:
    """Information-weighted mean; plain mean when every weight is zero"""
    total = float(dfmap.weights.sum())
    if total <= 0.0:
        return float(dfmap.values.mean())
    return float((dfmap.weights * dfmap.values).sum() / total)


def combine_scale_scores(scores: Sequence[float], alphas: Sequence[float], floor: float) -> Tuple[float, int]:
    """Geometric combination of per-scale scores.

    Uses the first len(scores) exponents renormalized to sum to 1. Scores below
    ``floor`` are raised to it. Returns (value, number of clamped scores).
    """
    if not scores:
        raise DimensionTooSmall("no feasible DF scale")
    exps = np.asarray(alphas[: len(scores)], dtype=np.float64)
    exps = exps / exps.sum()
    raw = np.asarray(scores, dtype=np.float64)
    clamped = int(np.count_nonzero(raw < floor))
    bases = np.maximum(raw, floor)
    return float(np.prod(bases ** exps)), clamped


def scale_scores(ref_level: ImagePlane, test_level: ImagePlane, cfg: DfConfig) -> List[float]:
    """Pooled D_{l,j} for every feasible scale j = 1..K"""
    x, y = ref_level, test_level
    scores = []
    for j in range(len(cfg.alphas)):
        if j > 0:
            x, y = reduce(x), reduce(y)
        if x.width < cfg.window or x.height < cfg.window:
            break
        scores.append(pool(structure_map(x, y, cfg)))
    if not scores:
        raise DimensionTooSmall(
            f"level {ref_level.width}x{ref_level.height} cannot fit a single {cfg.window}px window"
        )
    if len(scores) < len(cfg.alphas):
        logger.debug(f"DF level {ref_level.width}x{ref_level.height}: using {len(scores)} of {len(cfg.alphas)} scales")
    return scores


def df_level(ref_level: ImagePlane, test_level: ImagePlane, cfg: DfConfig) -> float:
    """D_l for one Gaussian level"""
    value, _ = combine_scale_scores(scale_scores(ref_level, test_level, cfg), cfg.alphas, cfg.clamp_floor)
    return value


def df_total(pair: PyramidPair, cfg: DfConfig) -> DfResult:
    """D = sum_l w_l * D_l over the first len(level_weights) Gaussian levels"""
    n_levels = len(cfg.level_weights)
    if pair.depth < n_levels:
        raise ConfigError(f"DF needs {n_levels} Gaussian levels, pyramid has {pair.depth}")

    level_scores, scales_used = [], []
    clamped_total = 0
    for level in range(n_levels):
        scores = scale_scores(pair.ref_gaussian[level], pair.test_gaussian[level], cfg)
        value, clamped = combine_scale_scores(scores, cfg.alphas, cfg.clamp_floor)
        level_scores.append(value)
        scales_used.append(len(scores))
        clamped_total += clamped

    weights = normalize_weights(cfg.level_weights, "df level_weights", strictly_positive=False)
    score = float(np.dot(weights, level_scores))
    return DfResult(
        score=score,
        level_scores=tuple(level_scores),
        scales_used=tuple(scales_used),
        clamp_floor=cfg.clamp_floor,
        clamped_scales=clamped_total,
    )


def level_weight_candidates(n_levels: int, step: float = 0.25) -> List[Tuple[float, ...]]:
    """Uniform weights first, then every point of a simplex grid"""
    candidates = [tuple([1.0 / n_levels] * n_levels)]
    ticks = int(round(1.0 / step))
    for combo in itertools.product(range(ticks + 1), repeat=n_levels):
        if sum(combo) == ticks:
            candidates.append(tuple(c / ticks for c in combo))
    return candidates


def search_level_weights(level_scores, mos, candidates: Optional[Sequence[Sequence[float]]] = None) -> Tuple[Tuple[float, ...], float]:
    """Pick DF level weights maximizing SRCC of D against MOS.

    ``level_scores`` is an (n_samples, n_levels) array of D_l. Ties keep the
    earliest candidate. Returns (weights, srcc).
    """
    matrix = np.asarray(level_scores, dtype=np.float64)
    if candidates is None:
        candidates = level_weight_candidates(matrix.shape[1])
    best, best_rho = None, -np.inf
    for weights in candidates:
        d = matrix @ np.asarray(weights, dtype=np.float64)
        if np.ptp(d) == 0:
            continue
        rho = srcc(d, mos)
        if rho > best_rho:
            best, best_rho = tuple(float(w) for w in weights), rho
    if best is None:
        raise ConfigError("no level-weight candidate produced non-constant D scores")
    logger.info(f"DF level weights {best} selected (SRCC {best_rho:.4f})")
    return best, float(best_rho)
