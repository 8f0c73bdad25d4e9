"""
Statistical fidelity (SF)
=========================

Divisively normalized Laplacian bands are summarized by smoothed fixed-bin
histograms; the reference-to-test KL divergence per level is averaged across
levels. ``S_raw`` is a divergence (lower is better); ``S_sim`` maps it to a
similarity in (0, 1] so it can be combined with D.

KL divergence is in nats. Entropies (texture richness) are in bits.

Usage:
    from fidelity.statistical import SfConfig, sf_total

    result = sf_total(pair, SfConfig(), gamma=10.0)
    result.raw, result.similarity
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import stats

from fidelity.deterministic import normalize_weights
from imaging.filters import local_mean_std
from imaging.plane import ImagePlane
from imaging.pyramid import PyramidPair
from utils.errors import ConfigError, DimensionTooSmall, EdgeMismatch

logger = logging.getLogger(__name__)

DEFAULT_GAMMA = 10.0


@dataclass(frozen=True)
class SfConfig:
    norm_window: int = 3
    # divisive normalization stabilizer, 1 grey level on the [0, 1] scale
    c: float = 1.0 / 255.0
    bins: int = 128
    support: float = 4.0
    eps: float = 1e-4
    level_weights: Tuple[float, ...] = (1.0 / 3, 1.0 / 3, 1.0 / 3)

    def __post_init__(self):
        if self.norm_window < 1 or self.norm_window % 2 != 1:
            raise ConfigError(f"sf norm_window must be a positive odd integer, got {self.norm_window}")
        if self.bins < 16:
            raise ConfigError(f"sf bins must be >= 16, got {self.bins}")
        if self.support <= 0 or self.eps <= 0 or self.c <= 0:
            raise ConfigError("sf support, eps and c must be > 0")
        normalize_weights(self.level_weights, "sf level_weights", strictly_positive=False)
        object.__setattr__(self, "level_weights", tuple(float(w) for w in self.level_weights))

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(-self.support, self.support, self.bins + 1)


@dataclass(frozen=True)
class BandHistogram:
    probabilities: np.ndarray
    edges: np.ndarray
    count: int


@dataclass(frozen=True)
class SfResult:
    raw: float
    similarity: float
    level_scores: Tuple[float, ...]


def normalize_band(band: ImagePlane, cfg: SfConfig) -> ImagePlane:
    """(L - mu_local) / (sigma_local + C) with a box window and mirrored borders"""
    if band.width < cfg.norm_window or band.height < cfg.norm_window:
        raise DimensionTooSmall(
            f"band {band.width}x{band.height} smaller than normalization window {cfg.norm_window}"
        )
    mu, sigma = local_mean_std(band.data, cfg.norm_window)
    return ImagePlane((band.data - mu) / (sigma + cfg.c))


def band_histogram(band: ImagePlane, cfg: SfConfig) -> BandHistogram:
    """Smoothed histogram over [-B, B]; out-of-range samples land in the end bins"""
    edges = cfg.edges
    values = np.clip(band.data.ravel(), -cfg.support, cfg.support)
    counts, _ = np.histogram(values, bins=edges)
    n = values.size
    probabilities = (counts + cfg.eps) / (n + cfg.bins * cfg.eps)
    return BandHistogram(probabilities=probabilities, edges=edges, count=n)


def kld(p: BandHistogram, q: BandHistogram) -> float:
    """KL(p || q) in nats; p is the reference histogram"""
    if p.edges.shape != q.edges.shape or not np.array_equal(p.edges, q.edges):
        raise EdgeMismatch("histograms were built over different bin edges")
    return float(np.sum(p.probabilities * np.log(p.probabilities / q.probabilities)))


def similarity(raw: float, gamma: float = DEFAULT_GAMMA) -> float:
    """exp(-gamma * S_raw): 1 for identical statistics, decreasing in S_raw"""
    return float(np.exp(-gamma * raw))


def sf_level(ref_band: ImagePlane, test_band: ImagePlane, cfg: SfConfig) -> float:
    p = band_histogram(normalize_band(ref_band, cfg), cfg)
    q = band_histogram(normalize_band(test_band, cfg), cfg)
    return kld(p, q)


def sf_total(pair: PyramidPair, cfg: SfConfig, gamma: float = DEFAULT_GAMMA) -> SfResult:
    """S_raw = sum_l w_l * S_l over L_1..L_n; S_sim = exp(-gamma * S_raw)"""
    n_levels = len(cfg.level_weights)
    if len(pair.ref_laplacian) < n_levels:
        raise ConfigError(f"SF needs {n_levels} Laplacian levels, pyramid has {len(pair.ref_laplacian)}")

    level_scores = tuple(
        sf_level(pair.ref_laplacian[level], pair.test_laplacian[level], cfg) for level in range(n_levels)
    )
    weights = normalize_weights(cfg.level_weights, "sf level_weights", strictly_positive=False)
    raw = float(np.dot(weights, level_scores))
    return SfResult(raw=raw, similarity=similarity(raw, gamma), level_scores=level_scores)


def entropy_bits(values: np.ndarray, lo: float, hi: float, bins: int = 256) -> float:
    """Shannon entropy in bits of a fixed-range histogram (samples clipped into range)"""
    clipped = np.clip(np.asarray(values, dtype=np.float64).ravel(), lo, hi)
    counts, _ = np.histogram(clipped, bins=bins, range=(lo, hi))
    if counts.sum() == 0:
        return 0.0
    return float(stats.entropy(counts, base=2))
