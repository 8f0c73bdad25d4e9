"""
Local phase coherence sharpness (LPC-SI)
========================================

Complex log-Gabor responses at three closely spaced scales (1 : 3/2 : 2) and
eight orientations. Near a sharp feature the phases across scales satisfy
w1*phi1 + w2*phi2 + w3*phi3 = 0 with w = (1, -3, 2); blur breaks that
alignment. The coherence map is magnitude-weighted across orientations,
damped by a noise constant, and pooled by rank with an exponential decay so
the most coherent positions dominate.

Filter banks are cached per canvas size and configuration.

Usage:
    from fidelity.sharpness import LpcConfig, lpc_si

    score = lpc_si(plane, LpcConfig())
"""

import logging
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import fft

from imaging.plane import ImagePlane
from utils.errors import ConfigError, DimensionTooSmall

logger = logging.getLogger(__name__)

ZERO_ENERGY = 1e-12


@dataclass(frozen=True)
class LpcConfig:
    scales: Tuple[float, ...] = (1.0, 1.5, 2.0)
    phase_weights: Tuple[int, ...] = (1, -3, 2)
    orientations: int = 8
    center_frequency: float = 0.2
    sigma_on_f: float = 0.55
    theta_sigma_ratio: float = 1.2
    # noise constant on the 0-255 intensity scale
    c: float = 2.0
    intensity_scale: float = 255.0
    beta_k: float = 1e-4
    taper: int = 8
    border: int = 8
    min_size: int = 32

    def __post_init__(self):
        if len(self.scales) != 3 or len(self.phase_weights) != 3:
            raise ConfigError("LPC uses exactly three scales and three phase weights")
        if sum(self.phase_weights) != 0:
            raise ConfigError(f"phase weights must sum to 0, got {self.phase_weights}")
        if self.orientations < 4:
            raise ConfigError(f"LPC needs at least 4 orientations, got {self.orientations}")
        if not 0 < self.center_frequency < 0.5:
            raise ConfigError("LPC center frequency must lie in (0, 0.5) cycles/pixel")
        if not 0 < self.sigma_on_f < 1:
            raise ConfigError("LPC sigma_on_f must lie in (0, 1)")
        if self.c <= 0 or self.beta_k <= 0:
            raise ConfigError("LPC c and beta_k must be > 0")
        object.__setattr__(self, "phase_weights", tuple(int(w) for w in self.phase_weights))


_BANK_LOCK = threading.Lock()


@lru_cache(maxsize=32)
def _bank(rows: int, cols: int, cfg: LpcConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Radial (per scale) and angular (per orientation) transfer functions"""
    fy = np.fft.fftfreq(rows)[:, None]
    fx = np.fft.fftfreq(cols)[None, :]
    radius = np.hypot(fx, fy)
    radius[0, 0] = 1.0
    theta = np.arctan2(fy, fx)

    # Nyquist row/column have no signed frequency; dropping them keeps the bank
    # symmetric under quarter-turn rotation
    keep = np.ones((rows, cols))
    if rows % 2 == 0:
        keep[rows // 2, :] = 0.0
    if cols % 2 == 0:
        keep[:, cols // 2] = 0.0
    keep[0, 0] = 0.0

    log_sigma_sq = 2.0 * np.log(cfg.sigma_on_f) ** 2
    radial = np.stack([
        np.exp(-np.log(radius / (cfg.center_frequency / s)) ** 2 / log_sigma_sq) * keep
        for s in cfg.scales
    ])

    theta_sigma = np.pi / cfg.orientations / cfg.theta_sigma_ratio
    angular = []
    for k in range(cfg.orientations):
        angle = k * np.pi / cfg.orientations
        delta = np.angle(np.exp(1j * (theta - angle)))
        angular.append(np.exp(-delta ** 2 / (2.0 * theta_sigma ** 2)))
    angular = np.stack(angular)

    radial.setflags(write=False)
    angular.setflags(write=False)
    return radial, angular


def filter_bank(rows: int, cols: int, cfg: LpcConfig) -> Tuple[np.ndarray, np.ndarray]:
    with _BANK_LOCK:
        return _bank(rows, cols, cfg)


def _next_pow2(n: int) -> int:
    return 1 << (int(n) - 1).bit_length()


def _raised_cosine(length: int, width: int) -> np.ndarray:
    window = np.ones(length)
    width = min(width, length // 2)
    if width > 0:
        ramp = 0.5 - 0.5 * np.cos(np.pi * (np.arange(width) + 0.5) / width)
        window[:width] = ramp
        window[length - width:] = ramp[::-1]
    return window


def _prepare_canvas(x: np.ndarray, cfg: LpcConfig):
    """Reflect-pad centrally to a power-of-two canvas and taper its outer rim"""
    rows, cols = x.shape
    p_rows, p_cols = _next_pow2(rows), _next_pow2(cols)
    top, left = (p_rows - rows) // 2, (p_cols - cols) // 2
    canvas = np.pad(x, ((top, p_rows - rows - top), (left, p_cols - cols - left)), mode="reflect")
    canvas = canvas * _raised_cosine(p_rows, cfg.taper)[:, None] * _raised_cosine(p_cols, cfg.taper)[None, :]
    return canvas, (top, left)


def _phase_product(responses, weights) -> np.ndarray:
    z = np.ones_like(responses[0])
    for c, w in zip(responses, weights):
        z = z * (c ** w if w >= 0 else np.conj(c) ** (-w))
    return z


def lpc_map(img: ImagePlane, cfg: LpcConfig) -> np.ndarray:
    """Per-pixel phase-coherence strength over the image interior.

    The outer ``cfg.border`` pixels are dropped. Returns all zeros when the
    band-pass energy vanishes (flat input).
    """
    if img.width < cfg.min_size or img.height < cfg.min_size:
        raise DimensionTooSmall(f"LPC-SI needs at least {cfg.min_size}px per axis, got {img.width}x{img.height}")

    x = img.data * cfg.intensity_scale
    x = x - x.mean()
    canvas, (top, left) = _prepare_canvas(x, cfg)
    radial, angular = filter_bank(canvas.shape[0], canvas.shape[1], cfg)
    spectrum = fft.fft2(canvas)

    rows = slice(top + cfg.border, top + img.height - cfg.border)
    cols = slice(left + cfg.border, left + img.width - cfg.border)

    weighted_cos = np.zeros((img.height - 2 * cfg.border, img.width - 2 * cfg.border))
    magnitude = np.zeros_like(weighted_cos)
    for k in range(cfg.orientations):
        responses = [fft.ifft2(spectrum * radial[s] * angular[k])[rows, cols] for s in range(len(cfg.scales))]
        z = _phase_product(responses, cfg.phase_weights)
        z_abs = np.abs(z)
        cos = np.divide(z.real, z_abs, out=np.zeros_like(z_abs), where=z_abs > 0)
        finest = np.abs(responses[0])
        weighted_cos += finest * cos
        magnitude += finest

    if magnitude.sum() < ZERO_ENERGY:
        return np.zeros_like(magnitude)
    return weighted_cos / (magnitude + cfg.c)


def rank_pool(values: np.ndarray, beta_k: float) -> float:
    """Weighted mean of values sorted high to low, weights exp(-(rank fraction) / beta_k)"""
    ordered = np.sort(values.ravel())[::-1]
    n = ordered.size
    if n == 1:
        return float(ordered[0])
    u = np.exp(-(np.arange(n) / (n - 1)) / beta_k)
    return float(np.sum(u * ordered) / np.sum(u))


def lpc_si(img: ImagePlane, cfg: LpcConfig) -> float:
    """Sharpness index in [0, 1]; 0 for a flat image"""
    coherence = lpc_map(img, cfg)
    if not np.any(coherence):
        return 0.0
    return float(np.clip(rank_pool(coherence, cfg.beta_k), 0.0, 1.0))
