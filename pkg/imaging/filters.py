"""
Separable filtering and sliding-window statistics
=================================================

All filtering is separable and uses symmetric reflection without edge
repetition (scipy's ``mirror`` mode), so flat borders stay flat.
"""

import numpy as np
from scipy import ndimage

# Burt-Adelson generating kernel with a = 0.375
BINOMIAL_KERNEL = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0

BORDER_MODE = "mirror"


def separable_filter(arr: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Filter rows then columns with the same 1D kernel"""
    out = ndimage.correlate1d(np.asarray(arr, dtype=np.float64), kernel, axis=1, mode=BORDER_MODE)
    return ndimage.correlate1d(out, kernel, axis=0, mode=BORDER_MODE)


def gaussian_window(size: int, sigma: float) -> np.ndarray:
    """Normalized 1D Gaussian of odd length ``size``"""
    if size % 2 != 1:
        raise ValueError(f"Window size must be odd, got {size}")
    half = size // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(x ** 2) / (2.0 * sigma ** 2))
    return g / g.sum()


def _valid(arr: np.ndarray, half: int) -> np.ndarray:
    if half == 0:
        return arr
    return arr[half:-half, half:-half]


def windowed_moments(x: np.ndarray, y: np.ndarray, window: np.ndarray):
    """Weighted local moments over the valid region.

    Returns (mu_x, mu_y, var_x, var_y, cov_xy); variances are clipped at 0.
    Output maps are (H - n + 1, W - n + 1) for a window of length n.
    """
    half = len(window) // 2

    def blur(a):
        return _valid(separable_filter(a, window), half)

    mu_x = blur(x)
    mu_y = blur(y)
    var_x = np.maximum(blur(x * x) - mu_x * mu_x, 0.0)
    var_y = np.maximum(blur(y * y) - mu_y * mu_y, 0.0)
    cov_xy = blur(x * y) - mu_x * mu_y
    return mu_x, mu_y, var_x, var_y, cov_xy


def local_mean_std(arr: np.ndarray, size: int):
    """Box-window mean and standard deviation, same shape as ``arr``"""
    arr = np.asarray(arr, dtype=np.float64)
    mu = ndimage.uniform_filter(arr, size=size, mode=BORDER_MODE)
    second = ndimage.uniform_filter(arr * arr, size=size, mode=BORDER_MODE)
    sigma = np.sqrt(np.maximum(second - mu * mu, 0.0))
    return mu, sigma
