"""
Gaussian-Laplacian pyramid
==========================

Burt-Adelson decomposition shared by every fidelity measure.

Level numbering follows the usual 1-based convention: G_1 is the input image,
G_{l+1} = reduce(G_l) and L_l = G_l - expand(G_{l+1}). A pyramid of ``depth``
Gaussian levels has ``depth - 1`` Laplacian levels.

Usage:
    from imaging.pyramid import decompose, PyramidPair

    gaussian, laplacian = decompose(plane, depth=4)
    pair = PyramidPair.build(reference, test, depth=4)
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import ndimage

from imaging.filters import BINOMIAL_KERNEL, BORDER_MODE, separable_filter
from imaging.plane import ImagePlane
from utils.errors import ConfigError, DimensionMismatch, DimensionTooSmall

DEFAULT_DEPTH = 4


@dataclass(frozen=True)
class GaussianPyramid:
    levels: Tuple[ImagePlane, ...]

    def __len__(self):
        return len(self.levels)

    def __getitem__(self, index) -> ImagePlane:
        return self.levels[index]


@dataclass(frozen=True)
class LaplacianPyramid:
    levels: Tuple[ImagePlane, ...]

    def __len__(self):
        return len(self.levels)

    def __getitem__(self, index) -> ImagePlane:
        return self.levels[index]


def reduce(img: ImagePlane) -> ImagePlane:
    """Low-pass with the binomial kernel, then keep every other sample.

    Output dims are ceil(dim / 2) per axis.
    """
    if img.width < 2 or img.height < 2:
        raise DimensionTooSmall(f"reduce needs at least 2x2, got {img.width}x{img.height}")
    blurred = separable_filter(img.data, BINOMIAL_KERNEL)
    return ImagePlane(blurred[::2, ::2])


def _check_target(dim: int, target: int, axis: str):
    if target not in (2 * dim - 1, 2 * dim):
        raise DimensionMismatch(
            f"expand target {axis}={target} incompatible with source {axis}={dim} "
            f"(expected {2 * dim - 1} or {2 * dim})"
        )


def expand(img: ImagePlane, target_w: int, target_h: int) -> ImagePlane:
    """Zero-insert upsample to (target_w, target_h), then interpolate.

    The interpolation kernel is the reduce kernel scaled by 2 per axis so that
    DC is preserved.
    """
    _check_target(img.width, target_w, "width")
    _check_target(img.height, target_h, "height")

    up = np.zeros((target_h, target_w), dtype=np.float64)
    up[::2, ::2] = img.data
    kernel = 2.0 * BINOMIAL_KERNEL
    # a length-1 axis was never decimated, nothing to interpolate
    if target_w > 1:
        up = ndimage.correlate1d(up, kernel, axis=1, mode=BORDER_MODE)
    if target_h > 1:
        up = ndimage.correlate1d(up, kernel, axis=0, mode=BORDER_MODE)
    return ImagePlane(up)


def decompose(img: ImagePlane, depth: int = DEFAULT_DEPTH) -> Tuple[GaussianPyramid, LaplacianPyramid]:
    """Build G_1..G_depth and L_1..L_{depth-1}"""
    if depth < 2:
        raise ConfigError(f"pyramid depth must be >= 2, got {depth}")

    gaussian = [img]
    for _ in range(depth - 1):
        gaussian.append(reduce(gaussian[-1]))

    laplacian = []
    for finer, coarser in zip(gaussian[:-1], gaussian[1:]):
        predicted = expand(coarser, finer.width, finer.height)
        laplacian.append(ImagePlane(finer.data - predicted.data))

    return GaussianPyramid(tuple(gaussian)), LaplacianPyramid(tuple(laplacian))


def reconstruct(top: ImagePlane, laplacian: LaplacianPyramid) -> ImagePlane:
    """Collapse a pyramid back to G_1 starting from the coarsest Gaussian level"""
    current = top
    for band in reversed(laplacian.levels):
        predicted = expand(current, band.width, band.height)
        current = ImagePlane(band.data + predicted.data)
    return current


@dataclass(frozen=True)
class PyramidPair:
    """Aligned pyramids of a reference (HR) image and a test (SR) image"""
    ref_gaussian: GaussianPyramid
    ref_laplacian: LaplacianPyramid
    test_gaussian: GaussianPyramid
    test_laplacian: LaplacianPyramid

    @classmethod
    def build(cls, reference: ImagePlane, test: ImagePlane, depth: int = DEFAULT_DEPTH) -> "PyramidPair":
        if reference.shape != test.shape:
            raise DimensionMismatch(
                f"reference is {reference.width}x{reference.height}, test is {test.width}x{test.height}"
            )
        ref_g, ref_l = decompose(reference, depth)
        test_g, test_l = decompose(test, depth)
        return cls(ref_g, ref_l, test_g, test_l)

    @property
    def depth(self) -> int:
        return len(self.ref_gaussian)
