"""
Image decoding to luminance planes
==================================

Color images become BT.601 luminance Y = 0.299 R + 0.587 G + 0.114 B on
[0, 1]. Grayscale passes through; 16-bit grayscale is divided by 65535.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from datasets.manifest import ManifestEntry
from imaging.plane import ImagePlane
from utils.errors import DecodeError, DimensionMismatch, SrifError

logger = logging.getLogger(__name__)

BT601 = np.array([0.299, 0.587, 0.114])
SIXTEEN_BIT_MODES = {"I;16", "I;16B", "I;16L", "I;16N", "I"}


@dataclass(frozen=True)
class LoadedPair:
    reference: ImagePlane
    test: ImagePlane
    entry: ManifestEntry


@dataclass(frozen=True)
class Exclusion:
    """A manifest entry that could not be turned into a LoadedPair"""
    entry: ManifestEntry
    reason: str
    message: str


def _to_luminance(image: Image.Image) -> np.ndarray:
    if image.mode == "L":
        return np.asarray(image, dtype=np.float64) / 255.0
    if image.mode in SIXTEEN_BIT_MODES:
        return np.asarray(image, dtype=np.float64) / 65535.0
    if image.mode == "F":
        return np.asarray(image, dtype=np.float64)
    if image.mode in ("1", "LA"):
        return np.asarray(image.convert("L"), dtype=np.float64) / 255.0
    rgb = np.asarray(image.convert("RGB"), dtype=np.float64) / 255.0
    return rgb @ BT601


def decode_luminance(path: Union[str, Path]) -> ImagePlane:
    path = Path(path)
    try:
        with Image.open(path) as image:
            image.load()
            luminance = _to_luminance(image)
    except FileNotFoundError as e:
        raise DecodeError(f"{path}: file not found") from e
    except (UnidentifiedImageError, OSError, ValueError) as e:
        raise DecodeError(f"{path}: {e}") from e
    if not np.all(np.isfinite(luminance)):
        raise DecodeError(f"{path}: non-finite samples")
    try:
        return ImagePlane.from_array(luminance)
    except ValueError as e:
        raise DecodeError(f"{path}: {e}") from e


def load_pair(entry: ManifestEntry) -> LoadedPair:
    reference = decode_luminance(entry.ref_path)
    test = decode_luminance(entry.test_path)
    if reference.shape != test.shape:
        raise DimensionMismatch(
            f"reference {entry.ref_path} is {reference.width}x{reference.height}, "
            f"test {entry.test_path} is {test.width}x{test.height}"
        )
    return LoadedPair(reference=reference, test=test, entry=entry)


def exclude(entry: ManifestEntry, reason: str, message: str) -> Exclusion:
    exclusion = Exclusion(entry=entry, reason=reason, message=message)
    logger.warning(f"Excluded line {entry.line_number} ({entry.test_path}): {exclusion.reason}: {exclusion.message}")
    return exclusion


def load_pairs(entries: Sequence[ManifestEntry]) -> Tuple[List[LoadedPair], List[Exclusion]]:
    """Every entry ends up in exactly one of the two lists"""
    pairs, exclusions = [], []
    for entry in entries:
        try:
            pairs.append(load_pair(entry))
        except SrifError as e:
            exclusions.append(exclude(entry, type(e).__name__, str(e)))
    logger.info(f"Loaded {len(pairs)} pairs, excluded {len(exclusions)}")
    return pairs, exclusions
