"""
Synthetic SR-like dataset generator
===================================

Deterministic textured reference images plus degraded "SR outputs" (blur,
additive noise, down/up resampling) with a synthetic MOS that falls with
degradation severity. Used by the test-suite and by
``scripts/make_synthetic_dataset.py``.

Usage:
    from datasets.synthetic import write_dataset

    manifest = write_dataset("data/synthetic", n_images=10, size=128, seed=0)
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Tuple, Union

import numpy as np
from PIL import Image
from scipy import ndimage

from datasets.manifest import ManifestEntry, write_manifest
from imaging.plane import ImagePlane

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Degradation:
    algorithm: str
    level: float
    severity: float
    scale: int = 1


DEGRADATIONS: Tuple[Degradation, ...] = (
    Degradation("blur", 0.5, 0.15),
    Degradation("blur", 1.0, 0.35),
    Degradation("blur", 2.0, 0.6),
    Degradation("noise", 0.02, 0.2),
    Degradation("noise", 0.05, 0.45),
    Degradation("bicubic", 2, 0.25, scale=2),
    Degradation("bicubic", 4, 0.55, scale=4),
)


def textured_image(size: int, seed: int) -> ImagePlane:
    """Gratings, band-limited noise and a few hard-edged patches on [0.05, 0.95]"""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)

    img = np.zeros((size, size))
    for _ in range(4):
        freq = rng.uniform(0.02, 0.2)
        angle = rng.uniform(0.0, np.pi)
        phase = rng.uniform(0.0, 2 * np.pi)
        img += rng.uniform(0.3, 1.0) * np.sin(2 * np.pi * freq * (xx * np.cos(angle) + yy * np.sin(angle)) + phase)

    img += 1.5 * ndimage.gaussian_filter(rng.standard_normal((size, size)), sigma=rng.uniform(0.8, 2.0), mode="mirror")

    for _ in range(5):
        h, w = rng.integers(size // 8, size // 3, size=2)
        top, left = rng.integers(0, size - h), rng.integers(0, size - w)
        img[top:top + h, left:left + w] += rng.choice([-1.5, 1.5])

    img = (img - img.min()) / (np.ptp(img) or 1.0)
    return ImagePlane(0.05 + 0.9 * img)


def blur(img: ImagePlane, sigma: float) -> ImagePlane:
    return ImagePlane(ndimage.gaussian_filter(img.data, sigma=sigma, mode="mirror"))


def add_noise(img: ImagePlane, sigma: float, seed: int) -> ImagePlane:
    rng = np.random.default_rng(seed)
    return ImagePlane.from_array(img.data + sigma * rng.standard_normal(img.shape))


def down_up(img: ImagePlane, factor: int) -> ImagePlane:
    """Bicubic downscale by ``factor`` and back to the original size"""
    source = Image.fromarray(img.data.astype(np.float32))
    small = source.resize((max(1, img.width // factor), max(1, img.height // factor)), Image.Resampling.BICUBIC)
    restored = small.resize((img.width, img.height), Image.Resampling.BICUBIC)
    return ImagePlane.from_array(np.asarray(restored, dtype=np.float64))


def degrade(img: ImagePlane, degradation: Degradation, seed: int) -> ImagePlane:
    apply: Callable[[], ImagePlane] = {
        "blur": lambda: blur(img, degradation.level),
        "noise": lambda: add_noise(img, degradation.level, seed),
        "bicubic": lambda: down_up(img, int(degradation.level)),
    }[degradation.algorithm]
    return apply()


def save_png(img: ImagePlane, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.round(img.data * 255.0).astype(np.uint8)).save(path)
    return path


def write_dataset(
    out_dir: Union[str, Path],
    n_images: int = 10,
    size: int = 128,
    seed: int = 0,
    degradations: Tuple[Degradation, ...] = DEGRADATIONS,
    mos_noise: float = 2.0,
) -> Path:
    """Write reference/test PNGs and ``manifest.csv``; returns the manifest path.

    Even-numbered references go to the train split, odd ones to test.
    """
    out_dir = Path(out_dir)
    rng = np.random.default_rng(seed)
    entries: List[ManifestEntry] = []
    for i in range(n_images):
        reference = textured_image(size, seed * 1000 + i)
        ref_path = save_png(reference, out_dir / "reference" / f"img{i:03d}.png")
        split = "train" if i % 2 == 0 else "test"
        for k, degradation in enumerate(degradations):
            test = degrade(reference, degradation, seed * 1000 + i * 31 + k)
            name = f"img{i:03d}_{degradation.algorithm}_{degradation.level:g}.png"
            test_path = save_png(test, out_dir / "test" / name)
            mos = float(np.clip(100.0 * (1.0 - degradation.severity) + rng.normal(0.0, mos_noise), 0.0, 100.0))
            entries.append(ManifestEntry(
                ref_path=ref_path, test_path=test_path, mos=mos,
                algorithm=degradation.algorithm, scale=degradation.scale, split=split,
            ))

    manifest = write_manifest(entries, out_dir / "manifest.csv", comment=f"synthetic dataset seed={seed} size={size}")
    logger.info(f"Wrote {len(entries)} synthetic pairs to {manifest}")
    return manifest
