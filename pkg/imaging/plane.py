"""
Luminance plane container
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ImagePlane:
    """2D float64 plane, row-major. Read-only after construction.

    Gaussian levels hold luminance in [0, 1]; Laplacian and normalized bands
    reuse the same container with signed values.
    """
    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"ImagePlane needs a 2D array, got {arr.ndim}D")
        if arr.size == 0:
            raise ValueError("ImagePlane cannot be empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("ImagePlane samples must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_array(cls, arr, clamp: bool = True) -> "ImagePlane":
        """Ingest raw luminance; clamps to [0, 1] unless told otherwise"""
        arr = np.asarray(arr, dtype=np.float64)
        if clamp:
            arr = np.clip(arr, 0.0, 1.0)
        return cls(arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self):
        return self.data.shape

    def __eq__(self, other):
        if not isinstance(other, ImagePlane):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.shape, self.data.tobytes()))
