"""Image container and channel plumbing.

Samples are stored channel-planar as float64 in [0, 1]. Single-channel
working buffers ("planes") are plain 2-D float arrays and may hold any
finite values; only `Image` enforces the [0, 1] range.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

Plane = np.ndarray


@dataclass(frozen=True, eq=False)
class Image:
    """Immutable raster of linear-intensity samples in [0, 1].

    ``planes`` has shape (channels, height, width) with channels 1 or 3.
    The array is copied on construction and marked read-only, so images
    are safe to share across threads and processes.
    """

    planes: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.planes, dtype=np.float64)
        if arr.ndim != 3:
            raise ValueError(
                f"planes must be 3-D (channels, height, width), got shape {arr.shape}"
            )
        channels, height, width = arr.shape
        if channels not in (1, 3):
            raise ValueError(f"channel count must be 1 or 3, got {channels}")
        if height < 1 or width < 1:
            raise ValueError(f"image must be at least 1x1, got {height}x{width}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("image samples must be finite")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("image samples must lie in [0, 1]")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "planes", arr)

    @property
    def channels(self) -> int:
        return self.planes.shape[0]

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        """(channels, height, width)."""
        return self.planes.shape

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Image":
        """Build an image from an (H, W) or (H, W, C) array."""
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim == 2:
            return cls(arr[np.newaxis, :, :])
        if arr.ndim == 3:
            return cls(np.ascontiguousarray(arr.transpose(2, 0, 1)))
        raise ValueError(f"expected 2-D or 3-D array, got shape {arr.shape}")

    def to_array(self) -> np.ndarray:
        """Return an (H, W, C) interleaved copy."""
        return np.ascontiguousarray(self.planes.transpose(1, 2, 0))


def split_channels(img: Image) -> list[Plane]:
    """Return the image's channels as a list of read-only 2-D planes."""
    return [img.planes[c] for c in range(img.channels)]


def merge_channels(planes: Sequence[Plane]) -> Image:
    """Reassemble planes (in channel order) into an Image.

    Inverse of :func:`split_channels`: ``merge_channels(split_channels(img))``
    reproduces ``img`` exactly.
    """
    if len(planes) not in (1, 3):
        raise ValueError(f"expected 1 or 3 planes, got {len(planes)}")
    stacked = np.stack([np.asarray(p, dtype=np.float64) for p in planes], axis=0)
    return Image(stacked)
