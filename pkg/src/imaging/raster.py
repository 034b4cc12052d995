# Raster Images
# 8-bit RGB raster type, bilinear sampling and pixel quantization

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np


@dataclass(frozen=True, eq=False)
class Raster:
    """Immutable 8-bit RGB image; `pixels` is a row-major (height, width, 3) array"""
    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"raster must be at least 1x1, got {self.width}x{self.height}")
        pixels = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if pixels.shape != (self.height, self.width, 3):
            raise ValueError(f"pixel array shape {pixels.shape} does not match "
                             f"{self.width}x{self.height} RGB")
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    @classmethod
    def from_array(cls, array: np.ndarray) -> "Raster":
        array = np.asarray(array)
        if array.ndim != 3 or array.shape[2] != 3:
            raise ValueError(f"expected (height, width, 3) array, got {array.shape}")
        return cls(width=array.shape[1], height=array.shape[0], pixels=array.copy())

    @classmethod
    def filled(cls, width: int, height: int, color: Sequence[int]) -> "Raster":
        pixels = np.empty((height, width, 3), dtype=np.uint8)
        pixels[...] = np.asarray(color, dtype=np.uint8)
        return cls(width=width, height=height, pixels=pixels)

    @property
    def size(self) -> Tuple[int, int]:
        return (self.width, self.height)

    def pixel(self, x: int, y: int) -> Tuple[int, int, int]:
        r, g, b = self.pixels[y, x]
        return (int(r), int(g), int(b))

    def to_array(self) -> np.ndarray:
        """Writable copy of the pixels"""
        return self.pixels.copy()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Raster):
            return NotImplemented
        return self.size == other.size and np.array_equal(self.pixels, other.pixels)


def quantize(values: np.ndarray) -> np.ndarray:
    """Round half up to the nearest integer and clamp to [0, 255]"""
    return np.clip(np.floor(np.asarray(values, dtype=np.float64) + 0.5), 0, 255).astype(np.uint8)


def sample_bilinear_many(pixels: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Bilinear samples of a (height, width, channels) array at real coordinates.

    Coordinates are clamped to the valid pixel range (clamp-to-edge). Integer
    coordinates return the stored value exactly. Result shape: xs.shape + (channels,).
    """
    height, width = pixels.shape[:2]
    data = np.asarray(pixels, dtype=np.float64)
    xs = np.clip(np.asarray(xs, dtype=np.float64), 0.0, width - 1)
    ys = np.clip(np.asarray(ys, dtype=np.float64), 0.0, height - 1)

    x0 = np.floor(xs).astype(np.intp)
    y0 = np.floor(ys).astype(np.intp)
    x1 = np.minimum(x0 + 1, width - 1)
    y1 = np.minimum(y0 + 1, height - 1)
    fx = (xs - x0)[..., None]
    fy = (ys - y0)[..., None]

    top = data[y0, x0] * (1.0 - fx) + data[y0, x1] * fx
    bottom = data[y1, x0] * (1.0 - fx) + data[y1, x1] * fx
    return top * (1.0 - fy) + bottom * fy


def sample_bilinear(raster: Raster, x: float, y: float) -> Tuple[float, float, float]:
    """Bilinear RGB sample at one real coordinate"""
    value = sample_bilinear_many(raster.pixels, np.array([x]), np.array([y]))[0]
    return (float(value[0]), float(value[1]), float(value[2]))
