# Image Input/Output
# Lossless PNG and binary PPM (P6) codecs backed by Pillow

import io
import logging
from enum import Enum
from pathlib import Path
from typing import Optional, Union

import numpy as np
from PIL import Image

from common.errors import CorruptFile, IoFailure, UnsupportedFormat
from imaging.raster import Raster

logger = logging.getLogger(__name__)

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
PPM_SIGNATURE = b"P6"


class ImageFormat(Enum):
    """Lossless formats the toolkit reads and writes"""
    PNG = "png"
    PPM = "ppm"

    @classmethod
    def from_path(cls, path: Union[str, Path]) -> "ImageFormat":
        suffix = Path(path).suffix.lower().lstrip(".")
        if suffix == "png":
            return cls.PNG
        if suffix in ("ppm", "pnm"):
            return cls.PPM
        raise UnsupportedFormat(f"cannot infer image format from '{path}'")


def _detect_format(data: bytes, path: Path) -> ImageFormat:
    if data.startswith(PNG_SIGNATURE):
        return ImageFormat.PNG
    if data.startswith(PPM_SIGNATURE) and len(data) > 2 and data[2:3].isspace():
        return ImageFormat.PPM
    raise UnsupportedFormat(f"{path}: not a PNG or binary PPM (P6) file")


def read_image(path: Union[str, Path]) -> Raster:
    """Decode a PNG or P6 PPM file into a Raster, preserving pixel values exactly"""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e

    fmt = _detect_format(data, path)
    try:
        with Image.open(io.BytesIO(data)) as image:
            image.load()
            mode = image.mode
            if mode in ("RGBA", "LA", "PA"):
                logger.warning("%s: dropping alpha channel", path)
            elif mode == "P" and "transparency" in image.info:
                logger.warning("%s: dropping palette transparency", path)
            elif mode not in ("RGB", "L", "P", "1"):
                raise UnsupportedFormat(f"{path}: unsupported {fmt.value} pixel mode '{mode}'")
            rgb = image.convert("RGB") if mode != "RGB" else image
            pixels = np.asarray(rgb, dtype=np.uint8)
    except UnsupportedFormat:
        raise
    except (OSError, SyntaxError, ValueError, EOFError) as e:
        raise CorruptFile(f"{path}: cannot decode {fmt.value} data: {e}") from e

    return Raster(width=pixels.shape[1], height=pixels.shape[0], pixels=pixels)


def write_image(raster: Raster, path: Union[str, Path], fmt: Optional[ImageFormat] = None) -> Path:
    """Write a Raster losslessly; the format defaults to the one implied by the suffix"""
    path = Path(path)
    fmt = fmt or ImageFormat.from_path(path)
    image = Image.fromarray(raster.to_array())
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        image.save(path, format=fmt.name)
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e
    return path
