# Latent Interpolation Morphing
# Generator-agnostic latent blending with a pluggable synthesis backend

import csv
import logging
import math
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from common.config import DEFAULT_ALPHA, DEFAULT_SEED
from common.errors import (BackendFailure, ConfigError, FaceMorphError, IoFailure, ParseError,
                           SpaceMismatch)
from common.tables import format_float
from imaging.raster import Raster, quantize

logger = logging.getLogger(__name__)

DEFAULT_SPACE_TAG = "W-512"
DECODER_OFFSET = 127.5
# Spread of decoded pixel values for a unit-variance latent
DECODER_SPREAD = 48.0

_SPACE_SHAPE = re.compile(r"-(\d+(?:x\d+)*)$")


def space_dimension(space_tag: str) -> Optional[int]:
    """Dimension encoded in a space tag: 'W-512' -> 512, 'Wplus-18x512' -> 9216, 'W' -> None"""
    match = _SPACE_SHAPE.search(space_tag)
    if not match:
        return None
    return math.prod(int(part) for part in match.group(1).split("x"))


@dataclass(frozen=True, eq=False)
class LatentVector:
    """Point in a generator's latent space"""
    values: np.ndarray
    space_tag: str

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(values)):
            raise ValueError("latent vector has non-finite entries")
        expected = space_dimension(self.space_tag)
        if expected is not None and values.size != expected:
            raise SpaceMismatch(f"space '{self.space_tag}' expects dimension {expected}, "
                                f"got {values.size}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dimension(self) -> int:
        return int(self.values.size)


class GeneratorBackend(ABC):
    """Synthesizes a face image from a latent vector.

    Implementations must be deterministic for a fixed input. A pretrained
    generator (e.g. a StyleGAN2 synthesis network) plugs in here.
    """

    @property
    @abstractmethod
    def space_tag(self) -> str:
        ...

    @abstractmethod
    def synthesize(self, latent: LatentVector) -> Raster:
        ...


class LinearTestBackend(GeneratorBackend):
    """Fixed pseudo-random linear decoder: pixels = quantize(M w + c).

    Read-only after construction, so concurrent synthesize calls are safe.
    """

    def __init__(self, width: int = 64, height: int = 64, space_tag: str = DEFAULT_SPACE_TAG,
                 seed: int = DEFAULT_SEED, dimension: Optional[int] = None):
        """Build the decoder matrix from `seed`"""
        tag_dimension = space_dimension(space_tag)
        if dimension is None:
            dimension = tag_dimension
        if dimension is None or dimension < 1:
            raise ConfigError(f"space '{space_tag}' has no dimension; pass one explicitly")
        if tag_dimension is not None and tag_dimension != dimension:
            raise SpaceMismatch(f"space '{space_tag}' is {tag_dimension}-dimensional, not {dimension}")
        if width < 1 or height < 1:
            raise ConfigError(f"output size must be positive, got {width}x{height}")

        self.width = width
        self.height = height
        self.dimension = dimension
        self._space_tag = space_tag
        rng = np.random.default_rng(seed)
        self.matrix = rng.normal(0.0, DECODER_SPREAD / math.sqrt(dimension),
                                 size=(height * width * 3, dimension))
        self.matrix.setflags(write=False)
        self.offset = DECODER_OFFSET

    @property
    def space_tag(self) -> str:
        return self._space_tag

    def _check(self, latent: LatentVector) -> None:
        if latent.space_tag != self._space_tag or latent.dimension != self.dimension:
            raise SpaceMismatch(f"backend space '{self._space_tag}' ({self.dimension}) cannot decode "
                                f"'{latent.space_tag}' ({latent.dimension})")

    def decode(self, latent: LatentVector) -> np.ndarray:
        """Pre-quantization image, shape (height, width, 3)"""
        self._check(latent)
        flat = self.matrix @ latent.values + self.offset
        return flat.reshape(self.height, self.width, 3)

    def synthesize(self, latent: LatentVector) -> Raster:
        return Raster.from_array(quantize(self.decode(latent)))


def lerp_latent(wa: LatentVector, wb: LatentVector, alpha: float = DEFAULT_ALPHA) -> LatentVector:
    """alpha * wa + (1 - alpha) * wb"""
    if wa.space_tag != wb.space_tag or wa.dimension != wb.dimension:
        raise SpaceMismatch(f"cannot interpolate '{wa.space_tag}' ({wa.dimension}) with "
                            f"'{wb.space_tag}' ({wb.dimension})")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return LatentVector(alpha * wa.values + (1.0 - alpha) * wb.values, wa.space_tag)


def latent_morph(backend: GeneratorBackend, wa: LatentVector, wb: LatentVector,
                 alpha: float = DEFAULT_ALPHA) -> Raster:
    """Synthesize the morph of two latent vectors"""
    if backend.space_tag != wa.space_tag:
        raise SpaceMismatch(f"backend space '{backend.space_tag}' does not match "
                            f"latent space '{wa.space_tag}'")
    blended = lerp_latent(wa, wb, alpha)
    try:
        return backend.synthesize(blended)
    except FaceMorphError:
        raise
    except Exception as e:
        raise BackendFailure(f"{type(backend).__name__} failed: {e}") from e


def load_latents(path: Union[str, Path]) -> List[LatentVector]:
    """Read rows 'space_tag,v0,v1,...'"""
    path = Path(path)
    latents = []
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            for lineno, row in enumerate(csv.reader(handle), start=1):
                if not row or all(not cell.strip() for cell in row):
                    continue
                tag = row[0].strip()
                if not tag or len(row) < 2:
                    raise ParseError("expected 'space_tag,v0,v1,...'", line=lineno, path=str(path))
                try:
                    values = [float(cell) for cell in row[1:]]
                except ValueError:
                    raise ParseError("non-numeric latent entry", line=lineno, path=str(path))
                try:
                    latents.append(LatentVector(np.array(values), tag))
                except ValueError as e:
                    raise ParseError(str(e), line=lineno, path=str(path))
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    if not latents:
        raise ParseError("no latent vectors found", path=str(path))
    return latents


def write_latent(latents: Union[LatentVector, Sequence[LatentVector]], path: Union[str, Path]) -> Path:
    path = Path(path)
    if isinstance(latents, LatentVector):
        latents = [latents]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            for latent in latents:
                writer.writerow([latent.space_tag] + [format_float(v) for v in latent.values])
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e
    return path
