# Facial Landmark Sets
# Landmark annotation files: one "x y" pair per line, '#' comment lines allowed

import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Tuple, Union

import numpy as np

from common.errors import ConfigError, CountMismatch, IoFailure, OutOfBounds, ParseError
from geometry.mesh import Point2, PointLike, points_array, to_xy

logger = logging.getLogger(__name__)

AUTO_SCHEME = "auto"

# Fixed-size annotation schemes: Dlib-style 68 points and the 189-point FRLL templates
KNOWN_SCHEMES = {
    "68": 68,
    "189": 189,
}

_CUSTOM_SCHEME = re.compile(r"^custom-(\d+)$")


def expected_count(scheme: str) -> Optional[int]:
    """Point count a scheme requires; None for 'auto'"""
    if scheme == AUTO_SCHEME:
        return None
    if scheme in KNOWN_SCHEMES:
        return KNOWN_SCHEMES[scheme]
    match = _CUSTOM_SCHEME.match(scheme)
    if match and int(match.group(1)) > 0:
        return int(match.group(1))
    raise ConfigError(f"unknown landmark scheme '{scheme}' (use 68, 189, custom-<k> or auto)")


def scheme_for_count(count: int) -> str:
    for name, size in KNOWN_SCHEMES.items():
        if size == count:
            return name
    return f"custom-{count}"


@dataclass(frozen=True)
class LandmarkSet:
    """Ordered landmark points of one face image"""
    points: Tuple[Point2, ...]
    scheme: str
    image_path: Optional[Path] = None

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return points_array(self.points)


def load_landmarks(path: Union[str, Path], scheme: str = AUTO_SCHEME,
                   image_size: Optional[Tuple[int, int]] = None,
                   image_path: Optional[Union[str, Path]] = None) -> LandmarkSet:
    """Parse a landmark file.

    With `image_size` (width, height) every point must lie in [0, width] x [0, height].
    With `image_path` the landmark file stem must equal the image file stem.
    """
    path = Path(path)
    required = expected_count(scheme)

    if image_path is not None and Path(image_path).stem != path.stem:
        raise ParseError(f"landmark file stem '{path.stem}' does not match image "
                         f"'{Path(image_path).name}'", path=str(path))

    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e

    points = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'x y', got '{line}'", line=lineno, path=str(path))
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            raise ParseError(f"not a number pair: '{line}'", line=lineno, path=str(path))
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ParseError(f"non-finite coordinate: '{line}'", line=lineno, path=str(path))
        points.append(Point2(x, y))

    if required is not None and len(points) != required:
        raise CountMismatch(f"{path}: scheme '{scheme}' expects {required} points, "
                            f"found {len(points)}")

    if image_size is not None:
        width, height = image_size
        for index, p in enumerate(points):
            if not (0.0 <= p.x <= width and 0.0 <= p.y <= height):
                raise OutOfBounds(f"{path}: point {index} ({p.x}, {p.y}) outside "
                                  f"{width}x{height} image")

    tag = scheme if required is not None else scheme_for_count(len(points))
    return LandmarkSet(points=tuple(points), scheme=tag,
                       image_path=Path(image_path) if image_path is not None else None)


def save_landmarks(points: Iterable[PointLike], path: Union[str, Path],
                   comment: Optional[str] = None) -> Path:
    """Write points in the landmark text format"""
    path = Path(path)
    lines = [f"# {comment}"] if comment else []
    lines += [f"{x!r} {y!r}" for x, y in (to_xy(p) for p in points)]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e
    return path
