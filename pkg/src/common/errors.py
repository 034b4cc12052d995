# FaceMorph Lab Errors
# Exception hierarchy shared by every package

from typing import List, Optional, Sequence, Tuple


class FaceMorphError(Exception):
    """Base class for all data errors raised by the toolkit"""


class ConfigError(FaceMorphError):
    """Invalid run configuration or command-line value (usage error)"""


# Geometry

class TooFewPoints(FaceMorphError):
    """Fewer than three points given to the triangulator"""


class CollinearInput(FaceMorphError):
    """All input points lie on one line"""


class DuplicatePoints(FaceMorphError):
    """Two input points coincide within tolerance"""

    def __init__(self, first: int, second: int):
        super().__init__(f"points {first} and {second} coincide")
        self.first = first
        self.second = second


class DegenerateTriangle(FaceMorphError):
    """Triangle with zero area"""


class DegenerateSource(DegenerateTriangle):
    """Source triangle of an affine estimate has zero area"""


# Imaging

class UnsupportedFormat(FaceMorphError):
    """File is not a PNG or binary PPM (P6) image"""


class CorruptFile(FaceMorphError):
    """Image file could not be decoded"""


class IoFailure(FaceMorphError):
    """Reading or writing a file failed at the OS level"""


# Morphing

class ParseError(FaceMorphError):
    """Malformed input file; `line` is the 1-based line number when known"""

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        where = ""
        if path:
            where += f"{path}"
        if line is not None:
            where += f"{':' if where else 'line '}{line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.line = line
        self.path = path


class CountMismatch(FaceMorphError):
    """Landmark file holds a different number of points than its scheme"""


class OutOfBounds(FaceMorphError):
    """Landmark outside the image rectangle"""


class LengthMismatch(FaceMorphError):
    """Point lists of different length"""


class MeshMismatch(FaceMorphError):
    """Mesh does not triangulate the given destination points"""


class IncompatiblePair(FaceMorphError):
    """Two morph sources that cannot be blended (scheme, count or size differs)"""


class SpaceMismatch(FaceMorphError):
    """Latent vectors or backend from different latent spaces"""


class BackendFailure(FaceMorphError):
    """Generator backend raised while synthesizing"""


# Protocol

class DuplicateImageId(FaceMorphError):
    """Same image_id on two manifest rows"""

    def __init__(self, image_id: str, line: int):
        super().__init__(f"line {line}: duplicate image_id '{image_id}'")
        self.image_id = image_id
        self.line = line


class UnknownImageId(FaceMorphError):
    """Protocol rows referencing image ids absent from the manifest"""

    def __init__(self, issues: Sequence[Tuple[int, str]]):
        self.issues: List[Tuple[int, str]] = list(issues)
        listing = ", ".join(f"line {line}: '{image_id}'" for line, image_id in self.issues)
        super().__init__(f"unknown image ids ({len(self.issues)}): {listing}")


# Scoring / metrics

class DimensionMismatch(FaceMorphError):
    """Vectors of one model tag with different dimensions"""


class ZeroVector(FaceMorphError):
    """All-zero embedding"""


class EmptySet(FaceMorphError):
    """Reference built from no embeddings"""


class UnknownId(FaceMorphError):
    """Comparison references an id that has no reference or probe"""


class EmptyScores(FaceMorphError):
    """Metric computed on an empty score list"""


class InconsistentLabels(FaceMorphError):
    """Score rows whose labels contradict each other or the scenario"""
