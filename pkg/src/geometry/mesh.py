# Planar Geometry Types
# Points, triangle meshes, affine maps between triangle pairs, barycentric coordinates

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from common.errors import DegenerateSource, DegenerateTriangle, FaceMorphError
from geometry.predicates import incircle, orient2d


@dataclass(frozen=True)
class Point2:
    """2-D point in pixel coordinates"""
    x: float
    y: float

    def __post_init__(self):
        # numpy scalars become plain floats
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def as_tuple(self) -> Tuple[float, float]:
        return (self.x, self.y)


PointLike = Union[Point2, Sequence[float]]


def to_xy(p: PointLike) -> Tuple[float, float]:
    """Plain float pair from a Point2 or any (x, y) sequence"""
    if isinstance(p, Point2):
        return (p.x, p.y)
    return (float(p[0]), float(p[1]))


def to_points(points: Iterable[PointLike]) -> List[Point2]:
    return [p if isinstance(p, Point2) else Point2(float(p[0]), float(p[1])) for p in points]


def points_array(points: Iterable[PointLike]) -> np.ndarray:
    """(n, 2) float64 array of the given points"""
    arr = np.array([to_xy(p) for p in points], dtype=np.float64)
    return arr.reshape(-1, 2)


Triangle = Tuple[int, int, int]


@dataclass(frozen=True)
class TriangleMesh:
    """Counter-clockwise index triples into a shared point list"""
    points: Tuple[Point2, ...]
    triangles: Tuple[Triangle, ...]

    def __post_init__(self):
        n = len(self.points)
        for tri in self.triangles:
            if len(tri) != 3 or any(not 0 <= i < n for i in tri):
                raise FaceMorphError(f"triangle {tri} indexes outside {n} points")
            a, b, c = (self.points[i].as_tuple() for i in tri)
            if orient2d(a, b, c) <= 0:
                raise DegenerateTriangle(f"triangle {tri} is degenerate or clockwise")

    def __len__(self) -> int:
        return len(self.triangles)

    def vertices(self, index: int) -> Tuple[Point2, Point2, Point2]:
        i, j, k = self.triangles[index]
        return (self.points[i], self.points[j], self.points[k])

    def edges(self) -> List[Tuple[int, int]]:
        """Undirected edges, each once, sorted"""
        seen = set()
        for i, j, k in self.triangles:
            for u, v in ((i, j), (j, k), (k, i)):
                seen.add((min(u, v), max(u, v)))
        return sorted(seen)

    def total_area(self) -> float:
        pts = points_array(self.points)
        total = 0.0
        for i, j, k in self.triangles:
            total += 0.5 * ((pts[j, 0] - pts[i, 0]) * (pts[k, 1] - pts[i, 1])
                            - (pts[k, 0] - pts[i, 0]) * (pts[j, 1] - pts[i, 1]))
        return total


@dataclass(frozen=True, eq=False)
class AffineMap2:
    """2x3 matrix [a b tx; c d ty] mapping (x, y) -> (a x + b y + tx, c x + d y + ty)"""
    matrix: np.ndarray = field(default_factory=lambda: np.eye(2, 3))

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.float64)
        if m.shape != (2, 3):
            raise ValueError(f"affine matrix must be 2x3, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "AffineMap2":
        return cls(np.eye(2, 3))

    @property
    def determinant(self) -> float:
        m = self.matrix
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])

    def apply(self, p: PointLike) -> Tuple[float, float]:
        x, y = to_xy(p)
        m = self.matrix
        return (float(m[0, 0] * x + m[0, 1] * y + m[0, 2]),
                float(m[1, 0] * x + m[1, 1] * y + m[1, 2]))

    def apply_many(self, xs: np.ndarray, ys: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        m = self.matrix
        return (m[0, 0] * xs + m[0, 1] * ys + m[0, 2],
                m[1, 0] * xs + m[1, 1] * ys + m[1, 2])

    def then(self, other: "AffineMap2") -> "AffineMap2":
        """Map applying self first, then other"""
        first = np.vstack([self.matrix, [0.0, 0.0, 1.0]])
        second = np.vstack([other.matrix, [0.0, 0.0, 1.0]])
        return AffineMap2((second @ first)[:2])

    def inverse(self) -> "AffineMap2":
        if self.determinant == 0.0:
            raise DegenerateTriangle("affine map is singular")
        full = np.vstack([self.matrix, [0.0, 0.0, 1.0]])
        return AffineMap2(np.linalg.inv(full)[:2])


def _triangle_xy(tri: Sequence[PointLike]) -> List[Tuple[float, float]]:
    if len(tri) != 3:
        raise ValueError(f"triangle needs 3 vertices, got {len(tri)}")
    return [to_xy(p) for p in tri]


def affine_from_triangles(src: Sequence[PointLike], dst: Sequence[PointLike]) -> AffineMap2:
    """Affine map sending the three src vertices onto the three dst vertices"""
    s = _triangle_xy(src)
    d = _triangle_xy(dst)
    if orient2d(*s) == 0:
        raise DegenerateSource(f"source triangle {s} has zero area")

    # Solve on edge vectors from vertex 0; the translation follows from vertex 0
    src_edges = np.array([[s[1][0] - s[0][0], s[2][0] - s[0][0]],
                          [s[1][1] - s[0][1], s[2][1] - s[0][1]]])
    dst_edges = np.array([[d[1][0] - d[0][0], d[2][0] - d[0][0]],
                          [d[1][1] - d[0][1], d[2][1] - d[0][1]]])
    linear = np.linalg.solve(src_edges.T, dst_edges.T).T
    translation = np.array(d[0]) - linear @ np.array(s[0])
    return AffineMap2(np.hstack([linear, translation[:, None]]))


def barycentric(tri: Sequence[PointLike], p: PointLike) -> Tuple[float, float, float]:
    """Coefficients (l1, l2, l3) with p = l1 v1 + l2 v2 + l3 v3 and l1 + l2 + l3 = 1"""
    (x0, y0), (x1, y1), (x2, y2) = _triangle_xy(tri)
    if orient2d((x0, y0), (x1, y1), (x2, y2)) == 0:
        raise DegenerateTriangle(f"triangle {tri} has zero area")
    px, py = to_xy(p)
    det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
    l2 = ((px - x0) * (y2 - y0) - (x2 - x0) * (py - y0)) / det
    l3 = ((x1 - x0) * (py - y0) - (px - x0) * (y1 - y0)) / det
    return (1.0 - l2 - l3, l2, l3)


def barycentric_many(tri: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Barycentric coordinates of many points; returns shape (3,) + xs.shape"""
    (x0, y0), (x1, y1), (x2, y2) = tri
    det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
    if det == 0.0:
        raise DegenerateTriangle("triangle has zero area")
    l2 = ((xs - x0) * (y2 - y0) - (x2 - x0) * (ys - y0)) / det
    l3 = ((x1 - x0) * (ys - y0) - (xs - x0) * (y1 - y0)) / det
    return np.stack([1.0 - l2 - l3, l2, l3])


def circumcircle_contains(tri: Sequence[PointLike], p: PointLike) -> bool:
    """True iff p lies strictly inside the circumcircle of tri"""
    a, b, c = _triangle_xy(tri)
    orientation = orient2d(a, b, c)
    if orientation == 0:
        raise DegenerateTriangle(f"triangle {tri} has zero area")
    return incircle(a, b, c, to_xy(p)) * orientation > 0
