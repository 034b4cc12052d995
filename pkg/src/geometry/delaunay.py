# Delaunay Triangulation
# Incremental Bowyer-Watson insertion with a symbolic super-vertex at infinity

import logging
import math
from typing import Dict, Optional, Sequence, Set, Tuple

from common.errors import CollinearInput, DuplicatePoints, TooFewPoints
from geometry.mesh import PointLike, Triangle, TriangleMesh, to_points
from geometry.predicates import incircle, orient2d

logger = logging.getLogger(__name__)

DUPLICATE_TOLERANCE = 1e-9

# Index of the vertex at infinity. A ghost triangle (u, v, GHOST) sits on hull edge u -> v,
# with the outside of the hull on the left of u -> v.
GHOST = -1


def _edges(tri: Triangle):
    a, b, c = tri
    return ((a, b), (b, c), (c, a))


def _ghost_last(tri: Triangle) -> Triangle:
    a, b, c = tri
    if a == GHOST:
        return (b, c, a)
    if b == GHOST:
        return (c, a, b)
    return tri


class _Triangulation:
    """Mutable triangulation state; every triangle is stored counter-clockwise"""

    def __init__(self, xy: Sequence[Tuple[float, float]]):
        self.xy = xy
        self.owner: Dict[Tuple[int, int], Triangle] = {}
        self.solids: Set[Triangle] = set()
        self.ghosts: Set[Triangle] = set()

    def add(self, tri: Triangle) -> None:
        tri = _ghost_last(tri)
        (self.ghosts if tri[2] == GHOST else self.solids).add(tri)
        for edge in _edges(tri):
            self.owner[edge] = tri

    def remove(self, tri: Triangle) -> None:
        (self.ghosts if tri[2] == GHOST else self.solids).discard(tri)
        for edge in _edges(tri):
            if self.owner.get(edge) == tri:
                del self.owner[edge]

    def seed(self, a: int, b: int, c: int) -> None:
        if orient2d(self.xy[a], self.xy[b], self.xy[c]) < 0:
            b, c = c, b
        self.add((a, b, c))
        for u, v in ((a, b), (b, c), (c, a)):
            self.add((v, u, GHOST))

    def _between(self, u: int, v: int, p: int) -> bool:
        (ux, uy), (vx, vy), (px, py) = self.xy[u], self.xy[v], self.xy[p]
        if ux != vx:
            return min(ux, vx) < px < max(ux, vx)
        return min(uy, vy) < py < max(uy, vy)

    def conflicts(self, tri: Triangle, p: int) -> bool:
        a, b, c = tri
        if c == GHOST:
            side = orient2d(self.xy[a], self.xy[b], self.xy[p])
            return side > 0 or (side == 0 and self._between(a, b, p))
        return incircle(self.xy[a], self.xy[b], self.xy[c], self.xy[p]) > 0

    def _find_conflict(self, p: int) -> Optional[Triangle]:
        for tri in sorted(self.ghosts):
            if self.conflicts(tri, p):
                return tri
        for tri in sorted(self.solids):
            if self.conflicts(tri, p):
                return tri
        return None

    def insert(self, p: int) -> None:
        start = self._find_conflict(p)
        if start is None:
            raise CollinearInput(f"point {p} could not be located")

        cavity: Set[Triangle] = set()
        rejected: Set[Triangle] = set()
        stack = [start]
        while stack:
            tri = stack.pop()
            if tri in cavity:
                continue
            cavity.add(tri)
            for u, v in _edges(tri):
                neighbour = self.owner.get((v, u))
                if neighbour is None or neighbour in cavity or neighbour in rejected:
                    continue
                if self.conflicts(neighbour, p):
                    stack.append(neighbour)
                else:
                    rejected.add(neighbour)

        boundary = []
        for tri in sorted(cavity):
            for u, v in _edges(tri):
                if self.owner.get((v, u)) not in cavity:
                    boundary.append((u, v))

        for tri in cavity:
            self.remove(tri)
        for u, v in boundary:
            self.add((u, v, p))


def _check_duplicates(xy: Sequence[Tuple[float, float]], order: Sequence[int]) -> None:
    for pos, i in enumerate(order):
        for j in order[pos + 1:]:
            if xy[j][0] - xy[i][0] >= DUPLICATE_TOLERANCE:
                break
            if math.hypot(xy[j][0] - xy[i][0], xy[j][1] - xy[i][1]) < DUPLICATE_TOLERANCE:
                raise DuplicatePoints(min(i, j), max(i, j))


def _normalize(tri: Triangle) -> Triangle:
    a, b, c = tri
    if b < a and b < c:
        return (b, c, a)
    if c < a and c < b:
        return (c, a, b)
    return tri


def delaunay(points: Sequence[PointLike]) -> TriangleMesh:
    """Delaunay triangulation of a planar point set.

    Points are inserted in lexicographic (x, y) order, so the output is fully
    determined by the input coordinates; on co-circular configurations the
    diagonal is the one produced by that insertion order. Triangles are
    counter-clockwise, start at their smallest index and are sorted.
    """
    pts = to_points(points)
    n = len(pts)
    if n < 3:
        raise TooFewPoints(f"need at least 3 points, got {n}")

    xy = [p.as_tuple() for p in pts]
    order = sorted(range(n), key=lambda i: (xy[i][0], xy[i][1], i))
    _check_duplicates(xy, order)

    first, second = order[0], order[1]
    third_pos = next((pos for pos in range(2, n)
                      if orient2d(xy[first], xy[second], xy[order[pos]]) != 0), None)
    if third_pos is None:
        raise CollinearInput(f"all {n} points are collinear")

    state = _Triangulation(xy)
    state.seed(first, second, order[third_pos])
    for pos in range(2, n):
        if pos != third_pos:
            state.insert(order[pos])

    triangles = sorted(_normalize(tri) for tri in state.solids)
    logger.debug("Triangulated %d points into %d triangles", n, len(triangles))
    return TriangleMesh(points=tuple(pts), triangles=tuple(triangles))
