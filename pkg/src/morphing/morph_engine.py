# Landmark Morph Engine
# Border augmentation, point averaging, piecewise-affine warping and alpha blending

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np

from common.config import DEFAULT_ALPHA
from common.errors import IncompatiblePair, LengthMismatch, MeshMismatch
from geometry.delaunay import DUPLICATE_TOLERANCE, delaunay
from geometry.mesh import (Point2, PointLike, TriangleMesh, affine_from_triangles,
                           barycentric_many, points_array, to_xy)
from imaging.raster import Raster, quantize, sample_bilinear_many
from morphing.landmarks import LandmarkSet

logger = logging.getLogger(__name__)

BORDER_POINT_COUNT = 8

# Pixels on a shared triangle edge belong to the first triangle in mesh order
INSIDE_TOLERANCE = 1e-9
MESH_POINT_TOLERANCE = 1e-9


class MorphStyle(Enum):
    """Landmark morph variants"""
    # Border points added: the whole frame is warped and blended
    OPENCV = "opencv"
    # Landmarks only: outside the landmark hull the sources are plainly cross-dissolved
    FACEMORPHER = "facemorpher"


def augment_border(points: Sequence[PointLike], width: int, height: int) -> List[Point2]:
    """Append the 4 image corners and 4 edge midpoints.

    Order: (0,0), (w-1,0), (0,h-1), (w-1,h-1), (mx,0), (mx,h-1), (0,my), (w-1,my)
    with mx = (w-1)/2 and my = (h-1)/2.
    """
    if width < 2 or height < 2:
        raise IncompatiblePair(f"border augmentation needs an image of at least 2x2, got {width}x{height}")
    right, bottom = float(width - 1), float(height - 1)
    mid_x, mid_y = right / 2.0, bottom / 2.0
    border = [
        Point2(0.0, 0.0), Point2(right, 0.0), Point2(0.0, bottom), Point2(right, bottom),
        Point2(mid_x, 0.0), Point2(mid_x, bottom), Point2(0.0, mid_y), Point2(right, mid_y),
    ]
    return [Point2(*to_xy(p)) for p in points] + border


def average_points(pa: Sequence[PointLike], pb: Sequence[PointLike], alpha: float) -> List[Point2]:
    """Elementwise alpha * pa + (1 - alpha) * pb"""
    # beta = 1 - alpha is inexact for non-dyadic alpha, so swapping the sources
    # may move a pixel by one level after quantization
    if len(pa) != len(pb):
        raise LengthMismatch(f"point lists differ in length: {len(pa)} vs {len(pb)}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    beta = 1.0 - alpha
    averaged = []
    for a, b in zip(pa, pb):
        (ax, ay), (bx, by) = to_xy(a), to_xy(b)
        averaged.append(Point2(alpha * ax + beta * bx, alpha * ay + beta * by))
    return averaged


@dataclass(frozen=True)
class MorphSpec:
    """Two morph sources and the blend weight given to source A"""
    image_a: Raster
    landmarks_a: LandmarkSet
    image_b: Raster
    landmarks_b: LandmarkSet
    alpha: float = DEFAULT_ALPHA

    def validate(self) -> "MorphSpec":
        if self.landmarks_a.scheme != self.landmarks_b.scheme:
            raise IncompatiblePair(f"landmark schemes differ: '{self.landmarks_a.scheme}' "
                                   f"vs '{self.landmarks_b.scheme}'")
        if len(self.landmarks_a) != len(self.landmarks_b):
            raise IncompatiblePair(f"landmark counts differ: {len(self.landmarks_a)} "
                                   f"vs {len(self.landmarks_b)}")
        if self.image_a.size != self.image_b.size:
            raise IncompatiblePair(f"image sizes differ: {self.image_a.size} vs {self.image_b.size}")
        if not 0.0 <= self.alpha <= 1.0:
            raise IncompatiblePair(f"alpha must lie in [0, 1], got {self.alpha}")
        return self


def _check_mesh(src_pts: Sequence[PointLike], dst_pts: Sequence[PointLike],
                mesh: TriangleMesh) -> Tuple[np.ndarray, np.ndarray]:
    if len(src_pts) != len(dst_pts):
        raise MeshMismatch(f"{len(src_pts)} source points vs {len(dst_pts)} destination points")
    if len(mesh.points) != len(dst_pts):
        raise MeshMismatch(f"mesh has {len(mesh.points)} points, destination has {len(dst_pts)}")
    src = points_array(src_pts)
    dst = points_array(dst_pts)
    if len(dst) and np.max(np.abs(points_array(mesh.points) - dst)) > MESH_POINT_TOLERANCE:
        raise MeshMismatch("mesh was not built on the destination points")
    return src, dst


def warp_to_float(src: Raster, src_pts: Sequence[PointLike], dst_pts: Sequence[PointLike],
                  mesh: TriangleMesh) -> np.ndarray:
    """Piecewise-affine warp of `src` so that src_pts land on dst_pts, before quantization.

    Each destination pixel inside a triangle is sampled bilinearly at its preimage
    under the triangle's affine map; pixels outside every triangle keep the source value.
    """
    src_xy, dst_xy = _check_mesh(src_pts, dst_pts, mesh)
    width, height = src.size
    source = src.pixels.astype(np.float64)
    out = source.copy()
    assigned = np.zeros((height, width), dtype=bool)

    for tri in mesh.triangles:
        dst_tri = dst_xy[list(tri)]
        x_lo = max(int(np.floor(dst_tri[:, 0].min())), 0)
        x_hi = min(int(np.ceil(dst_tri[:, 0].max())), width - 1)
        y_lo = max(int(np.floor(dst_tri[:, 1].min())), 0)
        y_hi = min(int(np.ceil(dst_tri[:, 1].max())), height - 1)
        if x_lo > x_hi or y_lo > y_hi:
            continue

        ys, xs = np.mgrid[y_lo:y_hi + 1, x_lo:x_hi + 1]
        weights = barycentric_many(dst_tri, xs.astype(np.float64), ys.astype(np.float64))
        inside = np.all(weights >= -INSIDE_TOLERANCE, axis=0)
        inside &= ~assigned[y_lo:y_hi + 1, x_lo:x_hi + 1]
        if not inside.any():
            continue

        px, py = xs[inside], ys[inside]
        inverse = affine_from_triangles(dst_tri, src_xy[list(tri)])
        sx, sy = inverse.apply_many(px.astype(np.float64), py.astype(np.float64))
        out[py, px] = sample_bilinear_many(source, sx, sy)
        assigned[py, px] = True

    return out


def warp_to(src: Raster, src_pts: Sequence[PointLike], dst_pts: Sequence[PointLike],
            mesh: TriangleMesh) -> Raster:
    """Quantized piecewise-affine warp (see warp_to_float)"""
    return Raster.from_array(quantize(warp_to_float(src, src_pts, dst_pts, mesh)))


@dataclass(frozen=True, eq=False)
class WarpedPair:
    """Both sources warped onto the shared averaged geometry"""
    warped_a: np.ndarray
    warped_b: np.ndarray
    mesh: TriangleMesh


def warp_pair(spec: MorphSpec, style: MorphStyle = MorphStyle.OPENCV) -> WarpedPair:
    """Warp A and B onto their averaged landmarks with one mesh built on the average"""
    spec.validate()
    width, height = spec.image_a.size
    pts_a: List[Point2] = list(spec.landmarks_a.points)
    pts_b: List[Point2] = list(spec.landmarks_b.points)

    if style is MorphStyle.OPENCV:
        pts_a = augment_border(pts_a, width, height)
        pts_b = augment_border(pts_b, width, height)

    target = average_points(pts_a, pts_b, spec.alpha)
    if style is MorphStyle.OPENCV:
        # Border points are shared by both sources; keep them exact
        target[-BORDER_POINT_COUNT:] = pts_a[-BORDER_POINT_COUNT:]

    target, pts_a, pts_b = _merge_coincident(target, pts_a, pts_b)
    mesh = delaunay(target)
    logger.debug("Morph mesh: %d points, %d triangles", len(target), len(mesh))
    return WarpedPair(
        warped_a=warp_to_float(spec.image_a, pts_a, target, mesh),
        warped_b=warp_to_float(spec.image_b, pts_b, target, mesh),
        mesh=mesh,
    )


def _merge_coincident(target: List[Point2], pts_a: List[Point2],
                      pts_b: List[Point2]) -> Tuple[List[Point2], List[Point2], List[Point2]]:
    """Drop target points that coincide with an earlier one, together with their source points.

    Landmarks precede border points, so a landmark on the frame border replaces that border point.
    """
    xy = points_array(target)
    keep: List[int] = []
    for i in range(len(target)):
        if keep and np.min(np.hypot(*(xy[keep] - xy[i]).T)) < DUPLICATE_TOLERANCE:
            continue
        keep.append(i)
    if len(keep) < len(target):
        logger.debug("Merged %d coincident morph target points", len(target) - len(keep))
    return ([target[i] for i in keep], [pts_a[i] for i in keep], [pts_b[i] for i in keep])


def blend(warped_a: np.ndarray, warped_b: np.ndarray, alpha: float) -> np.ndarray:
    """alpha * A + (1 - alpha) * B, unquantized"""
    return alpha * warped_a + (1.0 - alpha) * warped_b


def morph(spec: MorphSpec, style: MorphStyle = MorphStyle.OPENCV) -> Raster:
    """Landmark morph: warp both faces onto averaged geometry and alpha-blend them"""
    warped = warp_pair(spec, style)
    return Raster.from_array(quantize(blend(warped.warped_a, warped.warped_b, spec.alpha)))
