# Robust Geometric Predicates
# Adaptive orientation and in-circle signs: float fast path, exact fallback

import sys
from fractions import Fraction
from typing import Tuple

XY = Tuple[float, float]

# Shewchuk's first-stage error bounds; epsilon is half an ulp of 1.0
_EPSILON = sys.float_info.epsilon / 2.0
CCW_ERRBOUND = (3.0 + 16.0 * _EPSILON) * _EPSILON
ICC_ERRBOUND = (10.0 + 96.0 * _EPSILON) * _EPSILON


def _sign(value) -> int:
    return int(value > 0) - int(value < 0)


def _orient2d_exact(a: XY, b: XY, c: XY) -> int:
    ax, ay = Fraction(a[0]), Fraction(a[1])
    bx, by = Fraction(b[0]), Fraction(b[1])
    cx, cy = Fraction(c[0]), Fraction(c[1])
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def orient2d(a: XY, b: XY, c: XY) -> int:
    """Sign of the turn a -> b -> c: +1 counter-clockwise, -1 clockwise, 0 collinear"""
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright

    if detleft > 0.0:
        if detright <= 0.0:
            return _sign(det)
        detsum = detleft + detright
    elif detleft < 0.0:
        if detright >= 0.0:
            return _sign(det)
        detsum = -detleft - detright
    else:
        return _sign(det)

    if abs(det) >= CCW_ERRBOUND * detsum:
        return _sign(det)
    return _orient2d_exact(a, b, c)


def _incircle_exact(a: XY, b: XY, c: XY, d: XY) -> int:
    dx, dy = Fraction(d[0]), Fraction(d[1])
    adx, ady = Fraction(a[0]) - dx, Fraction(a[1]) - dy
    bdx, bdy = Fraction(b[0]) - dx, Fraction(b[1]) - dy
    cdx, cdy = Fraction(c[0]) - dx, Fraction(c[1]) - dy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    return _sign(det)


def incircle(a: XY, b: XY, c: XY, d: XY) -> int:
    """+1 if d lies strictly inside the circle through counter-clockwise a, b, c;
    -1 if strictly outside; 0 if on the circle. Sign flips for clockwise a, b, c."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]

    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    alift = adx * adx + ady * ady

    cdxady = cdx * ady
    adxcdy = adx * cdy
    blift = bdx * bdx + bdy * bdy

    adxbdy = adx * bdy
    bdxady = bdx * ady
    clift = cdx * cdx + cdy * cdy

    det = (alift * (bdxcdy - cdxbdy)
           + blift * (cdxady - adxcdy)
           + clift * (adxbdy - bdxady))

    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift
                 + (abs(cdxady) + abs(adxcdy)) * blift
                 + (abs(adxbdy) + abs(bdxady)) * clift)

    if abs(det) > ICC_ERRBOUND * permanent:
        return _sign(det)
    return _incircle_exact(a, b, c, d)
