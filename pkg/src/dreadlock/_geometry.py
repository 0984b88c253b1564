"""Planar helpers: rectangles, point/segment/ray distances and clipping."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle ``[re_min, re_max] x [im_min, im_max]``."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min <= self.re_max and self.im_min <= self.im_max):
            raise ValueError(f"malformed window {self}")

    @classmethod
    def from_sequence(cls, values):
        values = [float(v) for v in values]
        if len(values) != 4:
            raise ValueError("a window needs four numbers: re_min re_max im_min im_max")
        return cls(*values)

    @property
    def degenerate(self):
        return self.re_min == self.re_max or self.im_min == self.im_max

    def contains(self, z):
        return self.re_min <= z.real <= self.re_max and self.im_min <= z.imag <= self.im_max

    def as_list(self):
        return [self.re_min, self.re_max, self.im_min, self.im_max]


def dist_point_segment(w, p, q):
    d = q - p
    n = abs(d) ** 2
    if n == 0.0:
        return abs(w - p)
    t = ((w - p) * d.conjugate()).real / n
    t = min(1.0, max(0.0, t))
    return abs(w - (p + t * d))


def dist_point_ray(w, start_radius, direction):
    """Distance from ``w`` to ``{t * direction : t >= start_radius}``."""
    v = w * direction.conjugate()
    if v.real >= start_radius:
        return abs(v.imag)
    return abs(v - start_radius)


def segment_hits_disc(p, q, radius):
    """True if the segment ``[p, q]`` meets the closed disc ``|z| <= radius``."""
    return dist_point_segment(0j, p, q) <= radius


def segment_hits_ray(p, q, start_radius, direction, tol=1e-12):
    """True if ``[p, q]`` comes within ``tol`` of the ray ``t * direction, t >= start_radius``."""
    u = p * direction.conjugate()
    v = q * direction.conjugate()
    if min(dist_point_ray(p, start_radius, direction), dist_point_ray(q, start_radius, direction)) <= tol:
        return True
    if (u.imag > 0) == (v.imag > 0):
        return False
    s = u.imag / (u.imag - v.imag)
    crossing = u.real + s * (v.real - u.real)
    return crossing >= start_radius - tol


def arg_in_window(w, upper):
    """Argument of ``w`` taken in ``[upper - 2*pi, upper)``."""
    r = (cmath.phase(w) - upper) % (2 * math.pi)
    return upper - 2 * math.pi + r


def clip_segment(p, q, window):
    """Liang-Barsky clipping of ``[p, q]`` to ``window``; None if disjoint."""
    x0, y0, x1, y1 = p.real, p.imag, q.real, q.imag
    dx, dy = x1 - x0, y1 - y0
    t0, t1 = 0.0, 1.0
    for pk, qk in (
        (-dx, x0 - window.re_min),
        (dx, window.re_max - x0),
        (-dy, y0 - window.im_min),
        (dy, window.im_max - y0),
    ):
        if pk == 0.0:
            if qk < 0.0:
                return None
            continue
        r = qk / pk
        if pk < 0.0:
            if r > t1:
                return None
            t0 = max(t0, r)
        else:
            if r < t0:
                return None
            t1 = min(t1, r)
    return complex(x0 + t0 * dx, y0 + t0 * dy), complex(x0 + t1 * dx, y0 + t1 * dy)
