"""
Escape-time pictures with ray overlays.

The raster is binary PPM (P6, 8-bit RGB).  Pixel ``(row, col)`` samples the
centre of its cell, row 0 at the top (largest imaginary part).  Work is cut
into fixed blocks of rows, so the bytes do not depend on the thread count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._geometry import Window, clip_segment
from ._parallel import parallel_map
from .errors import ResolutionCapExceeded
from .periodic_points import Classification

MAX_SIDE = 4096
ROW_BLOCK = 16

RAY_COLOR = (230, 30, 30)
MARK_COLORS = {
    Classification.REPELLING: (40, 200, 60),
    Classification.PARABOLIC_MULTIPLIER_1: (40, 120, 255),
    Classification.PARABOLIC_ROOT_OF_UNITY: (40, 120, 255),
    Classification.ATTRACTING: (250, 210, 40),
}
DEFAULT_MARK = (255, 255, 255)
INTERIOR = (0, 0, 0)


@dataclass
class RenderSpec:
    window: Window
    width: int
    height: int
    max_iter: int = 60
    escape_radius: float = 50.0
    overlays: list = field(default_factory=list)
    marks: list = field(default_factory=list)
    max_side: int = MAX_SIDE

    def __post_init__(self):
        if not isinstance(self.window, Window):
            self.window = Window.from_sequence(self.window)
        if self.window.degenerate:
            raise ValueError("render window is degenerate")
        if self.width < 1 or self.height < 1:
            raise ValueError("resolution must be positive")
        if self.width > self.max_side or self.height > self.max_side:
            raise ResolutionCapExceeded(
                f"{self.width}x{self.height} exceeds the cap {self.max_side}x{self.max_side}"
            )
        if self.max_iter < 1 or not self.escape_radius > 0:
            raise ValueError("need max_iter >= 1 and escape_radius > 0")


def pixel_grid(window, width, height, rows=None):
    """Complex sample points, shape ``(len(rows), width)``."""
    rows = np.arange(height) if rows is None else np.asarray(rows)
    xs = window.re_min + (window.re_max - window.re_min) * (np.arange(width) + 0.5) / width
    ys = window.im_max - (window.im_max - window.im_min) * (rows + 0.5) / height
    return xs[np.newaxis, :] + 1j * ys[:, np.newaxis]


def escape_counts(m, z, max_iter, escape_radius):
    """Iterations until ``|f^n(z)| > escape_radius``; ``max_iter`` if never."""
    z = np.array(z, dtype=complex)
    counts = np.full(z.shape, max_iter, dtype=np.int64)
    active = np.abs(z) <= escape_radius
    counts[~active] = 0
    for n in range(1, max_iter + 1):
        if not active.any():
            break
        w = m.eval_array(z[active])
        z[active] = w
        out = ~(np.abs(w) <= escape_radius)  # inf and nan count as escaped
        idx = np.flatnonzero(active)[out]
        counts.flat[idx] = n
        active.flat[idx] = False
    return counts


def palette(max_iter):
    """``(max_iter + 1, 3)`` uint8 table; the last entry is the interior colour."""
    # log scale: most pixels escape within a few steps
    t = np.log1p(np.arange(max_iter + 1)) / np.log1p(max(max_iter, 1))
    s = np.sqrt(t)
    table = np.stack(
        [255 * s, 255 * s**2 * 0.85, 90 + 140 * (1 - s)], axis=1
    )
    table = np.clip(np.rint(table), 0, 255).astype(np.uint8)
    table[-1] = INTERIOR
    return table


def escape_image(m, spec, workers=None):
    blocks = [range(r, min(r + ROW_BLOCK, spec.height)) for r in range(0, spec.height, ROW_BLOCK)]

    def block(rows):
        z = pixel_grid(spec.window, spec.width, spec.height, list(rows))
        return escape_counts(m, z, spec.max_iter, spec.escape_radius)

    counts = np.concatenate(parallel_map(block, blocks, workers), axis=0)
    return palette(spec.max_iter)[counts]


def to_pixel(z, window, width, height):
    """Nearest pixel ``(row, col)`` of ``z`` (may lie outside the image)."""
    col = (z.real - window.re_min) / (window.re_max - window.re_min) * width - 0.5
    row = (window.im_max - z.imag) / (window.im_max - window.im_min) * height - 0.5
    return int(np.floor(row + 0.5)), int(np.floor(col + 0.5))


def bresenham(r0, c0, r1, c1):
    """Integer points of the digital segment from ``(r0, c0)`` to ``(r1, c1)``."""
    dr, dc = abs(r1 - r0), abs(c1 - c0)
    sr, sc = (1 if r1 >= r0 else -1), (1 if c1 >= c0 else -1)
    err = dc - dr
    pts = []
    while True:
        pts.append((r0, c0))
        if r0 == r1 and c0 == c1:
            return pts
        e2 = 2 * err
        if e2 > -dr:
            err -= dr
            c0 += sc
        if e2 < dc:
            err += dc
            r0 += sr


def polyline_pixels(vertices, window, width, height):
    """Pixels covered by the parts of a polyline inside ``window``."""
    pix = []
    for p, q in zip(vertices, vertices[1:]):
        seg = clip_segment(complex(p), complex(q), window)
        if seg is None:
            continue
        a = to_pixel(seg[0], window, width, height)
        b = to_pixel(seg[1], window, width, height)
        pix.extend(
            (r, c) for r, c in bresenham(*a, *b) if 0 <= r < height and 0 <= c < width
        )
    return pix


def _vertices(overlay):
    return list(getattr(overlay, "vertices", overlay))


def draw_overlays(img, spec):
    h, w = img.shape[:2]
    for ray in spec.overlays:
        for r, c in polyline_pixels(_vertices(ray), spec.window, w, h):
            img[r, c] = RAY_COLOR
    for pt in spec.marks:
        z = complex(getattr(pt, "point", pt))
        if not spec.window.contains(z):
            continue
        color = MARK_COLORS.get(getattr(pt, "classification", None), DEFAULT_MARK)
        r0, c0 = to_pixel(z, spec.window, w, h)
        for d in range(-2, 3):
            for r, c in ((r0 + d, c0), (r0, c0 + d)):
                if 0 <= r < h and 0 <= c < w:
                    img[r, c] = color
    return img


def render(m, spec, path=None, svg_path=None, workers=None):
    """Escape-time raster of ``m`` with overlays; returns the ``(H, W, 3)`` array.

    Writes a PPM to ``path`` and an SVG of the overlays alone to
    ``svg_path`` when given.
    """
    img = draw_overlays(escape_image(m, spec, workers), spec)
    if path is not None:
        write_ppm(path, img)
    if svg_path is not None:
        with open(svg_path, "w") as fh:
            fh.write(overlay_svg(spec))
    return img


def ppm_bytes(img):
    img = np.ascontiguousarray(img, dtype=np.uint8)
    h, w = img.shape[:2]
    return b"P6\n%d %d\n255\n" % (w, h) + img.tobytes()


def write_ppm(path, img):
    with open(path, "wb") as fh:
        fh.write(ppm_bytes(img))


def read_ppm(path):
    """Inverse of :func:`write_ppm` (P6 files written by this module only)."""
    data = open(path, "rb").read()
    magic, w, h, maxval, body = data.split(maxsplit=4)
    if magic != b"P6" or maxval != b"255":
        raise ValueError("not an 8-bit P6 file")
    return np.frombuffer(body, dtype=np.uint8).reshape(int(h), int(w), 3)


def overlay_svg(spec):
    """Rays and marks as SVG in pixel coordinates (no raster)."""
    win, w, h = spec.window, spec.width, spec.height
    sx = w / (win.re_max - win.re_min)
    sy = h / (win.im_max - win.im_min)

    def xy(z):
        return f"{(z.real - win.re_min) * sx:.3f},{(win.im_max - z.imag) * sy:.3f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="none" stroke="#888"/>',
    ]
    for ray in spec.overlays:
        pieces, current = [], []
        verts = _vertices(ray)
        for p, q in zip(verts, verts[1:]):
            seg = clip_segment(complex(p), complex(q), win)
            if seg is None:
                if current:
                    pieces.append(current)
                current = []
                continue
            if not current:
                current = [seg[0]]
            current.append(seg[1])
        if current:
            pieces.append(current)
        for piece in pieces:
            pts = " ".join(xy(z) for z in piece)
            out.append(f'<polyline points="{pts}" fill="none" stroke="rgb{RAY_COLOR}" stroke-width="1"/>')
    for pt in spec.marks:
        z = complex(getattr(pt, "point", pt))
        if win.contains(z):
            color = MARK_COLORS.get(getattr(pt, "classification", None), DEFAULT_MARK)
            cx, cy = xy(z).split(",")
            out.append(f'<circle cx="{cx}" cy="{cy}" r="3" fill="rgb{color}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
