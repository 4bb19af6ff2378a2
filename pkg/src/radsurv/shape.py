"""2-D shape descriptors of a binary tumour mask.

Conventions (pixel units):

* area is the pixel count;
* the boundary is the Moore-neighbour trace through pixel centres, and the
  perimeter weights axial steps 1 and diagonal steps sqrt(2);
* the convex hull is taken over boundary pixel *centres*, so a filled
  10x10 square has convex area 81 while its area is 100. Concavity is
  clamped to [0, 1] for that reason.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np
from scipy import ndimage

from .errors import ContourTooShort, EmptyMask

ELONGATION_CAP = 1e6
FOURIER_K = 10
_MINOR_FLOOR = 1e-9

# clockwise on screen (y grows downwards), starting west; entries are (dx, dy)
_MOORE = ((-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1))
_MOORE_INDEX = {d: i for i, d in enumerate(_MOORE)}


@dataclass(frozen=True)
class Contour:
    """Closed boundary as an (n, 2) array of (x, y) pixel centres."""

    points: np.ndarray
    single_pixel: bool = False

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class ShapeFeatures:
    area: float
    perimeter: float
    convex_area: float
    convex_perimeter: float
    concavity: float
    diameter: float
    major_axis: float
    minor_axis: float
    circularity: float
    elongation: float
    sphericity: float
    degenerate: bool = False

    @classmethod
    def names(cls):
        return [f.name for f in fields(cls) if f.name != "degenerate"]

    def as_array(self):
        return np.array([getattr(self, n) for n in self.names()], dtype=np.float64)


@dataclass(frozen=True)
class FourierDescriptor:
    magnitudes: np.ndarray


def largest_component(mask2d):
    """Largest 8-connected component; ties go to the component seen first in scan order."""
    mask2d = np.asarray(mask2d, dtype=bool)
    if not mask2d.any():
        raise EmptyMask("mask has no foreground pixels")
    labels, n = ndimage.label(mask2d, structure=np.ones((3, 3), dtype=bool))
    if n == 1:
        return mask2d.copy()
    # ndimage numbers components in raster order of their first pixel
    sizes = np.bincount(labels.ravel())[1:]
    return labels == int(np.argmax(sizes)) + 1


def trace_boundary(mask2d) -> Contour:
    """Moore-neighbour boundary trace, clockwise from the topmost-leftmost pixel.

    Stops when the first move out of the start pixel would be repeated, so
    pixels on one-pixel-wide parts appear once per visit.
    """
    mask2d = np.asarray(mask2d, dtype=bool)
    if not mask2d.any():
        raise EmptyMask("mask has no foreground pixels")
    padded = np.pad(mask2d, 1)
    ys, xs = np.nonzero(padded)
    start = (int(xs[0]), int(ys[0]))

    def step(cur, back):
        cx, cy = cur
        for i in range(1, 9):
            d = (back + i) % 8
            dx, dy = _MOORE[d]
            if padded[cy + dy, cx + dx]:
                px, py = _MOORE[(back + i - 1) % 8]
                return (cx + dx, cy + dy), _MOORE_INDEX[(px - dx, py - dy)]
        return None, back

    first, back = step(start, 0)
    if first is None:
        return Contour(np.array([[start[0] - 1, start[1] - 1]], dtype=np.float64), single_pixel=True)

    pts = [start]
    cur = first
    limit = 4 * int(mask2d.sum()) + 8
    while True:
        if cur == start and step(cur, back)[0] == first:
            break
        pts.append(cur)
        cur, back = step(cur, back)
        if len(pts) > limit:  # pragma: no cover - guards against a tracing bug
            raise RuntimeError("boundary trace did not close")
    return Contour(np.array(pts, dtype=np.float64) - 1.0)


def contour_length(points):
    """Closed polygon length; with unit pixel steps this gives 1 / sqrt(2) weights."""
    if len(points) < 2:
        return 0.0
    d = np.diff(np.vstack([points, points[:1]]), axis=0)
    return float(np.hypot(d[:, 0], d[:, 1]).sum())


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points):
    """Andrew's monotone chain; returns hull vertices counter-clockwise in (x, y)."""
    pts = sorted(set(map(tuple, np.asarray(points, dtype=np.float64).tolist())))
    if len(pts) <= 2:
        return np.array(pts, dtype=np.float64)
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1], dtype=np.float64)


def polygon_area(vertices):
    """Shoelace area (absolute)."""
    if len(vertices) < 3:
        return 0.0
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def max_pairwise_distance(points):
    pts = np.asarray(points, dtype=np.float64)
    if len(pts) < 2:
        return 0.0
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diff**2).sum(axis=-1).max()))


def moment_axes(mask2d):
    """Major and minor axis lengths of the ellipse with the same second moments."""
    ys, xs = np.nonzero(mask2d)
    x = xs - xs.mean()
    y = ys - ys.mean()
    a, b, c = np.mean(x * x), np.mean(x * y), np.mean(y * y)
    half = (a + c) / 2.0
    r = math.hypot((a - c) / 2.0, b)
    lam1, lam2 = half + r, max(half - r, 0.0)
    return 4.0 * math.sqrt(lam1), 4.0 * math.sqrt(lam2)


def shape_features(mask2d) -> ShapeFeatures:
    mask = largest_component(mask2d)
    area = float(mask.sum())
    contour = trace_boundary(mask)
    perimeter = contour_length(contour.points)
    hull = convex_hull(contour.points)
    convex_area = polygon_area(hull)
    convex_perimeter = contour_length(hull)
    concavity = 0.0 if convex_area == 0 else min(max((convex_area - area) / convex_area, 0.0), 1.0)
    major, minor = moment_axes(mask)
    degenerate = minor < _MINOR_FLOOR
    elongation = ELONGATION_CAP if degenerate else major / minor
    if perimeter > 0:
        circularity = 4.0 * math.pi * area / perimeter**2
        sphericity = 2.0 * math.sqrt(math.pi * area) / perimeter
    else:
        circularity = sphericity = 0.0
    return ShapeFeatures(
        area=area,
        perimeter=perimeter,
        convex_area=convex_area,
        convex_perimeter=convex_perimeter,
        concavity=concavity,
        diameter=max_pairwise_distance(hull),
        major_axis=major,
        minor_axis=minor,
        circularity=circularity,
        elongation=elongation,
        sphericity=sphericity,
        degenerate=degenerate,
    )


def fourier_descriptor(contour, K=FOURIER_K) -> FourierDescriptor:
    """Translation-, scale- and rotation-normalised Fourier magnitudes.

    The boundary x + iy is differenced before the DFT. With D the DFT of the
    differences, |F_k| = |D_k| / |exp(2 pi i k / n) - 1| for k != 0, so the
    result equals the plain DFT magnitudes with the DC term dropped, while
    integer translations of integer contours give bit-identical output.
    Returns |F_1| .. |F_K| divided by |F_1|.
    """
    pts = np.asarray(getattr(contour, "points", contour), dtype=np.float64)
    n = len(pts)
    if n < 2 * K + 1:
        raise ContourTooShort(f"contour has {n} points, need at least {2 * K + 1}")
    z = pts[:, 0] + 1j * pts[:, 1]
    dz = np.roll(z, -1) - z
    k = np.arange(1, K + 1)
    mags = np.abs(np.fft.fft(dz)[k]) / np.abs(np.exp(2j * np.pi * k / n) - 1.0)
    if not mags[0] > 0:
        raise ContourTooShort("contour has no fundamental component")
    return FourierDescriptor(mags / mags[0])
