"""Online-to-offline rendering and skeleton point extraction.

The chain used for every signature is::

    oversample_spline -> rasterize -> dilate -> skeletonize -> normalize_points

The first three steps give the offline bitmap (also used for projection
profiles and MOS cards); the last two give the pseudo-online point set that
segment extraction works on.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import InputError
from .ingest import OnlineSignature

DEFAULT_MAX_STEP = 0.5
DEFAULT_RADIUS = 2
RASTER_MARGIN = 4

EIGHT = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Boolean raster with an integer pixel origin.

    ``pixels[r, c]`` is the pixel at ``x = origin[0] + c``, ``y = origin[1] + r``.
    """

    pixels: np.ndarray
    origin: tuple[int, int] = (0, 0)

    def __post_init__(self):
        px = np.array(self.pixels, dtype=bool)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise InputError(f"image must be a non-empty 2-D array, got shape {px.shape}")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)
        object.__setattr__(self, "origin", (int(self.origin[0]), int(self.origin[1])))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def count(self) -> int:
        return int(self.pixels.sum())

    def coords(self) -> np.ndarray:
        """Foreground pixel coordinates as an (n, 2) int array of (x, y), sorted by (y, x)."""
        rows, cols = np.nonzero(self.pixels)
        return np.column_stack([cols + self.origin[0], rows + self.origin[1]]).astype(np.int64)

    def foreground(self) -> set[tuple[int, int]]:
        return {(int(x), int(y)) for x, y in self.coords()}

    @classmethod
    def from_coords(cls, coords, margin: int = 0) -> "BinaryImage":
        c = np.asarray(coords, dtype=np.int64).reshape(-1, 2)
        if len(c) == 0:
            raise InputError("cannot build an image from zero pixels")
        lo = c.min(axis=0) - margin
        hi = c.max(axis=0) + margin
        px = np.zeros((hi[1] - lo[1] + 1, hi[0] - lo[0] + 1), dtype=bool)
        px[c[:, 1] - lo[1], c[:, 0] - lo[0]] = True
        return cls(px, (int(lo[0]), int(lo[1])))

    def with_pixels(self, pixels) -> "BinaryImage":
        return BinaryImage(pixels, self.origin)

    def __eq__(self, other):
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return self.foreground() == other.foreground()

    __hash__ = None


# ---------------------------------------------------------------------------
# spline oversampling

def _dedupe(points: np.ndarray) -> np.ndarray:
    keep = np.ones(len(points), dtype=bool)
    keep[1:] = np.any(np.diff(points, axis=0) != 0, axis=1)
    return points[keep]


def _spline_pieces(points: np.ndarray):
    """Control points and chord-length knots for each Catmull-Rom piece."""
    first = 2 * points[0] - points[1]
    last = 2 * points[-1] - points[-2]
    ext = np.vstack([first, points, last])
    knots = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(ext, axis=0), axis=1))])
    n = len(points) - 1
    idx = np.arange(n)
    return ext[idx], ext[idx + 1], ext[idx + 2], ext[idx + 3], \
        knots[idx], knots[idx + 1], knots[idx + 2], knots[idx + 3]


def _hermite_eval(pieces, which: np.ndarray, s: np.ndarray) -> np.ndarray:
    p0, p1, p2, p3, t0, t1, t2, t3 = (a[which] for a in pieces)
    d10, d20, d21, d31, d32 = (t1 - t0), (t2 - t0), (t2 - t1), (t3 - t1), (t3 - t2)
    col = (lambda v: v[:, None])
    m1 = col(d21) * ((p1 - p0) / col(d10) - (p2 - p0) / col(d20) + (p2 - p1) / col(d21))
    m2 = col(d21) * ((p2 - p1) / col(d21) - (p3 - p1) / col(d31) + (p3 - p2) / col(d32))
    s = s[:, None]
    s2, s3 = s * s, s * s * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = s3 - 2 * s2 + s
    h01 = -2 * s3 + 3 * s2
    h11 = s3 - s2
    return h00 * p1 + h10 * m1 + h01 * p2 + h11 * m2


def catmull_rom(points, samples_per_piece) -> np.ndarray:
    """Evaluate the chord-length Catmull-Rom spline through ``points``.

    Piece ``k`` is sampled at ``s = j / n_k`` for ``j < n_k``; the last control
    point is appended so both endpoints are reproduced exactly.
    """
    pts = _dedupe(np.asarray(points, dtype=float))
    if len(pts) < 2:
        return pts.copy()
    pieces = _spline_pieces(pts)
    n = np.broadcast_to(np.asarray(samples_per_piece, dtype=np.int64), (len(pts) - 1,))
    which = np.repeat(np.arange(len(n)), n)
    starts = np.repeat(np.cumsum(n) - n, n)
    s = (np.arange(which.size) - starts) / np.repeat(n, n)
    out = _hermite_eval(pieces, which, s)
    return np.vstack([out, pts[-1:]])


def oversample_spline(sig: OnlineSignature, max_step: float = DEFAULT_MAX_STEP) -> OnlineSignature:
    """Densify ``sig`` along an interpolating spline until no step exceeds ``max_step``."""
    if not max_step > 0:
        raise InputError(f"max_step must be positive, got {max_step}")
    pts = np.asarray(sig.points, dtype=float)
    if not np.all(np.isfinite(pts)):
        raise InputError("signature coordinates must be finite")
    pts = _dedupe(pts)
    if len(pts) < 2:
        return sig.with_points(np.vstack([pts, pts]))
    chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    n = np.maximum(1, np.ceil(chords / max_step)).astype(np.int64)
    while True:
        out = catmull_rom(pts, n)
        steps = np.linalg.norm(np.diff(out, axis=0), axis=1)
        piece_of_step = np.repeat(np.arange(len(n)), n)
        worst = np.zeros(len(n))
        np.maximum.at(worst, piece_of_step, steps)
        bad = worst > max_step
        if not bad.any():
            return sig.with_points(out)
        n[bad] = np.ceil(n[bad] * np.maximum(1.25, worst[bad] / max_step)).astype(np.int64)


# ---------------------------------------------------------------------------
# raster stage

def round_half_away(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return (np.sign(v) * np.floor(np.abs(v) + 0.5)).astype(np.int64)


def rasterize(sig, margin: int = RASTER_MARGIN) -> BinaryImage:
    pts = sig.points if isinstance(sig, OnlineSignature) else np.asarray(sig, dtype=float)
    if len(pts) == 0:
        raise InputError("cannot rasterize an empty point sequence")
    return BinaryImage.from_coords(round_half_away(pts), margin=margin)


def disk(radius: int) -> np.ndarray:
    r = int(radius)
    yy, xx = np.mgrid[-r:r + 1, -r:r + 1]
    return xx * xx + yy * yy <= r * r


def dilate(img: BinaryImage, radius: int = DEFAULT_RADIUS) -> BinaryImage:
    """Binary dilation by a Euclidean disk; the canvas grows so nothing is clipped."""
    if radius < 0:
        raise InputError(f"radius must be >= 0, got {radius}")
    if radius == 0:
        return img
    padded = np.pad(img.pixels, radius)
    out = ndimage.binary_dilation(padded, structure=disk(radius))
    return BinaryImage(out, (img.origin[0] - radius, img.origin[1] - radius))


# ---------------------------------------------------------------------------
# Zhang-Suen thinning

def _neighbours(px: np.ndarray):
    """The eight neighbour planes N, NE, E, SE, S, SW, W, NW (row axis points south)."""
    p = np.pad(px, 1).astype(np.uint8)
    return (p[:-2, 1:-1], p[:-2, 2:], p[1:-1, 2:], p[2:, 2:],
            p[2:, 1:-1], p[2:, :-2], p[1:-1, :-2], p[:-2, :-2])


def _zs_candidates(px: np.ndarray, step: int) -> np.ndarray:
    nb = _neighbours(px)
    n, ne, e, se, s, sw, w, nw = nb
    b = sum(v.astype(np.int16) for v in nb)
    ring = nb + (n,)
    a = sum(((ring[k] == 0) & (ring[k + 1] == 1)).astype(np.int16) for k in range(8))
    cond = px & (b >= 2) & (b <= 6) & (a == 1)
    if step == 0:
        cond &= ((n & e & s) == 0) & ((e & s & w) == 0)
    else:
        cond &= ((n & e & w) == 0) & ((n & s & w) == 0)
    return cond


_OFFSETS = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))


def _ring(px: np.ndarray, r: int, c: int) -> list[int]:
    h, w = px.shape
    out = []
    for dr, dc in _OFFSETS:
        rr, cc = r + dr, c + dc
        out.append(int(0 <= rr < h and 0 <= cc < w and px[rr, cc]))
    return out


def _zs_ok(ring: list[int], step: int) -> bool:
    n, ne, e, se, s, sw, w, nw = ring
    b = sum(ring)
    a = sum(1 for k in range(8) if ring[k] == 0 and ring[(k + 1) % 8] == 1)
    if not (2 <= b <= 6 and a == 1):
        return False
    if step == 0:
        return n * e * s == 0 and e * s * w == 0
    return n * e * w == 0 and n * s * w == 0


def _ring_components(ring: list[int]) -> int:
    """Number of 8-connected groups among the foreground neighbours."""
    pos = [_OFFSETS[k] for k in range(8) if ring[k]]
    seen = set()
    groups = 0
    for start in pos:
        if start in seen:
            continue
        groups += 1
        stack = [start]
        seen.add(start)
        while stack:
            cr, cc = stack.pop()
            for q in pos:
                if q not in seen and max(abs(q[0] - cr), abs(q[1] - cc)) == 1:
                    seen.add(q)
                    stack.append(q)
    return groups


_RING_GROUPS = [_ring_components([(m >> k) & 1 for k in range(8)]) for m in range(256)]


def _component_count(px: np.ndarray) -> int:
    return ndimage.label(px, structure=EIGHT)[1]


def _zs_pass(px: np.ndarray) -> bool:
    changed = False
    for step in (0, 1):
        cand = _zs_candidates(px, step)
        if not cand.any():
            continue
        before = _component_count(px)
        trial = px & ~cand
        if _component_count(trial) == before:
            px[...] = trial
            changed = True
            continue
        # parallel removal broke topology (e.g. a 2x2 block): redo this
        # sub-iteration sequentially so each deletion sees the current image
        for r, c in zip(*np.nonzero(cand)):
            if _zs_ok(_ring(px, r, c), step):
                px[r, c] = False
                changed = True
    return changed


def _staircase_pass(px: np.ndarray) -> bool:
    """Drop corner pixels of 4-connected steps that thinning leaves behind.

    A pixel with two perpendicular 4-neighbours whose remaining neighbours
    stay 8-connected is redundant; removing it keeps topology and brings the
    8-neighbour degree of stroke pixels down to 2.
    """
    n, ne, e, se, s, sw, w, nw = _neighbours(px)
    cand = px & ((n & e) | (e & s) | (s & w) | (w & n)).astype(bool)
    changed = False
    for r, c in zip(*np.nonzero(cand)):
        ring = _ring(px, r, c)
        rn, _, re, _, rs, _, rw, _ = ring
        if not (rn and re or re and rs or rs and rw or rw and rn):
            continue
        mask = sum(bit << k for k, bit in enumerate(ring))
        if _RING_GROUPS[mask] == 1:
            px[r, c] = False
            changed = True
    return changed


def skeletonize(img: BinaryImage) -> BinaryImage:
    """Zhang-Suen thinning followed by staircase removal, iterated to a fixed point."""
    px = np.array(img.pixels, dtype=bool)
    while True:
        while _zs_pass(px):
            pass
        if not _staircase_pass(px):
            break
    return img.with_pixels(px)


def component_count(img: BinaryImage) -> int:
    return _component_count(img.pixels)


# ---------------------------------------------------------------------------
# normalization

@dataclass(frozen=True)
class NormalizedPointSet:
    points: np.ndarray
    center: tuple[float, float]
    scale: tuple[float, float]
    degenerate: tuple[bool, bool] = (False, False)

    def apply(self, points) -> np.ndarray:
        """Map raw coordinates through the same centering and scaling."""
        p = np.asarray(points, dtype=float)
        return (p - np.asarray(self.center)) / np.asarray(self.scale)


def normalize_points(points) -> NormalizedPointSet:
    """Center at the origin and scale each axis to unit population std.

    A zero-variance axis is only centered and is reported as degenerate.
    """
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(p) < 2:
        raise InputError(f"normalization needs at least 2 points, got {len(p)}")
    center = p.mean(axis=0)
    # second correction keeps the residual mean at round-off level for large offsets
    center = center + (p - center).mean(axis=0)
    centered = p - center
    std = centered.std(axis=0)
    degenerate = std == 0
    scale = np.where(degenerate, 1.0, std)
    out = centered / scale
    return NormalizedPointSet(out, (float(center[0]), float(center[1])),
                              (float(scale[0]), float(scale[1])),
                              (bool(degenerate[0]), bool(degenerate[1])))


def render_offline(sig: OnlineSignature, max_step: float = DEFAULT_MAX_STEP,
                   radius: int = DEFAULT_RADIUS) -> BinaryImage:
    """Online signature to ~4 px wide offline bitmap."""
    return dilate(rasterize(oversample_spline(sig, max_step)), radius)
