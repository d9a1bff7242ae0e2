"""Compact 9-scalar segment codes: four subsampled points plus the length."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InputError
from .imaging import round_half_away


@dataclass(frozen=True, eq=False)
class SegmentCode:
    coords: np.ndarray   # (8,) as x1, y1, ..., x4, y4
    length: int

    def __post_init__(self):
        c = np.array(self.coords, dtype=float).reshape(8)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        if int(self.length) < 2:
            raise InputError(f"segment length must be >= 2, got {self.length}")
        object.__setattr__(self, "length", int(self.length))

    @property
    def pairs(self) -> np.ndarray:
        return self.coords.reshape(4, 2)

    def reversed(self) -> "SegmentCode":
        return SegmentCode(self.pairs[::-1].reshape(8), self.length)

    def to_record(self) -> list[float]:
        return [*self.coords.tolist(), self.length]

    @classmethod
    def from_record(cls, rec) -> "SegmentCode":
        if len(rec) != 9:
            raise InputError(f"a code record has 9 scalars, got {len(rec)}")
        return cls(rec[:8], int(rec[8]))

    def __eq__(self, other):
        if not isinstance(other, SegmentCode):
            return NotImplemented
        return self.length == other.length and np.array_equal(self.coords, other.coords)

    __hash__ = None


def subsample_indices(length: int) -> np.ndarray:
    """0-based indices of the four equally spaced samples; first and last always included."""
    if length < 2:
        raise InputError(f"segment length must be >= 2, got {length}")
    one_based = round_half_away(1 + np.arange(4) * (length - 1) / 3)
    return one_based - 1


def subsample4(s) -> SegmentCode:
    pts = np.asarray(getattr(s, "points", s), dtype=float)
    idx = subsample_indices(len(pts))
    return SegmentCode(pts[idx].reshape(8), len(pts))


def d2(u: SegmentCode, v: SegmentCode) -> float:
    return float(np.sum((u.coords - v.coords) ** 2))


def d2_min_oriented(u: SegmentCode, v: SegmentCode) -> float:
    """Accumulated squared distance of the four point pairs, ``v`` taken in its better direction."""
    return min(d2(u, v), d2(u, v.reversed()))


def length_diff(u: SegmentCode, v: SegmentCode) -> float:
    return float(abs(u.length - v.length))


def code_matrix(codes) -> tuple[np.ndarray, np.ndarray]:
    """Stack codes into an (n, 8) coordinate array and an (n,) length array."""
    codes = list(codes)
    if not codes:
        return np.zeros((0, 8)), np.zeros(0, dtype=np.int64)
    return (np.vstack([c.coords for c in codes]),
            np.array([c.length for c in codes], dtype=np.int64))


def reverse_rows(coords: np.ndarray) -> np.ndarray:
    return coords.reshape(-1, 4, 2)[:, ::-1, :].reshape(-1, 8)


def pairwise_d2_min_oriented(a: np.ndarray, b: np.ndarray, b_reversed=None) -> np.ndarray:
    """All-pairs oriented D2 between code rows of ``a`` (k, 8) and ``b`` (K, 8)."""
    if b_reversed is None:
        b_reversed = reverse_rows(b)
    fwd = cdist(a, b, "sqeuclidean")
    rev = cdist(a, b_reversed, "sqeuclidean")
    return np.minimum(fwd, rev)
