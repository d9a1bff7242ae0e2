"""Approximate Method II: vertical projection profiles compared by DTW.

The profile of a bitmap is its per-column foreground count over the
foreground bounding box, scaled to unit sum. Profiles are compared with
plain Itakura DTW; the stability weighting of the original method is not
reproduced, so scores from this module are an approximation of it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dtw
from .errors import EnrollmentError, InputError
from .imaging import BinaryImage
from .scoring import _floored

LABEL = "approximate Method II"


@dataclass(frozen=True)
class ProjectionProfile:
    values: np.ndarray

    def __len__(self):
        return len(self.values)


def vertical_profile(img: BinaryImage) -> ProjectionProfile:
    counts = img.pixels.sum(axis=0)
    cols = np.flatnonzero(counts)
    if cols.size == 0:
        raise InputError("cannot profile an image without foreground")
    raw = counts[cols[0]:cols[-1] + 1].astype(float)
    return ProjectionProfile(raw / raw.sum())


def _profile(x) -> np.ndarray:
    if isinstance(x, BinaryImage):
        x = vertical_profile(x)
    vals = np.asarray(getattr(x, "values", x), dtype=float)
    if len(vals) < 2:
        # DTW needs two samples; a one-column signature is repeated
        vals = np.repeat(vals, 2)
    return vals


def profile_cost(p, q) -> dtw.WarpResult:
    """Itakura DTW between profiles, unconstrained fallback when widths differ too much."""
    return dtw.with_fallback(_profile(p), _profile(q))


class ProjectionEnrollment:
    def __init__(self, refs):
        self.profiles = [_profile(r) for r in refs]
        if len(self.profiles) < 2:
            raise EnrollmentError(f"projection scoring needs at least 2 references, got {len(self.profiles)}")
        n = len(self.profiles)
        self.pair = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                # Itakura mask is symmetric in its arguments
                self.pair[i, j] = self.pair[j, i] = profile_cost(self.profiles[i], self.profiles[j]).cost
        loo = [self.pair[i, np.arange(n) != i].mean() for i in range(n)]
        self.c0 = _floored(float(np.mean(loo)), "projection")

    def raw(self, test) -> tuple[float, bool]:
        p = _profile(test)
        results = [profile_cost(p, r) for r in self.profiles]
        return float(np.mean([r.cost for r in results])), any(r.fallback for r in results)

    def score(self, test) -> float:
        return self.raw(test)[0] / self.c0


def projection_score(test_img, ref_imgs) -> float:
    return ProjectionEnrollment(ref_imgs).score(test_img)
