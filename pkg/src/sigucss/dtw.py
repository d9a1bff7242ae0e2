"""Dynamic time warping under the Itakura parallelogram.

Local cost is the squared Euclidean distance between samples. Paths start at
the first pair, end at the last pair and use the steps (1,0), (0,1), (1,1).
A cell ``(i, j)`` (0-based, sequences of length ``n`` and ``m``) is admissible
when it lies inside the parallelogram with slopes 1/2 and 2 through both
corners::

    i <= 2 j,  j <= 2 i,  (n-1-i) <= 2 (m-1-j),  (m-1-j) <= 2 (n-1-i)

There is no normalization by path length.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import InputError

INF = np.inf


@dataclass(frozen=True)
class WarpResult:
    cost: float
    feasible: bool
    fallback: bool = False  # cost comes from unconstrained DTW


@njit(cache=True)
def _dtw(a, b, reverse_b, constrained):
    n = a.shape[0]
    m = b.shape[0]
    dim = a.shape[1]
    last_i = n - 1
    last_j = m - 1
    acc = np.full((n, m), np.inf)
    for i in range(n):
        for j in range(m):
            if constrained:
                if i > 2 * j or j > 2 * i:
                    continue
                if last_i - i > 2 * (last_j - j) or last_j - j > 2 * (last_i - i):
                    continue
            jj = last_j - j if reverse_b else j
            c = 0.0
            for k in range(dim):
                d = a[i, k] - b[jj, k]
                c += d * d
            if i == 0 and j == 0:
                acc[i, j] = c
                continue
            best = np.inf
            if i > 0 and acc[i - 1, j] < best:
                best = acc[i - 1, j]
            if j > 0 and acc[i, j - 1] < best:
                best = acc[i, j - 1]
            if i > 0 and j > 0 and acc[i - 1, j - 1] < best:
                best = acc[i - 1, j - 1]
            if best < np.inf:
                acc[i, j] = c + best
    return acc[last_i, last_j]


@njit(cache=True)
def _min_oriented_many(a, flat, offsets):
    """Oriented-min DTW of ``a`` against every sequence packed in ``flat``."""
    k = offsets.shape[0] - 1
    costs = np.empty(k)
    fallback = np.zeros(k, dtype=np.bool_)
    for e in range(k):
        b = flat[offsets[e]:offsets[e + 1]]
        c = min(_dtw(a, b, False, True), _dtw(a, b, True, True))
        if c == np.inf:
            c = min(_dtw(a, b, False, False), _dtw(a, b, True, False))
            fallback[e] = True
        costs[e] = c
    return costs, fallback


def _as_seq(x, name) -> np.ndarray:
    arr = np.asarray(getattr(x, "points", x), dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if len(arr) < 2:
        raise InputError(f"{name} needs at least 2 samples, got {len(arr)}")
    return np.ascontiguousarray(arr)


def _result(cost: float) -> WarpResult:
    return WarpResult(float(cost), bool(np.isfinite(cost)))


def dtw_itakura(a, b) -> WarpResult:
    """Itakura-constrained DTW between two point sequences (or segments)."""
    return _result(_dtw(_as_seq(a, "a"), _as_seq(b, "b"), False, True))


def dtw_unconstrained(a, b) -> WarpResult:
    return _result(_dtw(_as_seq(a, "a"), _as_seq(b, "b"), False, False))


def dtw_profile(p, q) -> WarpResult:
    """Itakura DTW between two 1-D profiles."""
    p = np.asarray(p, dtype=float).reshape(-1)
    q = np.asarray(q, dtype=float).reshape(-1)
    return dtw_itakura(p, q)


def with_fallback(a, b) -> WarpResult:
    """Itakura DTW, or unconstrained DTW flagged as fallback when no path fits."""
    a, b = _as_seq(a, "a"), _as_seq(b, "b")
    c = _dtw(a, b, False, True)
    if np.isfinite(c):
        return WarpResult(float(c), True)
    return WarpResult(float(_dtw(a, b, False, False)), False, True)


def dtw_min_oriented(s, t) -> WarpResult:
    """DTW of ``s`` against ``t`` or reversed ``t``, whichever is cheaper.

    Both orientations share the same lengths, so they are feasible together or
    not at all; in the latter case the unconstrained cost is returned with
    ``fallback`` set.
    """
    a, b = _as_seq(s, "s"), _as_seq(t, "t")
    c = min(_dtw(a, b, False, True), _dtw(a, b, True, True))
    if np.isfinite(c):
        return WarpResult(float(c), True)
    c = min(_dtw(a, b, False, False), _dtw(a, b, True, False))
    return WarpResult(float(c), False, True)


def pack(seqs) -> tuple[np.ndarray, np.ndarray]:
    arrays = [_as_seq(s, "sequence") for s in seqs]
    offsets = np.zeros(len(arrays) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(x) for x in arrays])
    flat = np.ascontiguousarray(np.vstack(arrays)) if arrays else np.zeros((0, 2))
    return flat, offsets


def min_oriented_many(s, packed) -> tuple[np.ndarray, np.ndarray]:
    """Vector of :func:`dtw_min_oriented` costs of ``s`` against packed sequences."""
    flat, offsets = packed
    return _min_oriented_many(_as_seq(s, "s"), flat, offsets)
