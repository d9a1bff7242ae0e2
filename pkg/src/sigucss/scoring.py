"""Signature-level scores against an enrolled bag of reference segments.

Every test segment is matched to its closest entry in the bag (all segments
of all references merged). The per-segment costs are averaged and divided by
the leave-one-out self cost of the references, so a signature that looks
like the references scores around 1 and lower is more genuine.

Two matchers are available:

``dtw``
    oriented Itakura DTW divided by the test segment length,
``encoded``
    oriented squared distance between 4-point codes divided by 4.

The length score reuses the ``encoded`` association and compares segment
lengths instead of shapes.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from scipy.spatial.distance import cdist

from . import dtw
from .encoding import SegmentCode, code_matrix, reverse_rows
from .errors import EnrollmentError, ScoringError
from .ucss import Ucss

DTW = "dtw"
ENCODED = "encoded"
MODES = (DTW, ENCODED)
C0_FLOOR = 1e-9
DEFAULT_N_REFS = 5


def _as_code(p) -> SegmentCode:
    return p if isinstance(p, SegmentCode) else p.code


def _content_key(segs) -> bytes:
    parts = []
    for s in segs:
        if isinstance(s, Ucss):
            parts.append(s.content_bytes)
        else:
            parts.append(np.append(s.coords, s.length).astype(">f8").tobytes())
    return b"|".join(parts)


class SegmentBag:
    """Reference segments merged into one bag, each tagged with its reference.

    References are put in a canonical content order first so that the bag,
    and every argmin tie-break over it, does not depend on input order.
    """

    def __init__(self, refs, mode: str = ENCODED):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        refs = [list(r) for r in refs]
        for i, r in enumerate(refs):
            if not r:
                raise EnrollmentError(f"reference {i} has no segments")
        refs.sort(key=_content_key)
        if mode == ENCODED:
            refs = [[_as_code(p) for p in r] for r in refs]
        else:
            for r in refs:
                for p in r:
                    if not isinstance(p, Ucss):
                        raise EnrollmentError("dtw mode needs full segments, not codes")
        self.mode = mode
        self.refs = refs
        self.n_refs = len(refs)
        self._select(np.ones(sum(len(r) for r in refs), dtype=bool))

    def _select(self, keep: np.ndarray) -> None:
        self._loo = None
        entries = [p for r in self.refs for p in r]
        ref_of = np.repeat(np.arange(self.n_refs), [len(r) for r in self.refs])
        seg_of = np.concatenate([np.arange(len(r)) for r in self.refs]) if self.refs else np.zeros(0, int)
        self.entries = [p for p, k in zip(entries, keep) if k]
        self.ref_of = ref_of[keep]
        self.seg_of = seg_of[keep]
        if self.mode == ENCODED:
            if not hasattr(self, "_all_coords"):
                self._all_coords, self._all_lengths = code_matrix(entries)
            self.coords = self._all_coords[keep]
            self.rev_coords = reverse_rows(self.coords)
            self._both = np.vstack([self.coords, self.rev_coords])
            self.lengths = self._all_lengths[keep]
        else:
            self.lengths = np.array([p.length for p in self.entries], dtype=np.int64)

    def __len__(self):
        return len(self.entries)

    @cached_property
    def packed(self):
        return dtw.pack(self.entries)

    def d2_to(self, coords: np.ndarray) -> np.ndarray:
        """Oriented D2 from each row of ``coords`` to every entry (encoded bags)."""
        both = cdist(coords, self._both, "sqeuclidean")
        k = len(self.entries)
        return np.minimum(both[:, :k], both[:, k:])

    def leave_one_out(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-reference mean (D2/4 cost, length diff) against the other references.

        Same result as matching each reference against ``exclude(i)``, from a
        single entry-by-entry distance matrix.
        """
        if self._loo is not None:
            return self._loo
        dist = self.d2_to(self.coords)
        shape = np.empty(self.n_refs)
        length = np.empty(self.n_refs)
        for i in range(self.n_refs):
            rows = self.ref_of == i
            sub = dist[rows][:, ~rows]
            best = np.argmin(sub, axis=1)
            shape[i] = (sub[np.arange(len(best)), best] / 4.0).mean()
            length[i] = np.abs(self.lengths[rows] - self.lengths[~rows][best]).mean()
        self._loo = (shape, length)
        return self._loo

    def exclude(self, ref: int) -> "SegmentBag":
        """Bag without the segments of reference ``ref`` (canonical index)."""
        out = object.__new__(SegmentBag)
        out.__dict__.update({k: v for k, v in self.__dict__.items() if k != "packed"})
        full_ref_of = np.repeat(np.arange(self.n_refs), [len(r) for r in self.refs])
        out._select(full_ref_of != ref)
        return out

    def entry_id(self, k: int) -> tuple[int, int]:
        return int(self.ref_of[k]), int(self.seg_of[k])


def build_bag(refs, mode: str = ENCODED) -> SegmentBag:
    if len(refs) < 2:
        raise EnrollmentError(f"leave-one-out normalization needs at least 2 references, got {len(refs)}")
    return SegmentBag(refs, mode)


def _check_test(test_segs):
    test_segs = list(test_segs)
    if not test_segs:
        raise ScoringError("test signature has no segments")
    return test_segs


def match_encoded(test_segs, bag: SegmentBag) -> tuple[np.ndarray, np.ndarray]:
    """Per-test-segment (D2/4 cost, matched entry index) against an encoded bag."""
    if len(bag) == 0:
        raise ScoringError("empty bag")
    coords = np.array([_as_code(s).coords for s in test_segs])
    dist = bag.d2_to(coords)
    best = np.argmin(dist, axis=1)  # first minimum = smallest entry id
    return dist[np.arange(len(best)), best] / 4.0, best


def match_dtw(test_segs, bag: SegmentBag) -> tuple[np.ndarray, np.ndarray]:
    """Per-test-segment (min DTW / L_test, matched entry index) against a DTW bag."""
    if len(bag) == 0:
        raise ScoringError("empty bag")
    costs = np.empty(len(test_segs))
    best = np.empty(len(test_segs), dtype=np.int64)
    for k, s in enumerate(test_segs):
        c, _ = dtw.min_oriented_many(s, bag.packed)
        best[k] = int(np.argmin(c))
        costs[k] = c[best[k]] / s.length
    return costs, best


def _match(test_segs, bag):
    return match_encoded(test_segs, bag) if bag.mode == ENCODED else match_dtw(test_segs, bag)


def segment_cost(test_seg, bag: SegmentBag) -> tuple[float, tuple[int, int]]:
    """Cost of one test segment and the (reference, segment) id it matched."""
    costs, best = _match([test_seg], bag)
    return float(costs[0]), bag.entry_id(int(best[0]))


def mean_cost(test_segs, bag: SegmentBag) -> float:
    costs, _ = _match(_check_test(test_segs), bag)
    return float(costs.mean())


def mean_length_cost(test_segs, bag: SegmentBag) -> float:
    """Mean |L_test - L_matched| with matching by code shape."""
    test_segs = _check_test(test_segs)
    _, best = match_encoded(test_segs, bag)
    lengths = np.array([_as_code(s).length for s in test_segs])
    return float(np.abs(lengths - bag.lengths[best]).mean())


def _floored(value: float, what: str) -> float:
    if value < C0_FLOOR:
        warnings.warn(f"{what} normalization {value:.3g} below {C0_FLOOR}; using the floor",
                      RuntimeWarning, stacklevel=3)
        return C0_FLOOR
    return value


def _leave_one_out(bag: SegmentBag, cost_fn) -> float:
    return float(np.mean([cost_fn(bag.refs[i], bag.exclude(i)) for i in range(bag.n_refs)]))


def c0_leave_one_out(refs, mode: str = ENCODED) -> float:
    bag = refs if isinstance(refs, SegmentBag) else build_bag(refs, mode)
    if bag.mode == ENCODED:
        return _floored(float(bag.leave_one_out()[0].mean()), "shape")
    return _floored(_leave_one_out(bag, mean_cost), "shape")


def c0_length(refs) -> float:
    bag = refs if isinstance(refs, SegmentBag) else build_bag(refs, ENCODED)
    return _floored(float(bag.leave_one_out()[1].mean()), "length")


@dataclass
class SignatureScore:
    j_shape: float | None = None
    j_length: float | None = None
    j_fused: float | None = None
    j_baseline: float | None = None
    j_method2: float | None = None
    per_segment: list = field(default_factory=list)


class Enrollment:
    """Reference segments with lazily computed bags and normalizers.

    ``refs`` is a list (one per reference signature) of segment lists; entries
    may be :class:`Ucss` or, for encoded-only cards, :class:`SegmentCode`.
    """

    def __init__(self, refs):
        refs = [list(r) for r in refs]
        if len(refs) < 2:
            raise EnrollmentError(f"leave-one-out normalization needs at least 2 references, got {len(refs)}")
        for i, r in enumerate(refs):
            if not r:
                raise EnrollmentError(f"reference {i} has no segments")
        self.refs = refs

    @property
    def n_refs(self) -> int:
        return len(self.refs)

    @property
    def has_segments(self) -> bool:
        return all(isinstance(p, Ucss) for r in self.refs for p in r)

    @cached_property
    def encoded_bag(self) -> SegmentBag:
        return SegmentBag(self.refs, ENCODED)

    @cached_property
    def dtw_bag(self) -> SegmentBag:
        if not self.has_segments:
            raise EnrollmentError("enrollment holds codes only; the DTW method needs full segments")
        return SegmentBag(self.refs, DTW)

    @cached_property
    def c0_shape(self) -> float:
        return c0_leave_one_out(self.encoded_bag)

    @cached_property
    def c0_dtw(self) -> float:
        return c0_leave_one_out(self.dtw_bag)

    @cached_property
    def c0_length(self) -> float:
        return c0_length(self.encoded_bag)

    def bag(self, mode: str) -> SegmentBag:
        return self.encoded_bag if mode == ENCODED else self.dtw_bag

    def c0(self, mode: str) -> float:
        return self.c0_shape if mode == ENCODED else self.c0_dtw

    def score_j(self, test_segs, mode: str = ENCODED) -> float:
        return mean_cost(test_segs, self.bag(mode)) / self.c0(mode)

    def score_length(self, test_segs) -> float:
        return mean_length_cost(test_segs, self.encoded_bag) / self.c0_length

    def score_fused(self, test_segs) -> float:
        return 0.5 * (self.score_j(test_segs, ENCODED) + self.score_length(test_segs))

    def score(self, test_segs, baseline: bool = False) -> SignatureScore:
        test_segs = _check_test(test_segs)
        bag = self.encoded_bag
        costs, best = match_encoded(test_segs, bag)
        lengths = np.array([_as_code(s).length for s in test_segs])
        j_shape = float(costs.mean()) / self.c0_shape
        j_length = float(np.abs(lengths - bag.lengths[best]).mean()) / self.c0_length
        out = SignatureScore(j_shape=j_shape, j_length=j_length,
                             j_fused=0.5 * (j_shape + j_length))
        out.per_segment = [(k, bag.entry_id(int(b)), float(c)) for k, (b, c) in enumerate(zip(best, costs))]
        if baseline:
            out.j_baseline = self.score_j(test_segs, DTW)
        return out


def score_j(test_segs, refs, mode: str = ENCODED) -> float:
    return Enrollment(refs).score_j(test_segs, mode)


def score_length(test_segs, refs) -> float:
    return Enrollment(refs).score_length(test_segs)


def score_fused(test_segs, refs) -> float:
    return Enrollment(refs).score_fused(test_segs)
