import itertools
import warnings

import numpy as np
import pytest

from sigucss.encoding import SegmentCode
from sigucss.errors import EnrollmentError, ScoringError
from sigucss.evaluation import SignerModel
from sigucss.imaging import normalize_points
from sigucss.scoring import (C0_FLOOR, DTW, ENCODED, Enrollment, build_bag, c0_leave_one_out,
                             mean_cost, mean_length_cost, segment_cost, score_fused, score_j, score_length)
from sigucss.ucss import Ucss, build_graph, reverse, segment_vertex_paths

from conftest import random_skeleton


def rand_seg(rng, n=None):
    n = int(rng.integers(2, 15)) if n is None else n
    return Ucss(np.cumsum(rng.normal(size=(n, 2)), axis=0) * 0.1)


def rand_refs(rng, counts):
    return [[rand_seg(rng) for _ in range(k)] for k in counts]


def const_code(x, length=10):
    return SegmentCode([x, 0] * 4, length)


# -- bag ---------------------------------------------------------------------

def test_bag_cardinality_and_exclusion():
    rng = np.random.default_rng(0)
    refs = rand_refs(rng, [12, 10, 11, 9, 13])
    bag = build_bag(refs)
    assert len(bag) == 55
    # canonical order may move references; find where the 10-segment one went
    k = [len(r) for r in bag.refs].index(10)
    assert len(bag.exclude(k)) == 45
    assert set(bag.exclude(k).ref_of.tolist()) == set(range(5)) - {k}


def test_bag_needs_two_refs():
    with pytest.raises(EnrollmentError):
        build_bag([[rand_seg(np.random.default_rng(1))]])
    with pytest.raises(EnrollmentError):
        Enrollment([[rand_seg(np.random.default_rng(1))]])


def test_bag_rejects_empty_reference():
    with pytest.raises(EnrollmentError):
        build_bag([[rand_seg(np.random.default_rng(1))], []])


def test_dtw_bag_needs_segments():
    with pytest.raises(EnrollmentError):
        build_bag([[const_code(0)], [const_code(1)]], DTW)


# -- segment cost ------------------------------------------------------------

def test_identical_entry_zero_cost():
    rng = np.random.default_rng(2)
    refs = rand_refs(rng, [4, 5])
    target = refs[1][3]
    for mode in (ENCODED, DTW):
        bag = build_bag(refs, mode)
        cost, (r, s) = segment_cost(target, bag)
        assert cost == 0
        hit = bag.refs[r][s]
        assert hit == (target if mode == DTW else target.code)


def test_encoded_cost_quarter_and_first_match():
    bag = build_bag([[const_code(1.0)], [const_code(np.sqrt(2.0)), const_code(-1.0)]])
    cost, entry = segment_cost(const_code(0.0), bag)
    assert cost == pytest.approx(1.0)
    # two entries tie at distance 4; the smallest canonical entry id wins
    k = bag.entries.index(next(e for e in bag.entries if e.coords[0] in (1.0, -1.0)))
    assert entry == bag.entry_id(k)


def test_dtw_cost_divided_by_test_length():
    test = Ucss([(0, 0), (1, 0), (2, 0)])
    ref = Ucss([(0, 1), (1, 1), (2, 1)])      # raw oriented DTW = 3
    far = Ucss([(0, 5), (1, 5), (2, 5)])
    bag = build_bag([[ref], [far]], DTW)
    cost, _ = segment_cost(test, bag)
    assert cost == pytest.approx(1.0)
    test2 = Ucss([(0, 0), (1, 0), (2, 0)])
    ref2 = Ucss([(0, np.sqrt(2)), (1, np.sqrt(2)), (2, np.sqrt(2))])   # raw 6
    assert segment_cost(test2, build_bag([[ref2], [far]], DTW))[0] == pytest.approx(2.0)


def test_mean_cost_examples():
    bag = build_bag([[const_code(0.0)], [const_code(0.0)]])
    assert mean_cost([const_code(0.0)], bag) == 0
    # per-segment costs 1 and 3 -> 2
    assert mean_cost([const_code(1.0), const_code(np.sqrt(3.0))], bag) == pytest.approx(2.0)
    assert mean_cost([const_code(1.0)], bag) == pytest.approx(1.0)
    with pytest.raises(ScoringError):
        mean_cost([], bag)


# -- normalization -----------------------------------------------------------

def test_identical_refs_floor_warning():
    s = [Ucss([(0, 0), (1, 0), (2, 1)])]
    with pytest.warns(RuntimeWarning, match="floor"):
        c0 = c0_leave_one_out([s] * 5)
    assert c0 == C0_FLOOR


def test_c0_two_refs_mean():
    # ref A -> B costs 0.4, B -> A costs 0.6 using two segments in B
    a = [const_code(0.0)]
    b = [const_code(np.sqrt(0.4)), const_code(-np.sqrt(0.8))]
    # A vs {B}: min(0.4, 0.8) = 0.4; B vs {A}: mean(0.4, 0.8) = 0.6
    assert c0_leave_one_out([a, b]) == pytest.approx(0.5)


def test_j_ratio_and_zero():
    # a constant code at x costs x**2 against the origin code
    e = Enrollment([[const_code(0.0)], [const_code(np.sqrt(0.1))]])
    assert e.c0_shape == pytest.approx(0.1)
    assert e.score_j([const_code(0.0)]) == 0
    assert e.score_j([const_code(-np.sqrt(0.3))]) == pytest.approx(3.0)


def test_loo_average_is_one():
    rng = np.random.default_rng(3)
    refs = rand_refs(rng, [6, 8, 5, 7, 9])
    for mode in (ENCODED, DTW):
        e = Enrollment(refs)
        bag = e.bag(mode)
        js = [mean_cost(bag.refs[i], bag.exclude(i)) / e.c0(mode) for i in range(5)]
        assert np.mean(js) == pytest.approx(1.0, abs=1e-12)


def test_vectorized_loo_matches_exclusion():
    rng = np.random.default_rng(9)
    refs = rand_refs(rng, [6, 8, 5, 7, 9])
    bag = build_bag(refs)
    shape, length = bag.leave_one_out()
    for i in range(5):
        assert shape[i] == pytest.approx(mean_cost(bag.refs[i], bag.exclude(i)), abs=1e-15)
        assert length[i] == mean_length_cost(bag.refs[i], bag.exclude(i))


# -- length and fusion -------------------------------------------------------

def test_length_self_match_zero():
    rng = np.random.default_rng(4)
    refs = rand_refs(rng, [6, 8, 5, 7, 9])
    assert score_length(refs[2], refs) == 0


def test_length_arithmetic():
    refs = [[const_code(0.0, 10)], [const_code(3.0, 13)]]
    e = Enrollment(refs)
    assert e.c0_length == 3.0
    test = [const_code(0.1, 8), const_code(2.9, 17)]
    # diffs {2, 4} -> mean 3 -> / 3
    assert e.score_length(test) == pytest.approx(1.0)


def test_length_association_is_by_shape():
    refs = [[const_code(0.0, 30)], [const_code(5.0, 10)]]
    # same length as the distant entry, but shape-matched to the first
    assert Enrollment(refs).score_length([const_code(0.1, 10)]) == pytest.approx(20 / 20)
    assert Enrollment(refs).c0_length == 20


def test_fused_is_mean():
    rng = np.random.default_rng(5)
    refs = rand_refs(rng, [6, 8, 5])
    test = [rand_seg(rng) for _ in range(7)]
    e = Enrollment(refs)
    assert score_fused(test, refs) == pytest.approx(0.5 * (e.score_j(test) + e.score_length(test)))
    full = e.score(test, baseline=True)
    assert full.j_fused == pytest.approx(0.5 * (full.j_shape + full.j_length))
    assert full.j_baseline == pytest.approx(score_j(test, refs, DTW))
    assert len(full.per_segment) == 7


# -- invariances -------------------------------------------------------------

def test_reference_permutation_invariance():
    rng = np.random.default_rng(6)
    refs = rand_refs(rng, [4, 6, 5, 3, 7])
    test = [rand_seg(rng) for _ in range(6)]
    base = Enrollment(refs).score(test, baseline=True)
    for perm in itertools.islice(itertools.permutations(range(5)), 0, 120, 17):
        s = Enrollment([refs[i] for i in perm]).score(test, baseline=True)
        assert (s.j_shape, s.j_length, s.j_baseline) == (base.j_shape, base.j_length, base.j_baseline)
        assert s.per_segment == base.per_segment


def test_reversal_invariance_of_tests():
    rng = np.random.default_rng(7)
    refs = rand_refs(rng, [4, 6, 5])
    test = [rand_seg(rng) for _ in range(6)]
    e = Enrollment(refs)
    assert e.score_j([reverse(s) for s in test]) == pytest.approx(e.score_j(test), abs=1e-12)
    assert e.score_j([reverse(s) for s in test], DTW) == pytest.approx(e.score_j(test, DTW), abs=1e-12)


def segments_at_scale(skel, scale, offset):
    g = build_graph(skel)
    norm = normalize_points(g.vertices * scale + offset)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return [Ucss(norm.points[p], kind) for kind, p in segment_vertex_paths(g)]


def test_scale_invariance_of_point_sets():
    rng = np.random.default_rng(8)
    skels = [random_skeleton(rng) for _ in range(6)]
    for scale, offset in ((1.0, 0.0), (3.7, 120.0), (0.01, -5.0)):
        segs = [segments_at_scale(s, scale, offset) for s in skels]
        s = Enrollment(segs[:5]).score(segs[5], baseline=True)
        if scale == 1.0:
            base = s
        else:
            for name in ("j_shape", "j_length", "j_fused", "j_baseline"):
                assert getattr(s, name) == pytest.approx(getattr(base, name), abs=1e-6)


def test_genuine_below_forgery(small_corpus, small_store):
    catalog, _ = small_corpus
    gen = {"shape": [], "length": [], "fused": [], "baseline": []}
    forg = {k: [] for k in gen}
    for signer in catalog:
        model = SignerModel(small_store.get(r) for r in signer.genuine[:5])
        for m in gen:
            gen[m] += [model.score(small_store.get(t), m) for t in signer.genuine[5:]]
            forg[m] += [model.score(small_store.get(t), m) for t in signer.forgeries]
    for m in gen:
        assert np.mean(gen[m]) < np.mean(forg[m]), m
