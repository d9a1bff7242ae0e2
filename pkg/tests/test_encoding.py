import numpy as np
import pytest

from sigucss.encoding import (SegmentCode, code_matrix, d2, d2_min_oriented, length_diff,
                              pairwise_d2_min_oriented, subsample4, subsample_indices)
from sigucss.errors import InputError
from sigucss.ucss import Ucss, reverse


def code(pairs, length=10):
    return SegmentCode(np.asarray(pairs, dtype=float).reshape(8), length)


def test_subsample_line_of_ten():
    s = Ucss([(x, 0) for x in range(10)])
    c = subsample4(s)
    assert c.pairs.tolist() == [[0, 0], [3, 0], [6, 0], [9, 0]]
    assert c.length == 10


def test_subsample_four_is_identity():
    pts = [(0, 0), (1, 2), (3, 1), (4, 4)]
    assert subsample4(Ucss(pts)).pairs.tolist() == [list(p) for p in pts]


def test_subsample_two_repeats():
    c = subsample4(Ucss([(1, 2), (5, 6)]))
    assert c.pairs.tolist() == [[1, 2], [1, 2], [5, 6], [5, 6]]
    assert subsample_indices(2).tolist() == [0, 0, 1, 1]


def test_subsample_rounding_half_away():
    # L = 3: 1 + (i-1) * 2/3 -> 1, 1.67, 2.33, 3
    assert subsample_indices(3).tolist() == [0, 1, 1, 2]
    # L = 5: 1, 2.33, 3.67, 5
    assert subsample_indices(5).tolist() == [0, 1, 3, 4]
    # L = 8: 1, 3.33, 5.67, 8
    assert subsample_indices(8).tolist() == [0, 2, 5, 7]


@pytest.mark.parametrize("length", range(2, 300))
def test_index_formula_monotone_with_endpoints(length):
    idx = subsample_indices(length)
    assert idx[0] == 0 and idx[-1] == length - 1
    assert np.all(np.diff(idx) >= 0)


def test_subsample_rejects_short():
    with pytest.raises(InputError):
        subsample_indices(1)


def test_d2_examples():
    u = code([(0, 0)] * 4)
    v = code([(1, 0)] * 4)
    assert d2(u, v) == 4 and d2_min_oriented(u, v) == 4
    assert d2_min_oriented(u, u) == 0


def test_d2_reversed_arc():
    u = code([(-1, 0), (-0.5, 0.8), (0.5, 0.8), (1, 0)])
    assert d2_min_oriented(u, u.reversed()) == 0
    w = code([(0, 0), (1, 0), (2, 1), (4, 4)])
    assert d2(w, w.reversed()) > 0
    assert d2_min_oriented(w, w.reversed()) == 0


def test_d2_ignores_length():
    assert d2_min_oriented(code([(0, 0)] * 4, 3), code([(0, 0)] * 4, 99)) == 0


def test_length_diff():
    assert length_diff(code([(0, 0)] * 4, 10), code([(0, 0)] * 4, 10)) == 0
    a, b = code([(0, 0)] * 4, 7), code([(0, 0)] * 4, 12)
    assert length_diff(a, b) == 5 == length_diff(b, a)


def test_d2_properties():
    rng = np.random.default_rng(0)
    for _ in range(100):
        u, v = code(rng.normal(size=8)), code(rng.normal(size=8))
        assert d2_min_oriented(u, v) == pytest.approx(d2_min_oriented(v, u), abs=1e-12)
        assert d2_min_oriented(u.reversed(), v.reversed()) == pytest.approx(d2_min_oriented(u, v), abs=1e-12)


def test_pairwise_matches_scalar():
    rng = np.random.default_rng(1)
    a = [code(rng.normal(size=8)) for _ in range(6)]
    b = [code(rng.normal(size=8)) for _ in range(9)]
    mat = pairwise_d2_min_oriented(code_matrix(a)[0], code_matrix(b)[0])
    for i, u in enumerate(a):
        for j, v in enumerate(b):
            assert mat[i, j] == pytest.approx(d2_min_oriented(u, v), rel=1e-12, abs=1e-12)


def test_record_round_trip():
    c = subsample4(reverse(Ucss([(x, x * x) for x in range(7)])))
    rec = c.to_record()
    assert len(rec) == 9 and rec[-1] == 7
    assert SegmentCode.from_record(rec) == c
    with pytest.raises(InputError):
        SegmentCode.from_record(rec[:8])
