import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from motun.archive import (ArchiveEntry, ParetoArchive, Phase, dominates, filter_nondominated,
                           front_size, nondominated_mask)
from motun.errors import DimensionMismatch


def _archive(F):
    return ParetoArchive([ArchiveEntry(np.zeros(1), np.asarray(f, dtype=float), Phase.BEFORE_TUNNEL, i)
                          for i, f in enumerate(F)])


def _fvals(archive):
    return sorted(tuple(e.fvals) for e in archive)


@pytest.mark.parametrize("a, b, expected", [
    ((1, 1), (2, 2), True),
    ((1, 2), (1, 2), False),
    ((1, 3), (2, 2), False),
    ((1, 2), (1, 3), True),
])
def test_dominates(a, b, expected):
    assert dominates(a, b) is expected


def test_dominates_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        dominates((1, 2), (1, 2, 3))


def test_filter_example():
    assert _fvals(filter_nondominated(_archive([(1, 2), (2, 1), (2, 2)]))) == [(1, 2), (2, 1)]


def test_identical_entries_collapse_to_first():
    kept = filter_nondominated(_archive([(3, 3)] * 5))
    assert [e.run_id for e in kept] == [0]


def test_near_duplicates_snap():
    kept = filter_nondominated(_archive([(1.0, 2.0), (1.0 + 1e-12, 2.0 - 1e-12)]))
    assert len(kept) == 1


def test_front_size_edge_cases():
    assert front_size(ParetoArchive()) == 0
    assert front_size(_archive([(0.5, 0.5)])) == 1


def test_nondominated_mask_empty():
    assert nondominated_mask(np.zeros((0, 2))).size == 0


def test_filter_accepts_iterables_and_preserves_run_order():
    entries = list(_archive([(1, 4), (4, 1), (2, 2)]))[::-1]
    assert [e.run_id for e in filter_nondominated(entries)] == [0, 1, 2]


_vecs = arrays(np.float64, st.tuples(st.integers(1, 30), st.integers(2, 3)),
               elements=st.integers(0, 4).map(float))


@given(_vecs)
def test_filter_is_idempotent(F):
    once = filter_nondominated(_archive(F))
    assert [e.run_id for e in filter_nondominated(once)] == [e.run_id for e in once]


@given(_vecs)
def test_every_removed_point_is_covered(F):
    kept = filter_nondominated(_archive(F))
    K = np.vstack([e.fvals for e in kept])
    assert 1 <= len(kept) <= len(F)
    for f in F:
        assert np.any(np.all(K <= f, axis=1))
    for i, a in enumerate(K):
        assert not any(dominates(b, a) for j, b in enumerate(K) if j != i)


@given(arrays(np.float64, 3, elements=st.floats(-5, 5)), arrays(np.float64, 3, elements=st.floats(-5, 5)))
def test_dominance_is_a_strict_order(a, b):
    assert not dominates(a, a)
    assert not (dominates(a, b) and dominates(b, a))
    c = a - 1.0
    if dominates(a, b):
        assert dominates(c, b)
