import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from szegolab.arcs import TWO_PI, Arc, ArcSet, arcs_from_mask, harmonic_length_sum


def test_arc_normalizes_start():
    a = Arc(-0.5, 1.0)
    assert 0 <= a.start < TWO_PI
    assert math.isclose(a.start, TWO_PI - 0.5)


@pytest.mark.parametrize("length", [0.0, -1.0, 7.0])
def test_arc_rejects_bad_length(length):
    with pytest.raises(ValueError):
        Arc(0.0, length)


def test_full_arc():
    assert Arc(0.0, TWO_PI).is_full
    assert ArcSet.full().normalized_measure == 1.0
    assert ArcSet.full().gaps() == []


def test_merge_overlapping_and_wraparound():
    E = ArcSet([Arc(6.0, 0.5), Arc(0.1, 0.3), Arc(2.0, 0.5), Arc(2.4, 0.2)])
    assert E.count == 2
    # wrap-around arc [6.0, 0.4 + 2pi] and [2.0, 2.6]
    assert math.isclose(E.total_length, (0.4 + TWO_PI - 6.0) + 0.6)
    assert E.contains(np.array([0.0, 2.5])).all()
    assert not E.contains(np.array([1.0]))[0]


def test_gaps_partition_the_circle():
    E = ArcSet([Arc(0.0, 1.0), Arc(2.0, 0.5), Arc(4.0, 1.0)])
    total = E.total_length + sum(g for _, g in E.gaps())
    assert math.isclose(total, TWO_PI)


def test_tiny_arc_keeps_length():
    a = Arc(1.0, 1e-30)
    assert a.length == 1e-30
    assert harmonic_length_sum([a]) == pytest.approx(1 / math.log(1e30))


def test_arcs_from_mask_roundtrip():
    th = np.arange(64) * TWO_PI / 64
    mask = (th > 1.0) & (th < 2.0)
    E = arcs_from_mask(th, mask)
    assert E.count == 1
    assert E[0].start == pytest.approx(th[mask][0] - TWO_PI / 128)


@given(st.lists(st.tuples(st.floats(0, 6.28), st.floats(0.01, 1.0)), min_size=1, max_size=6))
def test_merged_arcs_are_disjoint(items):
    E = ArcSet(Arc(s, l) for s, l in items)
    if E.is_full:
        return
    for _, g in E.gaps():
        assert g > 0
    assert E.total_length <= sum(l for _, l in items) + 1e-12
