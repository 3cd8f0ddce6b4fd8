import math

import pytest

from dynring.logic_ring import build_labels
from dynring.ring import Direction


def test_period_and_p():
    for n, p in [(3, 2), (4, 2), (5, 3), (8, 3), (9, 4), (16, 4), (17, 5), (256, 8)]:
        labels = build_labels(n)
        assert labels.p == p == math.ceil(math.log2(n))
        assert labels.period == 2 * p + 2


def test_n_below_three_rejected():
    with pytest.raises(ValueError):
        build_labels(2)


@pytest.mark.parametrize("n", [3, 5, 8, 13, 32])
def test_label_structure(n):
    labels = build_labels(n)
    p, period = labels.p, labels.period
    full = set(range(period))
    xs = [labels.x_residues(i) for i in range(n)]
    assert len(set(xs)) == n
    for i in range(n):
        x, y = xs[i], labels.y_residues(i)
        assert x | y == full and not x & y
        assert len(x & set(range(2 * p))) == p
        assert 2 * p in x and 2 * p + 1 in y


@pytest.mark.parametrize("n", [3, 6, 11])
def test_window_intersection_by_scan(n):
    labels = build_labels(n)
    for i in range(n):
        for j in range(n):
            for m in range(2 * labels.period):
                hit = labels.intersection_witness(i, j, m, "xy")
                assert (hit is not None) == (i != j)
                assert labels.intersection_witness(i, j, m, "xx") is not None
                assert labels.intersection_witness(i, j, m, "yy") is not None
                if hit is not None:
                    assert m <= hit < m + labels.period


def test_opposite_moves_on_one_edge_never_share_a_round():
    labels = build_labels(10, anchor=4)
    for edge in range(10):
        for r in range(3 * labels.period):
            assert not (labels.may_move(edge, Direction.CW, r) and labels.may_move(edge, Direction.CCW, r))
            assert labels.may_move(edge, Direction.CW, r) or labels.may_move(edge, Direction.CCW, r)


def test_indices_run_counter_clockwise_from_anchor():
    labels = build_labels(6, anchor=2)
    # the first edge left counter-clockwise from node 2 is edge 1
    assert labels.logic_index(1) == 0
    assert labels.logic_index(0) == 1
    assert labels.logic_index(2) == 5


def test_table_rows():
    rows = build_labels(5).table()
    assert [r["edge"] for r in rows] == list(range(5))
    assert all(set(r["X"]) | set(r["Y"]) == set(range(8)) for r in rows)
