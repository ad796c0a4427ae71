import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pfcd import ModelParams
from pfcd.extraction import feature_influence_report, hard_labels, threshold_memberships, write_assignment, write_report


def test_identity_memberships():
    a = threshold_memberships(np.eye(2))
    assert a.memberships() == [[0], [1]]


def test_overlap():
    M = np.array([[0.9, 0.8], [0.1, 0.0], [0.0, 0.1], [0.2, 0.2]])
    assert threshold_memberships(M).memberships()[0] == [0, 1]


def test_constant_memberships_fall_back_to_first():
    a = threshold_memberships(np.full((4, 3), 0.7))
    assert a.memberships() == [[0]] * 4
    assert not a.degenerate


def test_all_zero_is_degenerate():
    a = threshold_memberships(np.zeros((3, 2)))
    assert a.degenerate and a.memberships() == [[0]] * 3


def test_negative_rejected():
    with pytest.raises(ValueError):
        threshold_memberships(np.array([[-1.0, 0.0]]))


def test_hard_labels_tie_goes_low():
    np.testing.assert_array_equal(hard_labels([[0.5, 0.5], [0.1, 0.4]]), [0, 1])


@settings(max_examples=200, deadline=None)
@given(arrays(float, (6, 3), elements=st.just(0.0) | st.floats(1e-6, 10)), st.integers(0, 2), st.integers(-20, 20))
def test_column_scaling_invariance(M, c, j):
    # power-of-two factors scale exactly, so no comparison can flip by rounding
    scaled = M.copy()
    scaled[:, c] *= 2.0 ** j
    above = M > M.mean(axis=0)
    np.testing.assert_array_equal(above, scaled > scaled.mean(axis=0))
    keep = above.any(axis=1)
    a, b = threshold_memberships(M).memberships(), threshold_memberships(scaled).memberships()
    assert [a[u] for u in np.flatnonzero(keep)] == [b[u] for u in np.flatnonzero(keep)]


def test_every_node_assigned():
    rng = np.random.default_rng(0)
    assert threshold_memberships(rng.random((50, 4))).covers_all()


def test_report_empty_in_plain_mode():
    p = ModelParams(np.ones((2, 2)), np.eye(2), np.zeros((0, 2)), np.zeros((0, 2)))
    assert feature_influence_report(p) == []


def test_report_order_and_files(tmp_path):
    p = ModelParams(np.ones((2, 2)), np.eye(2), np.array([[0.5, -2.0]]), np.array([[-1.0, 0.1]]))
    rows = feature_influence_report(p, ["x"], ["g"])
    assert rows == [("g", 0, -1.0), ("x", 0, 0.5), ("x", 1, -2.0), ("g", 1, 0.1)]
    write_report(rows, tmp_path / "r.tsv")
    assert (tmp_path / "r.tsv").read_text().splitlines()[0] == "g\t0\t-1"
    write_assignment(threshold_memberships(np.eye(2)), tmp_path / "a.tsv", ["a", "b"])
    assert (tmp_path / "a.tsv").read_text() == "a\t0\nb\t1\n"
