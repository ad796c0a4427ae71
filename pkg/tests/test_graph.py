import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfcd import FeatureTable, Graph, GraphFormatError, load_edge_list, load_feature_table, split_features
from pfcd.graph import RawFeatureTable, write_edge_list


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_path_graph(tmp_path):
    g = load_edge_list(_write(tmp_path, "g.txt", "0 1\n1 2\n"))
    assert (g.n, g.m) == (3, 2)
    idx = g.label_index()
    assert {g.labels[v] for v in g.neighbors(idx["1"])} == {"0", "2"}


def test_duplicates_and_loops_dropped(tmp_path, caplog):
    g = load_edge_list(_write(tmp_path, "g.txt", "a b\nb a\na a\n"))
    assert (g.n, g.m) == (2, 1)
    assert "1 duplicate" in caplog.text and "1 self-loop" in caplog.text


def test_empty_file(tmp_path):
    g = load_edge_list(_write(tmp_path, "g.txt", ""))
    assert (g.n, g.m) == (0, 0)


def test_comments_and_blank_lines(tmp_path):
    g = load_edge_list(_write(tmp_path, "g.txt", "# header\n\n0 1\n  \n# x y\n1 2\n"))
    assert g.m == 2


def test_bad_line_names_line_number(tmp_path):
    path = _write(tmp_path, "g.txt", "0 1\n1 2 3\n")
    with pytest.raises(GraphFormatError, match=":2:"):
        load_edge_list(path)


def test_unreadable_file(tmp_path):
    with pytest.raises(OSError):
        load_edge_list(tmp_path / "missing.txt")


def test_round_trip(tmp_path):
    src = _write(tmp_path, "g.txt", "3 1\n1 2\n2 3\n1 3\n5 5\n")
    g = load_edge_list(src)
    out = tmp_path / "out.txt"
    write_edge_list(g, out)
    again = load_edge_list(out)

    def canon(graph):
        return {frozenset((graph.labels[u], graph.labels[v])) for u, v in graph.edges()}

    assert canon(again) == canon(g) == {frozenset(p) for p in [("1", "3"), ("1", "2"), ("2", "3")]}


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=40))
))
def test_graph_invariants(case):
    n, edges = case
    g = Graph.from_edges(n, edges)
    expected = {(min(u, v), max(u, v)) for u, v in edges if u != v}
    assert {tuple(e) for e in g.edges().tolist()} == expected
    assert g.degrees().sum() == 2 * g.m
    for u in range(n):
        nb = g.neighbors(u)
        assert u not in nb
        assert np.all(np.diff(nb) > 0)
        for v in nb:
            assert u in g.neighbors(v)


def test_from_adjacency_symmetrizes():
    A = np.array([[1, 1, 0], [0, 0, 0], [0, 1, 0]])
    g = Graph.from_adjacency(A)
    assert {tuple(e) for e in g.edges().tolist()} == {(0, 1), (1, 2)}


@pytest.fixture
def two_nodes(tmp_path):
    return load_edge_list(_write(tmp_path, "g.txt", "0 1\n"))


def test_feature_single_entry_fills_missing(tmp_path, two_nodes):
    table = load_feature_table(_write(tmp_path, "f.tsv", "0\tstatus\t1\n"), two_nodes)
    assert table.names == ["status"]
    np.testing.assert_array_equal(table.column("status"), [1.0, 0.0])


def test_feature_shape(tmp_path):
    g = load_edge_list(_write(tmp_path, "g.txt", "0 1\n1 2\n"))
    rows = "node\tfeature\tvalue\n0\ta\t1.5\n1\tb\t2\n2\ta\t-1\n"
    table = load_feature_table(_write(tmp_path, "f.tsv", rows), g)
    assert table.values.shape == (3, 2)
    np.testing.assert_array_equal(table.column("a"), [1.5, 0.0, -1.0])


def test_feature_unknown_node(tmp_path, two_nodes):
    with pytest.raises(GraphFormatError, match="unknown node"):
        load_feature_table(_write(tmp_path, "f.tsv", "99\tstatus\t1\n"), two_nodes)


def test_feature_categorical_one_hot(tmp_path, two_nodes):
    rows = "0\toffice\tBoston\n1\toffice\tHartford\n"
    table = load_feature_table(_write(tmp_path, "f.tsv", rows), two_nodes)
    assert table.names == ["office=Boston", "office=Hartford"]
    np.testing.assert_array_equal(table.values, [[1, 0], [0, 1]])


def test_feature_mixed_column_rejected(tmp_path, two_nodes):
    with pytest.raises(GraphFormatError, match="non-numeric"):
        load_feature_table(_write(tmp_path, "f.tsv", "0\ta\t1\n1\ta\tx\n"), two_nodes)


def test_split_partition():
    table = RawFeatureTable(np.array([[1.0, 0.0], [0.0, 1.0]]), ["status", "office"])
    ft = split_features(table, ["status"])
    assert ft.S.shape[1] == 1 and ft.F.shape[1] == 1
    assert ft.s_names == ("status",) and ft.f_names == ("office",)


def test_split_all_assortative():
    table = RawFeatureTable(np.ones((3, 2)), ["a", "b"])
    assert split_features(table, ["a", "b"]).F.shape[1] == 0


def test_split_binarizes_real_column():
    table = RawFeatureTable(np.array([[2.7], [-0.3], [0.0]]), ["x"])
    np.testing.assert_array_equal(split_features(table, []).F[:, 0], [1.0, 0.0, 0.0])


def test_split_by_categorical_base_name():
    table = RawFeatureTable(np.eye(3), ["office=A", "office=B", "age"], ["office", "office", "age"])
    ft = split_features(table, ["office"])
    assert ft.s_names == ("office=A", "office=B") and ft.f_names == ("age",)


def test_split_unknown_name():
    with pytest.raises(KeyError):
        split_features(RawFeatureTable(np.ones((2, 1)), ["a"]), ["b"])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5), st.data())
def test_split_counts(n_cols, data):
    names = [f"c{j}" for j in range(n_cols)]
    chosen = data.draw(st.lists(st.sampled_from(names), unique=True) if names else st.just([]))
    table = RawFeatureTable(np.zeros((4, n_cols)), names)
    ft = split_features(table, chosen)
    assert ft.S.shape[1] + ft.F.shape[1] == n_cols


def test_feature_table_rejects_non_binary_f():
    with pytest.raises(ValueError, match="0 or 1"):
        FeatureTable(np.zeros((2, 0)), np.array([[0.5], [1.0]]))


def test_feature_table_rejects_shared_names():
    with pytest.raises(ValueError, match="overlap"):
        FeatureTable(np.zeros((2, 1)), np.zeros((2, 1)), ("a",), ("a",))
