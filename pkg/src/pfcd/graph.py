"""Graph and node-feature ingestion.

Graphs are stored as undirected simple graphs in CSR form (``indptr`` and
``indices`` arrays with each neighbor list sorted).  Original node labels are
kept in ``labels`` so results can be written back with the caller's ids.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

logger = logging.getLogger(__name__)


class GraphFormatError(ValueError):
    """Raised for malformed edge-list or feature files."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph over dense node ids ``0..n-1``."""

    indptr: np.ndarray
    indices: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        indptr = np.asarray(self.indptr, dtype=np.int64)
        indices = np.asarray(self.indices, dtype=np.int64)
        indptr.setflags(write=False)
        indices.setflags(write=False)
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(self.n)))
        if len(self.labels) != self.n:
            raise ValueError("labels must have one entry per node")

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edges(self) -> np.ndarray:
        """Return the ``(m, 2)`` array of edges with ``u < v``, sorted."""
        return self._edges

    @cached_property
    def _edges(self) -> np.ndarray:
        src = np.repeat(np.arange(self.n), self.degrees())
        mask = src < self.indices
        e = np.column_stack([src[mask], self.indices[mask]])
        e.setflags(write=False)
        return e

    def label_index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    def to_scipy(self):
        from scipy import sparse

        data = np.ones(len(self.indices))
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    @classmethod
    def from_edges(cls, n: int, edges, labels=None) -> "Graph":
        """Build a graph from an iterable of ``(u, v)`` integer pairs.

        Self-loops and duplicate (including reversed) pairs are dropped.
        """
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(e) and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        e = e[e[:, 0] != e[:, 1]]
        e = np.sort(e, axis=1)
        e = np.unique(e, axis=0)
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        indptr = np.cumsum(indptr)
        return cls(indptr, dst, tuple(labels) if labels is not None else ())

    @classmethod
    def from_adjacency(cls, adj) -> "Graph":
        """Build from a dense or scipy sparse adjacency matrix (symmetrized)."""
        from scipy import sparse

        a = sparse.coo_matrix(adj)
        if a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {a.shape}")
        keep = a.data != 0
        edges = np.column_stack([a.row[keep], a.col[keep]])
        return cls.from_edges(a.shape[0], edges)


def load_edge_list(path) -> Graph:
    """Read a whitespace-separated edge list.

    Lines starting with ``#`` and blank lines are skipped.  Labels are mapped
    to dense ids in order of first appearance.  Self-loops and duplicate edges
    are dropped with a logged warning; directed input is symmetrized.
    """
    index: dict[str, int] = {}
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise GraphFormatError(
                    f"{path}:{lineno}: expected 2 node labels, got {len(tokens)}"
                )
            ids = []
            for tok in tokens:
                if tok not in index:
                    index[tok] = len(index)
                ids.append(index[tok])
            pairs.append(ids)

    n = len(index)
    labels = tuple(index)
    graph = Graph.from_edges(n, pairs, labels)
    loops = sum(1 for u, v in pairs if u == v)
    duplicates = len(pairs) - loops - graph.m
    if loops or duplicates:
        logger.warning(
            "%s: dropped %d self-loop(s) and %d duplicate edge(s)", path, loops, duplicates
        )
    return graph


def write_edge_list(graph: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in graph.edges():
            fh.write(f"{graph.labels[u]} {graph.labels[v]}\n")


def _parse_float(text: str):
    try:
        return float(text)
    except ValueError:
        return None


@dataclass
class RawFeatureTable:
    """Dense per-node feature columns before the assortative/generative split.

    Categorical columns are already one-hot expanded into ``name=category``
    columns; ``base_names`` maps every column back to its source feature.
    """

    values: np.ndarray
    names: list
    base_names: list = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(len(self.values), -1)
        if not self.base_names:
            self.base_names = list(self.names)
        if self.values.shape[1] != len(self.names):
            raise ValueError("one name per column required")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.names.index(name)]


_HEADER = ("node", "feature", "value")


def load_feature_table(path, graph: Graph, fill_value: float = 0.0) -> RawFeatureTable:
    """Read ``node<TAB>feature<TAB>value`` rows into a dense table.

    A column is numeric unless its first value fails to parse as a float, in
    which case it is categorical and gets one-hot expanded.  Nodes without a
    value for a column receive ``fill_value``.
    """
    index = graph.label_index()
    numeric: dict[str, dict[int, float]] = {}
    categorical: dict[str, dict[int, str]] = {}
    order: list[str] = []

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise GraphFormatError(
                    f"{path}:{lineno}: expected 3 tab-separated fields, got {len(parts)}"
                )
            node, name, raw = (p.strip() for p in parts)
            if lineno == 1 and tuple(p.lower() for p in (node, name, raw)) == _HEADER:
                continue
            if node not in index:
                raise GraphFormatError(f"{path}:{lineno}: unknown node {node!r}")
            u = index[node]
            value = _parse_float(raw)
            if name not in numeric and name not in categorical:
                order.append(name)
                (numeric if value is not None else categorical)[name] = {}
            if name in numeric:
                if value is None:
                    raise GraphFormatError(
                        f"{path}:{lineno}: non-numeric value {raw!r} for numeric column {name!r}"
                    )
                numeric[name][u] = value
            else:
                categorical[name][u] = raw

    columns, names, bases = [], [], []
    for name in order:
        if name in numeric:
            col = np.full(graph.n, fill_value, dtype=float)
            for u, v in numeric[name].items():
                col[u] = v
            columns.append(col)
            names.append(name)
            bases.append(name)
        else:
            cats = sorted(set(categorical[name].values()))
            for cat in cats:
                col = np.zeros(graph.n)
                for u, v in categorical[name].items():
                    if v == cat:
                        col[u] = 1.0
                columns.append(col)
                names.append(f"{name}={cat}")
                bases.append(name)

    values = np.column_stack(columns) if columns else np.zeros((graph.n, 0))
    return RawFeatureTable(values, names, bases)


@dataclass(frozen=True, eq=False)
class FeatureTable:
    """Node features split into real-valued assortative and binary generative parts."""

    S: np.ndarray
    F: np.ndarray
    s_names: tuple = ()
    f_names: tuple = ()

    def __post_init__(self):
        S = np.asarray(self.S, dtype=float)
        F = np.asarray(self.F, dtype=float)
        if S.ndim != 2 or F.ndim != 2 or S.shape[0] != F.shape[0]:
            raise ValueError(f"S and F must be 2-D with equal rows, got {S.shape} and {F.shape}")
        if not np.all((F == 0) | (F == 1)):
            raise ValueError("generative features must be exactly 0 or 1")
        s_names = tuple(self.s_names) or tuple(f"s{j}" for j in range(S.shape[1]))
        f_names = tuple(self.f_names) or tuple(f"f{j}" for j in range(F.shape[1]))
        if len(s_names) != S.shape[1] or len(f_names) != F.shape[1]:
            raise ValueError("one name per feature column required")
        if set(s_names) & set(f_names):
            raise ValueError("assortative and generative feature names overlap")
        S.setflags(write=False)
        F.setflags(write=False)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "s_names", s_names)
        object.__setattr__(self, "f_names", f_names)

    @property
    def n(self) -> int:
        return self.S.shape[0]

    @classmethod
    def empty(cls, n: int) -> "FeatureTable":
        return cls(np.zeros((n, 0)), np.zeros((n, 0)))


def binarize(values, threshold: float = 0.0) -> np.ndarray:
    return (np.asarray(values, dtype=float) > threshold).astype(float)


def split_features(table: RawFeatureTable, assortative_names=(), threshold: float = 0.0) -> FeatureTable:
    """Route named columns to the assortative block and binarize the rest.

    A name may refer to a column or to a categorical source feature, in which
    case all of its one-hot columns are routed together.
    """
    wanted = list(assortative_names)
    known = set(table.names) | set(table.base_names)
    unknown = [a for a in wanted if a not in known]
    if unknown:
        raise KeyError(f"unknown assortative feature(s): {', '.join(unknown)}")
    in_s = [name in wanted or base in wanted for name, base in zip(table.names, table.base_names)]
    s_idx = [j for j, flag in enumerate(in_s) if flag]
    f_idx = [j for j, flag in enumerate(in_s) if not flag]
    return FeatureTable(
        S=table.values[:, s_idx],
        F=binarize(table.values[:, f_idx], threshold),
        s_names=tuple(table.names[j] for j in s_idx),
        f_names=tuple(table.names[j] for j in f_idx),
    )
