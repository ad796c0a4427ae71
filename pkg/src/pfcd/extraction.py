"""Turn fitted memberships into community assignments and weight reports."""

from __future__ import annotations

import numpy as np

from .metrics import CommunityAssignment
from .model import ModelParams


def hard_labels(M) -> np.ndarray:
    """Argmax community per node; ties go to the lowest index."""
    return np.asarray(M, dtype=float).argmax(axis=1)


def threshold_memberships(M) -> CommunityAssignment:
    """Assign node ``u`` to every community ``c`` with ``M[u, c]`` above the
    column mean.  Nodes above no mean fall back to their argmax column."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[1] == 0:
        raise ValueError(f"M must be a 2-D matrix with at least one column, got {M.shape}")
    if np.any(M < 0):
        raise ValueError("memberships must be nonnegative")
    above = M > M.mean(axis=0)
    orphans = ~above.any(axis=1)
    above[orphans, hard_labels(M[orphans])] = True
    communities = {c: np.flatnonzero(above[:, c]) for c in range(M.shape[1])}
    return CommunityAssignment(M.shape[0], communities, degenerate=not np.any(M))


def feature_influence_report(params: ModelParams, s_names=(), f_names=()) -> list:
    """``(feature, community, weight)`` rows from ``I`` then ``W``.

    Rows are grouped by community and sorted by decreasing ``|weight|``.
    """
    s_names = list(s_names) or [f"s{j}" for j in range(params.I.shape[0])]
    f_names = list(f_names) or [f"f{j}" for j in range(params.W.shape[0])]
    if len(s_names) != params.I.shape[0] or len(f_names) != params.W.shape[0]:
        raise ValueError("one name per feature row of I and W required")
    rows = []
    for c in range(params.k):
        entries = [(name, float(params.I[j, c])) for j, name in enumerate(s_names)]
        entries += [(name, float(params.W[j, c])) for j, name in enumerate(f_names)]
        entries.sort(key=lambda item: -abs(item[1]))
        rows.extend((name, c, w) for name, w in entries)
    return rows


def write_assignment(assignment: CommunityAssignment, path, node_labels=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u, cids in enumerate(assignment.memberships()):
            node = node_labels[u] if node_labels is not None else u
            for c in cids:
                fh.write(f"{node}\t{c}\n")


def write_report(rows, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for name, c, w in rows:
            fh.write(f"{name}\t{c}\t{w:.17g}\n")
