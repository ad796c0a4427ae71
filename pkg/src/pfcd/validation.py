"""Input checks shared by the estimator and the library entry points."""

from __future__ import annotations

import numpy as np
from scipy import sparse
from sklearn.utils.validation import check_array

from .graph import FeatureTable, Graph


def check_graph(X) -> Graph:
    """Coerce ``X`` into a :class:`Graph`.

    Accepts a Graph, a square array-like or a scipy sparse matrix.  Nonzero
    entries are edges; the diagonal is ignored and direction is dropped.
    """
    if isinstance(X, Graph):
        return X
    if sparse.issparse(X):
        A = check_array(X, accept_sparse=("csr", "csc", "coo"), ensure_min_samples=1)
    else:
        A = check_array(X, ensure_min_samples=1)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"adjacency matrix must be square, got shape {A.shape}")
    return Graph.from_adjacency(A)


def _block(values, n, name, allow_none=True):
    if values is None:
        return np.zeros((n, 0))
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.shape[1] == 0:
        return arr.reshape(n, 0) if arr.shape[0] in (0, n) else arr
    arr = check_array(arr, ensure_min_samples=1, input_name=name)
    if arr.shape[0] != n:
        raise ValueError(f"{name} has {arr.shape[0]} rows, expected one per node ({n})")
    return arr


def check_features(n: int, S=None, F=None, s_names=(), f_names=()) -> FeatureTable:
    """Build a node-aligned FeatureTable, validating shapes and binarity."""
    if isinstance(S, FeatureTable):
        if F is not None:
            raise ValueError("pass either a FeatureTable or separate S and F, not both")
        if S.n != n:
            raise ValueError(f"feature table has {S.n} rows, graph has {n} nodes")
        return S
    S_arr, F_arr = _block(S, n, "S"), _block(F, n, "F")
    if F_arr.size and not np.all((F_arr == 0) | (F_arr == 1)):
        raise ValueError("generative features F must contain only 0 and 1")
    return FeatureTable(S_arr, F_arr, tuple(s_names), tuple(f_names))
