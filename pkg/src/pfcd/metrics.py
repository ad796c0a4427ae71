"""Agreement between detected and ground-truth communities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class CommunityAssignment:
    """Possibly overlapping node sets over ``n`` nodes.

    ``communities`` maps a community id to a non-empty frozenset of node ids.
    """

    n: int
    communities: dict
    degenerate: bool = False

    def __post_init__(self):
        clean = {}
        for cid, members in self.communities.items():
            members = frozenset(int(u) for u in members)
            if not members:
                continue
            if min(members) < 0 or max(members) >= self.n:
                raise ValueError(f"community {cid} references a node outside 0..{self.n - 1}")
            clean[cid] = members
        object.__setattr__(self, "communities", clean)

    @classmethod
    def from_labels(cls, labels) -> "CommunityAssignment":
        labels = np.asarray(labels)
        groups = {}
        for u, c in enumerate(labels.tolist()):
            groups.setdefault(c, set()).add(u)
        return cls(len(labels), groups)

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "CommunityAssignment":
        groups = {}
        for u, c in pairs:
            groups.setdefault(c, set()).add(u)
        return cls(n, groups)

    def sets(self) -> list:
        return list(self.communities.values())

    def memberships(self) -> list:
        """Sorted community ids for each node."""
        out = [[] for _ in range(self.n)]
        for cid in sorted(self.communities):
            for u in self.communities[cid]:
                out[u].append(cid)
        return out

    def covers_all(self) -> bool:
        return all(self.memberships())

    def __len__(self):
        return len(self.communities)


def _as_assignment(x) -> CommunityAssignment:
    if isinstance(x, CommunityAssignment):
        return x
    return CommunityAssignment.from_labels(x)


def _set_f1(a: frozenset, b: frozenset) -> float:
    shared = len(a & b)
    if shared == 0:
        return 0.0
    return 2.0 * shared / (len(a) + len(b))


def f1_score(detected, truth) -> float:
    """Symmetric best-match F1 between two community covers.

    Each community is matched to its best counterpart on the other side; the
    two directional averages are then averaged.  Accepts assignments or hard
    label vectors.
    """
    det, tru = _as_assignment(detected).sets(), _as_assignment(truth).sets()
    if not det or not tru:
        raise ValueError("f1_score needs at least one community on each side")
    scores = np.array([[_set_f1(a, b) for b in tru] for a in det])
    return 0.5 * (scores.max(axis=0).mean() + scores.max(axis=1).mean())


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log(p)))


def nmi(detected, truth) -> float:
    """Normalized mutual information ``2 I(X;Y) / (H(X) + H(Y))`` in nats."""
    x, y = np.asarray(detected), np.asarray(truth)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"label vectors must have equal length, got {x.shape} and {y.shape}")
    if x.size == 0:
        raise ValueError("empty labelings")
    _, xi = np.unique(x, return_inverse=True)
    _, yi = np.unique(y, return_inverse=True)
    joint = np.zeros((xi.max() + 1, yi.max() + 1))
    np.add.at(joint, (xi, yi), 1.0)
    hx, hy = _entropy(joint.sum(axis=1)), _entropy(joint.sum(axis=0))
    if hx == 0.0 and hy == 0.0:
        return 1.0
    if hx == 0.0 or hy == 0.0:
        return 0.0
    nonzero = joint > 0
    if np.all(nonzero.sum(axis=0) == 1) and np.all(nonzero.sum(axis=1) == 1):
        return 1.0  # a relabeling; skip the rounding in 2I / (H1 + H2)
    pxy = joint / x.size
    outer = np.outer(pxy.sum(axis=1), pxy.sum(axis=0))
    nz = pxy > 0
    mi = float(np.sum(pxy[nz] * np.log(pxy[nz] / outer[nz])))
    return float(np.clip(2.0 * mi / (hx + hy), 0.0, 1.0))


def discretize(values, bins: int = 4) -> np.ndarray:
    """Equal-frequency bin codes; columns with at most ``bins`` distinct
    values keep their own categories."""
    values = np.asarray(values, dtype=float)
    uniq = np.unique(values)
    if len(uniq) <= bins:
        return np.searchsorted(uniq, values)
    edges = np.quantile(values, np.linspace(0, 1, bins + 1)[1:-1])
    return np.searchsorted(edges, values, side="right")


def rank_assortative(table, reference, bins: int = 4) -> list:
    """Rank feature columns by NMI against reference labels, best first.

    ``table`` is a :class:`~pfcd.graph.RawFeatureTable`.  Ties keep column order.
    """
    reference = np.asarray(reference)
    if len(reference) != table.n:
        raise ValueError(f"reference has {len(reference)} labels, table has {table.n} rows")
    scores = [(name, nmi(discretize(table.values[:, j], bins), reference)) for j, name in enumerate(table.names)]
    return sorted(scores, key=lambda item: -item[1])
