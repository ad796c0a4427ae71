"""Generative edge/feature model and its log-likelihood."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np
from scipy.special import expit

from .graph import Graph

# Floor on the edge affinity u'Bv inside edge terms; zero-affinity edges then
# cost log(1e-10) instead of -inf.
AFFINITY_FLOOR = 1e-10

BUNDLE_VERSION = 1


class NumericalDomainError(FloatingPointError):
    """A non-finite value appeared while evaluating the model."""


@dataclass
class ModelParams:
    """Membership ``M`` (n, k), interaction ``beta`` (k, k), assortative
    weights ``I`` (|S|, k) and generative weights ``W`` (|F|, k)."""

    M: np.ndarray
    beta: np.ndarray
    I: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        for f in fields(self):
            setattr(self, f.name, np.array(getattr(self, f.name), dtype=float, ndmin=2))
        k = self.k
        if self.beta.shape != (k, k):
            raise ValueError(f"beta must be ({k}, {k}), got {self.beta.shape}")
        if self.I.shape[1] != k or self.W.shape[1] != k:
            raise ValueError("I and W must have one column per community")
        if np.any(self.M < 0):
            raise ValueError("memberships M must be nonnegative")
        if np.any(self.beta < 0) or not np.allclose(self.beta, self.beta.T, rtol=0, atol=1e-12, equal_nan=True):
            raise ValueError("beta must be symmetric and nonnegative")

    @property
    def n(self) -> int:
        return self.M.shape[0]

    @property
    def k(self) -> int:
        return self.M.shape[1]

    def copy(self) -> "ModelParams":
        return ModelParams(self.M.copy(), self.beta.copy(), self.I.copy(), self.W.copy())

    def check_shapes(self, n: int, n_assortative: int, n_generative: int) -> None:
        expected = {"M": (n, self.k), "I": (n_assortative, self.k), "W": (n_generative, self.k)}
        for name, shape in expected.items():
            got = getattr(self, name).shape
            if got != shape:
                raise ValueError(f"{name} has shape {got}, expected {shape}")

    def save(self, directory) -> None:
        """Write one TSV per matrix into ``directory`` (17 significant digits)."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for f in fields(self):
            mat = getattr(self, f.name)
            with open(directory / f"{f.name}.tsv", "w", encoding="utf-8") as fh:
                fh.write(f"# pfcd-params v{BUNDLE_VERSION} rows={mat.shape[0]} cols={mat.shape[1]}\n")
                for row in mat:
                    fh.write("\t".join(f"{x:.17g}" for x in row) + "\n")

    @classmethod
    def load(cls, directory) -> "ModelParams":
        directory = Path(directory)
        mats = {}
        for f in fields(cls):
            with open(directory / f"{f.name}.tsv", encoding="utf-8") as fh:
                header = fh.readline().split()
                if len(header) != 5 or header[1] != "pfcd-params":
                    raise ValueError(f"{f.name}.tsv: missing bundle header")
                if header[2] != f"v{BUNDLE_VERSION}":
                    raise ValueError(f"{f.name}.tsv: unsupported bundle version {header[2]}")
                rows = int(header[3].partition("=")[2])
                cols = int(header[4].partition("=")[2])
                data = [[float(x) for x in line.split("\t")] for line in fh if line.strip()]
            mats[f.name] = np.array(data, dtype=float).reshape(rows, cols)
        return cls(**mats)


def log1mexp(x):
    """Stable ``log(1 - exp(-x))`` for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    small = x < np.log(2.0)
    out = np.empty_like(x)
    out[small] = np.log(-np.expm1(-x[small]))
    out[~small] = np.log1p(-np.exp(-x[~small]))
    return out


def edge_probability(Mu, Mv, beta) -> float:
    """Probability ``1 - exp(-Mu' beta Mv)`` that ``u`` and ``v`` are linked."""
    Mu, Mv, beta = np.asarray(Mu, float), np.asarray(Mv, float), np.asarray(beta, float)
    if beta.shape != (Mu.size, Mv.size):
        raise ValueError(f"beta shape {beta.shape} does not match memberships {Mu.size}, {Mv.size}")
    return float(-np.expm1(-(Mu @ beta @ Mv)))


def non_edge_probability(Mu, Mv, beta) -> float:
    return float(np.exp(-(np.asarray(Mu, float) @ np.asarray(beta, float) @ np.asarray(Mv, float))))


def generative_feature_probability(Mu, Wk) -> float:
    Mu, Wk = np.asarray(Mu, float), np.asarray(Wk, float)
    if Mu.shape != Wk.shape:
        raise ValueError(f"shape mismatch: {Mu.shape} vs {Wk.shape}")
    return float(expit(Mu @ Wk))


def membership_from_assortative(Su, I) -> np.ndarray:
    """Sigmoid link from a node's assortative features to community memberships.

    Works row-wise when ``Su`` is an (n, |S|) matrix.  With no assortative
    features every component is 0.5.
    """
    Su, I = np.asarray(Su, float), np.asarray(I, float)
    if Su.shape[-1] != I.shape[0]:
        raise ValueError(f"shape mismatch: {Su.shape} vs I {I.shape}")
    return expit(Su @ I)


def feature_log_likelihood(F, M, W) -> float:
    """Bernoulli log-likelihood of the binary generative features."""
    if F.shape[1] == 0:
        return 0.0
    z = M @ W.T
    # F log sigma(z) + (1 - F) log(1 - sigma(z))
    return float(-np.sum(F * np.logaddexp(0.0, -z) + (1.0 - F) * np.logaddexp(0.0, z)))


def _locate_bad_pair(G: Graph, params: ModelParams):
    M, beta = params.M, params.beta
    for u in range(G.n):
        x = M[u] @ beta @ M[u + 1:].T
        bad = np.flatnonzero(~np.isfinite(x))
        if bad.size:
            return u, u + 1 + int(bad[0])
    return None


def edge_affinities(G: Graph, M, beta) -> np.ndarray:
    """``Mu' beta Mv`` for every edge, in ``G.edges()`` order."""
    e = G.edges()
    return np.sum((M[e[:, 0]] @ beta) * M[e[:, 1]], axis=1)


def structure_log_likelihood(G: Graph, M, beta) -> float:
    """Edge and non-edge terms over all unordered node pairs."""
    x_edge = edge_affinities(G, M, beta)
    total = M.sum(axis=0)
    all_pairs = 0.5 * (total @ beta @ total - np.sum((M @ beta) * M))
    return float(np.sum(log1mexp(np.maximum(x_edge, AFFINITY_FLOOR)))) - (all_pairs - float(x_edge.sum()))


def log_likelihood(G: Graph, F, params: ModelParams) -> float:
    """Log-likelihood of the graph and binary generative features.

    Non-edge terms are summed through the membership total, so the cost is
    O(|E| k + n k^2 + n k |F|) rather than quadratic in ``n``.
    """
    F = np.asarray(F, dtype=float).reshape(G.n, -1)
    with np.errstate(over="ignore", invalid="ignore"):
        ll = structure_log_likelihood(G, params.M, params.beta) + feature_log_likelihood(
            F, params.M, params.W
        )
    if not np.isfinite(ll):
        pair = _locate_bad_pair(G, params)
        where = f" at pair {pair}" if pair else ""
        raise NumericalDomainError(f"non-finite log-likelihood{where}")
    return ll
