"""Degree-corrected block-model networks with community-correlated features."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import FeatureTable, Graph, binarize


@dataclass(frozen=True)
class SynthConfig:
    n: int = 1000
    communities: int = 2
    beta_in: float = 0.1
    r: float = 0.25
    hub_fraction: float = 0.10
    theta_hub: float = 10.0
    theta_normal: float = 1.0
    mu: float = 0.0
    p: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.communities < 1:
            raise ValueError("communities must be >= 1")
        if self.n < 0 or self.n % self.communities:
            raise ValueError(f"n={self.n} must split into {self.communities} equal communities")
        if not 0 <= self.beta_in <= 1:
            raise ValueError(f"beta_in must be in [0, 1], got {self.beta_in}")
        if not 0 < self.r <= 1:
            raise ValueError(f"r must be in (0, 1], got {self.r}")
        if not 0 <= self.hub_fraction <= 1:
            raise ValueError(f"hub_fraction must be in [0, 1], got {self.hub_fraction}")
        if self.p < 1:
            raise ValueError("p must be >= 1")

    @property
    def block_size(self) -> int:
        return self.n // self.communities

    @property
    def hubs_per_block(self) -> int:
        return math.ceil(self.hub_fraction * self.block_size)


@dataclass(frozen=True)
class PlantedPartition:
    labels: np.ndarray
    theta: np.ndarray

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def is_hub(self) -> np.ndarray:
        return self.theta > self.theta.min()


def _node_layout(config: SynthConfig, rng):
    labels = rng.permutation(np.repeat(np.arange(config.communities), config.block_size))
    theta = np.full(config.n, config.theta_normal, dtype=float)
    for c in range(config.communities):
        members = rng.permutation(np.flatnonzero(labels == c))
        theta[members[:config.hubs_per_block]] = config.theta_hub
    return labels, theta


def generate_network(config: SynthConfig) -> tuple:
    """Sample a graph and its planted partition.

    Each unordered pair is linked independently with probability
    ``min(1, beta_in * theta_u * theta_v)`` inside a community, scaled by ``r``
    across communities.
    """
    rng = np.random.default_rng(config.seed)
    labels, theta = _node_layout(config, rng)
    rows, cols = np.triu_indices(config.n, k=1)
    prob = config.beta_in * theta[rows] * theta[cols]
    prob[labels[rows] != labels[cols]] *= config.r
    np.minimum(prob, 1.0, out=prob)
    keep = rng.random(len(rows)) < prob
    graph = Graph.from_edges(config.n, np.column_stack([rows[keep], cols[keep]]))
    return graph, PlantedPartition(labels, theta)


def generate_features(truth: PlantedPartition, mu: float, p: int = 1, seed=0, generative: bool = False) -> FeatureTable:
    """Gaussian features centred at +mu for community 0 and -mu otherwise.

    Columns go to the assortative block unless ``generative`` is set, in which
    case they are binarized at zero and routed to the generative block.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    rng = np.random.default_rng(seed)
    centre = np.where(truth.labels == 0, mu, -mu)
    values = centre[:, None] + rng.standard_normal((truth.n, p))
    names = tuple(f"x{j}" for j in range(p))
    empty = np.zeros((truth.n, 0))
    if generative:
        return FeatureTable(empty, binarize(values), f_names=names)
    return FeatureTable(values, empty, s_names=names)


def expected_edge_count(config: SynthConfig) -> tuple:
    """Analytic mean and variance of the edge count, by pair class."""
    b, h = config.block_size, config.hubs_per_block
    counts = {"hub": h, "normal": b - h}
    thetas = {"hub": config.theta_hub, "normal": config.theta_normal}
    c = config.communities
    mean = var = 0.0
    kinds = ("hub", "normal")
    for i, a in enumerate(kinds):
        for bkind in kinds[i:]:
            if a == bkind:
                within = c * counts[a] * (counts[a] - 1) / 2
                across = c * (c - 1) / 2 * counts[a] ** 2
            else:
                within = c * counts[a] * counts[bkind]
                across = c * (c - 1) * counts[a] * counts[bkind]
            for pairs, scale in ((within, 1.0), (across, config.r)):
                p = min(1.0, config.beta_in * scale * thetas[a] * thetas[bkind])
                mean += pairs * p
                var += pairs * p * (1 - p)
    return mean, var


def write_ground_truth(truth_labels, path, node_labels=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u, c in enumerate(truth_labels):
            node = node_labels[u] if node_labels is not None else u
            fh.write(f"{node}\t{int(c)}\n")
