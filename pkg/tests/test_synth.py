import numpy as np
import pytest

from oracles import EXPECTED_EDGES, class_rates
from pfcd import SynthConfig, generate_features, generate_network
from pfcd.synth import expected_edge_count

def test_zero_rate_gives_empty_graph():
    G, _ = generate_network(SynthConfig(n=20, beta_in=0.0, r=0.7))
    assert G.m == 0


def test_saturated_rates_give_complete_graph():
    G, _ = generate_network(SynthConfig(n=4, beta_in=1.0, r=1.0, hub_fraction=0.0))
    assert G.m == 6


@pytest.mark.parametrize("n", [1000, 2000])
def test_expected_edge_count_matches_dense_oracle(n):
    mean, var = expected_edge_count(SynthConfig(n=n))
    assert mean == pytest.approx(EXPECTED_EDGES[n][0], rel=1e-12)
    assert var == pytest.approx(EXPECTED_EDGES[n][1], rel=1e-12)


@pytest.mark.parametrize("seed", [0, 7])
def test_edge_count_within_three_sigma(seed):
    G, _ = generate_network(SynthConfig(n=1000, seed=seed))
    mean, var = EXPECTED_EDGES[1000]
    assert abs(G.m - mean) <= 3 * var ** 0.5


def test_class_densities_at_n2000():
    config = SynthConfig(n=2000, seed=1)
    G, truth = generate_network(config)
    for key, (rate, p) in class_rates(G, truth, config).items():
        assert rate == pytest.approx(p, rel=0.10), key


def test_hubs_have_higher_degree():
    G, truth = generate_network(SynthConfig(n=1000, seed=2))
    deg = G.degrees()
    assert deg[truth.is_hub].mean() > 2 * deg[~truth.is_hub].mean()
    assert truth.is_hub.sum() == 100
    for c in range(2):
        assert np.sum(truth.is_hub & (truth.labels == c)) == 50


def test_graph_invariants():
    G, _ = generate_network(SynthConfig(n=200, seed=5))
    assert G.degrees().sum() == 2 * G.m
    for u in range(G.n):
        assert u not in G.neighbors(u)


def test_generation_deterministic():
    a, ta = generate_network(SynthConfig(n=100, seed=3))
    b, tb = generate_network(SynthConfig(n=100, seed=3))
    np.testing.assert_array_equal(a.edges(), b.edges())
    np.testing.assert_array_equal(ta.labels, tb.labels)


@pytest.mark.parametrize("bad", [dict(n=999), dict(beta_in=1.5), dict(r=0.0), dict(hub_fraction=2.0), dict(p=0)])
def test_config_invariants(bad):
    with pytest.raises(ValueError):
        SynthConfig(**bad)


def test_features_without_signal():
    _, truth = generate_network(SynthConfig(n=1000, seed=0))
    S = generate_features(truth, 0.0, 1, seed=0).S[:, 0]
    assert abs(S[truth.labels == 0].mean() - S[truth.labels == 1].mean()) < 0.2


def test_features_strong_signal():
    _, truth = generate_network(SynthConfig(n=1000, seed=0))
    S = generate_features(truth, 5.0, 1, seed=0).S[:, 0]
    accuracy = np.mean((S > 0) == (truth.labels == 0))
    assert accuracy > 0.999


def test_features_deterministic_and_generative_routing():
    _, truth = generate_network(SynthConfig(n=50, seed=0))
    a = generate_features(truth, 2.0, 3, seed=4)
    b = generate_features(truth, 2.0, 3, seed=4)
    np.testing.assert_array_equal(a.S, b.S)
    g = generate_features(truth, 2.0, 3, seed=4, generative=True)
    assert g.S.shape == (50, 0)
    np.testing.assert_array_equal(g.F, (a.S > 0).astype(float))
