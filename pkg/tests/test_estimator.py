import numpy as np
import pytest
from scipy import sparse
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from oracles import two_cliques
from pfcd import PFCD, nmi


def test_params_round_trip_through_clone():
    est = PFCD(n_communities=3, alpha=0.01, coupling="free")
    params = clone(est).get_params()
    assert params["n_communities"] == 3 and params["alpha"] == 0.01 and params["coupling"] == "free"


@pytest.mark.parametrize("as_input", [lambda G: G, lambda G: G.to_scipy(), lambda G: G.to_scipy().toarray()])
def test_fit_predict_on_cliques(as_input):
    G, truth = two_cliques()
    labels = PFCD(n_communities=2).fit_predict(as_input(G))
    assert nmi(labels, truth) == 1.0


def test_fitted_attributes_and_score():
    G, truth = two_cliques()
    S = np.where(truth == 0, 1.0, -1.0)
    est = PFCD(n_communities=2, max_iter=50).fit(G, S=S, s_names=["side"])
    assert est.membership_.shape == (10, 2)
    assert est.assortative_weights_.shape == (1, 2)
    assert len(est.ll_trace_) == est.n_iter_ + 1
    assert est.score() == pytest.approx(est.ll_trace_[-1])
    assert {row[0] for row in est.feature_influence()} == {"side"}
    np.testing.assert_array_equal(est.transform(G), est.membership_)
    assert est.communities_.covers_all()


def test_transform_is_transductive():
    G, _ = two_cliques()
    est = PFCD().fit(G)
    with pytest.raises(ValueError):
        est.transform(np.zeros((3, 3)))


def test_unfitted():
    with pytest.raises(NotFittedError):
        PFCD().transform(None)


def test_input_validation():
    with pytest.raises(ValueError, match="square"):
        PFCD().fit(np.zeros((3, 4)))
    G, _ = two_cliques()
    with pytest.raises(ValueError, match="0 and 1"):
        PFCD().fit(G, F=np.full((10, 1), 0.5))
    with pytest.raises(ValueError, match="rows"):
        PFCD().fit(G, S=np.zeros((4, 1)))
    with pytest.raises(ValueError):
        PFCD().fit(sparse.csr_matrix(np.array([[0, np.nan], [np.nan, 0]])))
