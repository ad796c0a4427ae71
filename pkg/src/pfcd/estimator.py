"""scikit-learn style wrapper around the block coordinate ascent fit."""

from __future__ import annotations

from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .extraction import feature_influence_report, hard_labels, threshold_memberships
from .learner import FitConfig, fit
from .model import ModelParams, log_likelihood
from .validation import check_features, check_graph


class PFCD(ClusterMixin, TransformerMixin, BaseEstimator):
    """Overlapping community detection from structure and node features.

    ``X`` is the network: a :class:`~pfcd.graph.Graph`, a square dense array
    or a scipy sparse adjacency matrix.  Assortative features ``S`` are
    real-valued; generative features ``F`` must be binary.  Leaving both out
    gives the structure-only fit.

    Parameters
    ----------
    n_communities : int
    alpha : float
        Gradient step (the maximal step when ``backtrack`` is on).
    ll_threshold : float
        Stop once the absolute log-likelihood change falls to this value.
    max_iter : int
    sweep : {"gauss-seidel", "jacobi"}
    coupling : {"tied", "free"}
        With assortative features, "tied" keeps ``M = sigmoid(S I)`` so the
        features steer the communities; "free" fits ``M`` directly.
    backtrack : bool
        Halve steps that fail a sufficient-increase test.
    random_state : int

    Attributes
    ----------
    membership_ : ndarray of shape (n_nodes, n_communities)
    labels_ : ndarray of shape (n_nodes,)
        Argmax community per node.
    communities_ : CommunityAssignment
        Overlapping assignment by the above-column-mean rule.
    beta_, assortative_weights_, generative_weights_ : ndarray
    ll_trace_ : list of float
    n_iter_ : int
    converged_ : bool
    """

    def __init__(self, n_communities=2, alpha=0.001, ll_threshold=0.001, max_iter=1000,
                 sweep="gauss-seidel", coupling="tied", backtrack=True, random_state=0):
        self.n_communities = n_communities
        self.alpha = alpha
        self.ll_threshold = ll_threshold
        self.max_iter = max_iter
        self.sweep = sweep
        self.coupling = coupling
        self.backtrack = backtrack
        self.random_state = random_state

    def _config(self) -> FitConfig:
        seed = self.random_state if self.random_state is not None else 0
        return FitConfig(
            k=self.n_communities, alpha=self.alpha, ll_threshold=self.ll_threshold,
            max_iters=self.max_iter, seed=int(seed), sweep=self.sweep, backtrack=self.backtrack,
            coupling=self.coupling,
        )

    def fit(self, X, y=None, S=None, F=None, s_names=(), f_names=()):
        graph = check_graph(X)
        features = check_features(graph.n, S, F, s_names, f_names)
        result = fit(graph, features, self._config())
        p = result.params
        self.graph_ = graph
        self.features_ = features
        self.membership_ = p.M
        self.beta_ = p.beta
        self.assortative_weights_ = p.I
        self.generative_weights_ = p.W
        self.ll_trace_ = result.ll_trace
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        self.labels_ = hard_labels(p.M)
        self.communities_ = threshold_memberships(p.M)
        return self

    def fit_predict(self, X, y=None, S=None, F=None, **kwargs):
        return self.fit(X, y, S=S, F=F, **kwargs).labels_

    def fit_transform(self, X, y=None, S=None, F=None, **kwargs):
        return self.fit(X, y, S=S, F=F, **kwargs).membership_

    def transform(self, X=None):
        """Membership matrix of the fitted network.

        The model is transductive; ``X`` must be the fitted graph (or None).
        """
        check_is_fitted(self, "membership_")
        if X is not None and check_graph(X).n != self.membership_.shape[0]:
            raise ValueError("transform only applies to the network passed to fit")
        return self.membership_

    @property
    def params_(self) -> ModelParams:
        check_is_fitted(self, "membership_")
        return ModelParams(self.membership_, self.beta_, self.assortative_weights_, self.generative_weights_)

    def score(self, X=None, y=None):
        """Log-likelihood of the fitted network under the fitted parameters."""
        check_is_fitted(self, "membership_")
        return log_likelihood(self.graph_, self.features_.F, self.params_)

    def feature_influence(self) -> list:
        check_is_fitted(self, "membership_")
        return feature_influence_report(self.params_, self.features_.s_names, self.features_.f_names)
