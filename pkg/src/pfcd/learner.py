"""Block coordinate ascent for the membership/feature model.

Each outer iteration updates memberships, then the generative weights ``W``
and the interaction matrix ``beta``, one gradient step per block.

Memberships are handled in one of two ways when assortative features are
present.  With ``coupling="tied"`` (the default) ``M = sigmoid(S I)`` holds
throughout and the structural gradient reaches ``I`` by the chain rule, so
features shape the communities.  With ``coupling="free"`` ``M`` is a free
block swept node by node and ``I`` only follows it.  Without assortative
features ``M`` is always free.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit
from sklearn.linear_model import LogisticRegression

from ._kernels import gauss_seidel_sweep
from .graph import FeatureTable, Graph
from .model import (
    AFFINITY_FLOOR,
    ModelParams,
    edge_affinities,
    NumericalDomainError,
    feature_log_likelihood,
    log1mexp,
    log_likelihood,
    structure_log_likelihood,
)

logger = logging.getLogger(__name__)

SWEEPS = ("gauss-seidel", "jacobi")
COUPLINGS = ("tied", "free")

# sufficient-increase constant for the step-halving safeguard
ARMIJO = 1e-4


@dataclass(frozen=True)
class FitConfig:
    k: int
    alpha: float = 0.001
    ll_threshold: float = 0.001
    max_iters: int = 1000
    seed: int = 0
    sweep: str = "gauss-seidel"
    backtrack: bool = True
    max_halvings: int = 30
    coupling: str = "tied"

    def __post_init__(self):
        if int(self.k) < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not self.ll_threshold > 0:
            raise ValueError(f"ll_threshold must be > 0, got {self.ll_threshold}")
        if int(self.max_iters) < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if int(self.max_halvings) < 0:
            raise ValueError(f"max_halvings must be >= 0, got {self.max_halvings}")
        if self.sweep not in SWEEPS:
            raise ValueError(f"sweep must be one of {SWEEPS}, got {self.sweep!r}")
        if self.coupling not in COUPLINGS:
            raise ValueError(f"coupling must be one of {COUPLINGS}, got {self.coupling!r}")


@dataclass
class FitResult:
    params: ModelParams
    ll_trace: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False

    @property
    def stop_reason(self) -> str:
        return "ll_threshold" if self.converged else "max_iters"


class FitDivergedError(NumericalDomainError):
    """The log-likelihood became non-finite during fitting."""

    def __init__(self, message, iteration, params):
        super().__init__(message)
        self.iteration = iteration
        self.params = params


def edge_ratio(x):
    """``exp(-x) / (1 - exp(-x))`` with ``x`` floored at the affinity guard."""
    return 1.0 / np.expm1(np.maximum(x, AFFINITY_FLOOR))


def neighborhood_conductance(G: Graph) -> np.ndarray:
    """Conductance of every closed neighborhood ``{u} + N(u)``.

    Neighborhoods with an empty side (zero volume on either side) get 1.
    """
    A = G.to_scipy()
    deg = G.degrees().astype(float)
    triangles = np.asarray((A @ A).multiply(A).sum(axis=1)).ravel() / 2.0
    vol = deg + np.asarray(A @ deg).ravel()
    internal = deg + triangles
    cut = vol - 2.0 * internal
    denom = np.minimum(vol, 2.0 * G.m - vol)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(denom > 0, cut / denom, 1.0)
    return phi


def _pick_seeds(G: Graph, k: int) -> list:
    phi = neighborhood_conductance(G)
    order = np.lexsort((np.arange(G.n), phi))
    seeds, covered = [], np.zeros(G.n, dtype=bool)
    for u in order:
        if len(seeds) == k:
            break
        if not covered[u]:
            seeds.append(int(u))
            covered[u] = True
            covered[G.neighbors(u)] = True
    # too few uncovered centres: fall back to the best remaining ones
    for u in order:
        if len(seeds) == k:
            break
        if int(u) not in seeds:
            seeds.append(int(u))
    return seeds


def initialize(G: Graph, S, k: int, seed=0, n_generative: int = 0) -> ModelParams:
    """Seed memberships from the ``k`` lowest-conductance closed neighborhoods.

    Centres are taken in order of conductance, skipping any node already
    inside a chosen neighborhood.  Nodes outside a seed neighborhood get
    uniform noise in [0, 0.1].
    """
    if k > G.n:
        raise ValueError(f"k={k} exceeds the number of nodes {G.n}")
    S = np.asarray(S, dtype=float).reshape(G.n, -1)
    rng = np.random.default_rng(seed)
    M = rng.uniform(0.0, 0.1, size=(G.n, k))
    for c, u in enumerate(_pick_seeds(G, k)):
        M[u, c] = 1.0
        M[G.neighbors(u), c] = 1.0
    beta = np.full((k, k), 0.05)
    np.fill_diagonal(beta, 1.0)
    return ModelParams(M, beta, np.zeros((S.shape[1], k)), np.zeros((n_generative, k)))


def fit_assortative_link(S, M) -> np.ndarray:
    """Weights ``I`` for which ``sigmoid(S I)`` best separates each column's
    high-membership nodes (``M >= 0.5``), by no-intercept logistic regression.

    Columns whose indicator has a single class get zero weights.
    """
    S = np.asarray(S, dtype=float)
    M = np.asarray(M, dtype=float)
    I = np.zeros((S.shape[1], M.shape[1]))
    for c in range(M.shape[1]):
        y = M[:, c] >= 0.5
        if y.all() or not y.any():
            continue
        clf = LogisticRegression(fit_intercept=False, max_iter=1000)
        I[:, c] = clf.fit(S, y).coef_[0]
    return I


def grad_membership(u: int, G: Graph, F, params: ModelParams, total=None) -> np.ndarray:
    """Gradient of the log-likelihood with respect to row ``u`` of ``M``.

    ``total`` is the cached column sum of ``M``; non-neighbours enter only
    through it, so the cost is O(deg(u) k + k^2 + |F| k).
    """
    M, beta = params.M, params.beta
    if total is None:
        total = M.sum(axis=0)
    Mn = M[G.neighbors(u)]
    x = Mn @ (beta @ M[u])
    # sum_{v in N(u)} (ratio_v + 1) Mv  -  sum_{v != u} Mv
    g = beta @ (Mn.T @ (edge_ratio(x) + 1.0) - (total - M[u]))
    if params.W.shape[0]:
        Fu = np.asarray(F[u], dtype=float)
        g += params.W.T @ (Fu - expit(params.W @ M[u]))
    return g


def membership_gradient(G: Graph, F, params: ModelParams) -> np.ndarray:
    """Gradient with respect to all of ``M`` at once, shape (n, k)."""
    M, beta = params.M, params.beta
    F = np.asarray(F, dtype=float).reshape(G.n, -1)
    e = G.edges()
    w = edge_ratio(edge_affinities(G, M, beta)) + 1.0
    acc = M - M.sum(axis=0)
    for c in range(M.shape[1]):
        acc[:, c] += np.bincount(e[:, 0], weights=w * M[e[:, 1], c], minlength=G.n)
        acc[:, c] += np.bincount(e[:, 1], weights=w * M[e[:, 0], c], minlength=G.n)
    g = acc @ beta  # beta symmetric
    if params.W.shape[0]:
        g += (F - expit(M @ params.W.T)) @ params.W
    return g


def update_membership(row, grad, alpha: float) -> np.ndarray:
    """Projected ascent step ``max(0, row + alpha * grad)``."""
    return np.maximum(0.0, np.asarray(row, float) + alpha * np.asarray(grad, float))


def assortative_gradient(G: Graph, S, F, params: ModelParams, membership_grad=None) -> np.ndarray:
    """Chain-rule gradient for ``I`` through the sigmoid membership link.

    ``membership_grad`` defaults to the gradient at the current ``M``.
    """
    S = np.asarray(S, dtype=float).reshape(G.n, -1)
    if S.shape[1] == 0:
        return np.zeros_like(params.I)
    if membership_grad is None:
        membership_grad = membership_gradient(G, F, params)
    sig = expit(S @ params.I)
    return S.T @ (membership_grad * sig * (1.0 - sig))


def update_assortative_weights(G: Graph, S, F, params: ModelParams, alpha: float) -> np.ndarray:
    return params.I + alpha * assortative_gradient(G, S, F, params)


def generative_gradient(F, params: ModelParams) -> np.ndarray:
    F = np.asarray(F, dtype=float).reshape(params.n, -1)
    if F.shape[1] == 0:
        return np.zeros_like(params.W)
    return (F - expit(params.M @ params.W.T)).T @ params.M


def update_generative_weights(F, params: ModelParams, alpha: float) -> np.ndarray:
    return params.W + alpha * generative_gradient(F, params)


def beta_gradient(G: Graph, params: ModelParams) -> np.ndarray:
    """Symmetric gradient of the log-likelihood with respect to ``beta``.

    Entry ``(i, j)`` is the derivative along the symmetric direction
    ``(E_ij + E_ji) / 2``, so a symmetric step keeps ``beta`` symmetric.
    """
    M, beta = params.M, params.beta
    e = G.edges()
    Mu, Mv = M[e[:, 0]], M[e[:, 1]]
    w = edge_ratio(edge_affinities(G, M, beta)) + 1.0
    edge_part = (Mu * w[:, None]).T @ Mv
    edge_part = 0.5 * (edge_part + edge_part.T)
    total = M.sum(axis=0)
    all_pairs = 0.5 * (np.outer(total, total) - M.T @ M)
    return edge_part - all_pairs


def update_beta(G: Graph, params: ModelParams, alpha: float) -> np.ndarray:
    step = params.beta + alpha * beta_gradient(G, params)
    return np.maximum(0.0, 0.5 * (step + step.T))


def _safeguarded_step(objective, current, grad, alpha, project, max_halvings):
    """Largest step ``alpha / 2**j`` whose projection passes the Armijo test.

    Returns ``current`` unchanged when every trial step fails.
    """
    base = objective(current)
    step = alpha
    for _ in range(max_halvings + 1):
        trial = project(current + step * grad)
        if objective(trial) >= base + ARMIJO * float(np.sum(grad * (trial - current))):
            return trial
        step *= 0.5
    return current


def _project_nonnegative(x):
    return np.maximum(0.0, x)


def _project_beta(b):
    return np.maximum(0.0, 0.5 * (b + b.T))


def _identity(x):
    return x


def _sweep_gauss_seidel(G: Graph, F, params: ModelParams, config: FitConfig) -> None:
    gauss_seidel_sweep(
        G.indptr, G.indices, params.M, params.beta, params.W, np.ascontiguousarray(F, dtype=float),
        config.alpha, config.backtrack, config.max_halvings, ARMIJO, AFFINITY_FLOOR,
    )


def _sweep_jacobi(G: Graph, F, params: ModelParams, config: FitConfig) -> None:
    g = membership_gradient(G, F, params)
    if config.backtrack:

        def objective(M):
            return structure_log_likelihood(G, M, params.beta) + feature_log_likelihood(F, M, params.W)

        params.M = _safeguarded_step(
            objective, params.M, g, config.alpha, _project_nonnegative, config.max_halvings
        )
    else:
        params.M = update_membership(params.M, g, config.alpha)


def _step_assortative_tied(G: Graph, S, F, params: ModelParams, config: FitConfig) -> None:
    gI = assortative_gradient(G, S, F, params)
    if config.backtrack:

        def objective(I):
            M = expit(S @ I)
            return structure_log_likelihood(G, M, params.beta) + feature_log_likelihood(F, M, params.W)

        params.I = _safeguarded_step(objective, params.I, gI, config.alpha, _identity, config.max_halvings)
    else:
        params.I = params.I + config.alpha * gI
    params.M = expit(S @ params.I)


def _step_generative(F, params: ModelParams, config: FitConfig) -> None:
    if not config.backtrack:
        params.W = update_generative_weights(F, params, config.alpha)
        return
    params.W = _safeguarded_step(
        lambda W: feature_log_likelihood(F, params.M, W),
        params.W, generative_gradient(F, params), config.alpha, _identity, config.max_halvings,
    )


def _step_beta(G: Graph, params: ModelParams, config: FitConfig) -> None:
    if not config.backtrack:
        params.beta = update_beta(G, params, config.alpha)
        return
    # with M fixed the structural log-likelihood is sum_e log1mexp(<P_e, beta>)
    # plus a linear term in beta
    M, k = params.M, params.k
    e = G.edges()
    pair = (M[e[:, 0], :, None] * M[e[:, 1], None, :]).reshape(-1, k * k)
    total = M.sum(axis=0)
    linear = pair.sum(axis=0) - 0.5 * (np.outer(total, total) - M.T @ M).ravel()

    def objective(b):
        return float(np.sum(log1mexp(np.maximum(pair @ b.ravel(), AFFINITY_FLOOR)))) + float(linear @ b.ravel())

    params.beta = _safeguarded_step(
        objective, params.beta, beta_gradient(G, params), config.alpha, _project_beta, config.max_halvings,
    )


def fit(G: Graph, features: FeatureTable | None, config: FitConfig, init: ModelParams | None = None) -> FitResult:
    """Run block coordinate ascent until the log-likelihood change drops to
    ``config.ll_threshold`` or ``config.max_iters`` iterations have run.

    With ``config.backtrack`` (the default) each block step starts at
    ``alpha`` and is halved until it passes an Armijo sufficient-increase
    test, so the likelihood never decreases.  ``backtrack=False`` takes the
    plain fixed step, which can diverge on large dense graphs.

    A supplied ``init`` is used as given, except that under tied coupling
    its ``M`` is replaced by ``sigmoid(S I)``.
    """
    if features is None:
        features = FeatureTable.empty(G.n)
    if features.n != G.n:
        raise ValueError(f"features have {features.n} rows, graph has {G.n} nodes")
    S, F = features.S, features.F
    tied = config.coupling == "tied" and S.shape[1] > 0
    if init is not None:
        params = init.copy()
    else:
        params = initialize(G, S, config.k, config.seed, F.shape[1])
        if tied:
            # I = 0 is a stationary point of the tied objective, so start from
            # the weights that best reproduce the seeded memberships
            params.I = fit_assortative_link(S, params.M)
    params.check_shapes(G.n, S.shape[1], F.shape[1])
    if tied:
        params.M = expit(S @ params.I)
    sweep = _sweep_gauss_seidel if config.sweep == "gauss-seidel" else _sweep_jacobi

    result = FitResult(params, [log_likelihood(G, F, params)])
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for it in range(1, config.max_iters + 1):
            if tied:
                _step_assortative_tied(G, S, F, params, config)
            else:
                sweep(G, F, params, config)
                if S.shape[1]:
                    params.I = update_assortative_weights(G, S, F, params, config.alpha)
            if F.shape[1]:
                _step_generative(F, params, config)
            _step_beta(G, params, config)
            try:
                ll = log_likelihood(G, F, params)
            except NumericalDomainError as exc:
                logger.error("iteration %d diverged; params dump:\n%s", it, params)
                raise FitDivergedError(str(exc), it, params.copy()) from exc
            result.ll_trace.append(ll)
            result.iterations = it
            if abs(ll - result.ll_trace[-2]) <= config.ll_threshold:
                result.converged = True
                break
    logger.info(
        "fit stopped after %d iterations (%s), ll=%.6f",
        result.iterations, result.stop_reason, result.ll_trace[-1],
    )
    return result
