"""Compiled inner loop for the sequential membership sweep."""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _log1mexp(x):
    if x < 0.6931471805599453:
        return math.log(-math.expm1(-x))
    return math.log1p(-math.exp(-x))


@njit(cache=True)
def _softplus(z):
    return max(z, 0.0) + math.log1p(math.exp(-abs(z)))


@njit(cache=True)
def _node_objective(row, B, rest, W, Fu, floor):
    ll = 0.0
    for i in range(B.shape[0]):
        x = 0.0
        for c in range(row.shape[0]):
            x += B[i, c] * row[c]
        ll += _log1mexp(max(x, floor)) + x
    for c in range(row.shape[0]):
        ll -= row[c] * rest[c]
    for f in range(W.shape[0]):
        z = 0.0
        for c in range(row.shape[0]):
            z += W[f, c] * row[c]
        ll -= Fu[f] * _softplus(-z) + (1.0 - Fu[f]) * _softplus(z)
    return ll


@njit(cache=True)
def gauss_seidel_sweep(indptr, indices, M, beta, W, F, alpha, backtrack, max_halvings, armijo, floor):
    """Update every row of ``M`` in place, in ascending node order.

    Returns the total number of step halvings taken.
    """
    n, k = M.shape
    total = np.zeros(k)
    for u in range(n):
        for c in range(k):
            total[c] += M[u, c]
    halvings = 0
    Mu = np.empty(k)
    g = np.empty(k)
    rest = np.empty(k)
    trial = np.empty(k)
    for u in range(n):
        start, stop = indptr[u], indptr[u + 1]
        d = stop - start
        for c in range(k):
            Mu[c] = M[u, c]
        # B[i] = beta @ M[v_i];  rest = beta @ (total - Mu)
        B = np.zeros((d, k))
        for i in range(d):
            v = indices[start + i]
            for a in range(k):
                s = 0.0
                for b in range(k):
                    s += beta[a, b] * M[v, b]
                B[i, a] = s
        for a in range(k):
            s = 0.0
            for b in range(k):
                s += beta[a, b] * (total[b] - Mu[b])
            rest[a] = s
            g[a] = -s
        for i in range(d):
            x = 0.0
            for c in range(k):
                x += B[i, c] * Mu[c]
            w = 1.0 / math.expm1(max(x, floor)) + 1.0
            for c in range(k):
                g[c] += w * B[i, c]
        Fu = F[u]
        for f in range(W.shape[0]):
            z = 0.0
            for c in range(k):
                z += W[f, c] * Mu[c]
            resid = Fu[f] - 1.0 / (1.0 + math.exp(-z))
            for c in range(k):
                g[c] += resid * W[f, c]

        step = alpha
        accepted = False
        if backtrack:
            base = _node_objective(Mu, B, rest, W, Fu, floor)
            for _ in range(max_halvings + 1):
                inc = 0.0
                for c in range(k):
                    trial[c] = max(0.0, Mu[c] + step * g[c])
                    inc += g[c] * (trial[c] - Mu[c])
                val = _node_objective(trial, B, rest, W, Fu, floor)
                if val >= base + armijo * inc:
                    accepted = True
                    break
                step *= 0.5
                halvings += 1
        else:
            for c in range(k):
                trial[c] = max(0.0, Mu[c] + step * g[c])
            accepted = True
        if accepted:
            for c in range(k):
                total[c] += trial[c] - Mu[c]
                M[u, c] = trial[c]
    return halvings
