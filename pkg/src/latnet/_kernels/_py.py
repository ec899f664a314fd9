"""Pure-numpy fallback for the per-sweep hot kernels.

Semantics (including the sequential scan order of the Metropolis and Gibbs
updates and the random-number consumption contract) are identical to the
compiled backend; only speed differs.
"""

import numpy as np


def _log1pexp(x):
    return np.logaddexp(0.0, x)


def _bern_loglik(y, logits):
    return y * logits - _log1pexp(logits)


# -- distance model ---------------------------------------------------------

def dist_loglik_dyads(adj, U, zeta, di, dj):
    d = np.linalg.norm(U[di] - U[dj], axis=1)
    return _bern_loglik(adj[di, dj], zeta - d)


def dist_update_positions(adj, mask, U, zeta, sigma2, steps, znorm, logu):
    n = U.shape[0]
    accepted = np.zeros(n, dtype=bool)
    for i in range(n):
        prop = U[i] + steps[i] * znorm[i]
        row = mask[i].view(np.bool_)
        d_cur = np.linalg.norm(U[row] - U[i], axis=1)
        d_prop = np.linalg.norm(U[row] - prop, axis=1)
        y = adj[i, row]
        delta = (_bern_loglik(y, zeta - d_prop) - _bern_loglik(y, zeta - d_cur)).sum()
        delta -= (prop @ prop - U[i] @ U[i]) / (2.0 * sigma2)
        if logu[i] < delta:
            U[i] = prop
            accepted[i] = True
    return accepted


# -- eigen model ------------------------------------------------------------

def eigen_loglik_dyads(adj, U, lam, zeta, di, dj):
    q = np.einsum("mk,mk->m", U[di] * lam, U[dj])
    return _bern_loglik(adj[di, dj], zeta + q)


def eigen_update_positions(adj, mask, U, lam, zeta, sigma2, steps, znorm, logu):
    n = U.shape[0]
    accepted = np.zeros(n, dtype=bool)
    for i in range(n):
        prop = U[i] + steps[i] * znorm[i]
        row = mask[i].view(np.bool_)
        q_cur = U[row] @ (lam * U[i])
        q_prop = U[row] @ (lam * prop)
        y = adj[i, row]
        delta = (_bern_loglik(y, zeta + q_prop) - _bern_loglik(y, zeta + q_cur)).sum()
        delta -= (prop @ prop - U[i] @ U[i]) / (2.0 * sigma2)
        if logu[i] < delta:
            U[i] = prop
            accepted[i] = True
    return accepted


def eigen_update_lambda(adj, U, lam, zeta, kappa2, steps, zk, logu, di, dj):
    k_dim = lam.shape[0]
    accepted = np.zeros(k_dim, dtype=bool)
    y = adj[di, dj]
    logits = zeta + np.einsum("mk,mk->m", U[di] * lam, U[dj])
    for k in range(k_dim):
        prop = lam[k] + steps[k] * zk[k]
        c = U[di, k] * U[dj, k]
        logits_prop = logits + (prop - lam[k]) * c
        delta = (_bern_loglik(y, logits_prop) - _bern_loglik(y, logits)).sum()
        delta -= (prop * prop - lam[k] * lam[k]) / (2.0 * kappa2)
        if logu[k] < delta:
            lam[k] = prop
            logits = logits_prop
            accepted[k] = True
    return accepted


# -- class model ------------------------------------------------------------

def class_block_stats(adj, xi, n_classes, di, dj):
    a = np.minimum(xi[di], xi[dj])
    b = np.maximum(xi[di], xi[dj])
    s = np.zeros((n_classes, n_classes))
    n = np.zeros((n_classes, n_classes))
    np.add.at(s, (a, b), adj[di, dj])
    np.add.at(n, (a, b), 1.0)
    return s, n


def class_gibbs_labels(adj, mask, xi, eta_full, log_omega, uniforms):
    n = xi.shape[0]
    for i in range(n):
        row = mask[i].view(np.bool_)
        logits = eta_full[:, xi[row]]  # (K, n_obs)
        y = adj[i, row]
        w = log_omega + (y * logits - _log1pexp(logits)).sum(axis=1)
        w -= w.max()
        p = np.exp(w)
        cdf = np.cumsum(p)
        k = np.searchsorted(cdf, uniforms[i] * cdf[-1], side="right")
        xi[i] = min(k, log_omega.shape[0] - 1)


def class_loglik_dyads(adj, xi, eta_full, di, dj):
    logits = eta_full[np.minimum(xi[di], xi[dj]), np.maximum(xi[di], xi[dj])]
    return _bern_loglik(adj[di, dj], logits)
