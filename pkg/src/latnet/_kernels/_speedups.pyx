# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-sweep kernels; mirrors the pure-python backend exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, log1p, sqrt

cnp.import_array()


cdef inline double _log1pexp(double x) nogil:
    if x > 0.0:
        return x + log1p(exp(-x))
    return log1p(exp(x))


cdef inline double _bern(double y, double logit) nogil:
    return y * logit - _log1pexp(logit)


# -- distance model ---------------------------------------------------------

def dist_loglik_dyads(const double[:, ::1] adj, double[:, ::1] U, double zeta,
                      long[::1] di, long[::1] dj):
    cdef Py_ssize_t m = di.shape[0], K = U.shape[1], t, k
    cdef double d, diff
    out_arr = np.empty(m)
    cdef double[::1] out = out_arr
    with nogil:
        for t in range(m):
            d = 0.0
            for k in range(K):
                diff = U[di[t], k] - U[dj[t], k]
                d += diff * diff
            out[t] = _bern(adj[di[t], dj[t]], zeta - sqrt(d))
    return out_arr


def dist_update_positions(const double[:, ::1] adj, cnp.uint8_t[:, ::1] mask,
                          double[:, ::1] U, double zeta, double sigma2,
                          double[::1] steps, double[:, ::1] znorm,
                          double[::1] logu):
    cdef Py_ssize_t n = U.shape[0], K = U.shape[1], i, j, k
    cdef double delta, d_cur, d_prop, diff, pn, cn
    acc_arr = np.zeros(n, dtype=bool)
    cdef cnp.uint8_t[::1] acc = acc_arr.view(np.uint8)
    prop_arr = np.empty(K)
    cdef double[::1] prop = prop_arr
    with nogil:
        for i in range(n):
            pn = 0.0
            cn = 0.0
            for k in range(K):
                prop[k] = U[i, k] + steps[i] * znorm[i, k]
                pn += prop[k] * prop[k]
                cn += U[i, k] * U[i, k]
            delta = -(pn - cn) / (2.0 * sigma2)
            for j in range(n):
                if not mask[i, j]:
                    continue
                d_cur = 0.0
                d_prop = 0.0
                for k in range(K):
                    diff = U[i, k] - U[j, k]
                    d_cur += diff * diff
                    diff = prop[k] - U[j, k]
                    d_prop += diff * diff
                delta += _bern(adj[i, j], zeta - sqrt(d_prop)) \
                    - _bern(adj[i, j], zeta - sqrt(d_cur))
            if logu[i] < delta:
                for k in range(K):
                    U[i, k] = prop[k]
                acc[i] = 1
    return acc_arr


# -- eigen model ------------------------------------------------------------

def eigen_loglik_dyads(const double[:, ::1] adj, double[:, ::1] U, double[::1] lam,
                       double zeta, long[::1] di, long[::1] dj):
    cdef Py_ssize_t m = di.shape[0], K = U.shape[1], t, k
    cdef double q
    out_arr = np.empty(m)
    cdef double[::1] out = out_arr
    with nogil:
        for t in range(m):
            q = 0.0
            for k in range(K):
                q += lam[k] * U[di[t], k] * U[dj[t], k]
            out[t] = _bern(adj[di[t], dj[t]], zeta + q)
    return out_arr


def eigen_update_positions(const double[:, ::1] adj, cnp.uint8_t[:, ::1] mask,
                           double[:, ::1] U, double[::1] lam, double zeta,
                           double sigma2, double[::1] steps,
                           double[:, ::1] znorm, double[::1] logu):
    cdef Py_ssize_t n = U.shape[0], K = U.shape[1], i, j, k
    cdef double delta, q_cur, q_prop, pn, cn
    acc_arr = np.zeros(n, dtype=bool)
    cdef cnp.uint8_t[::1] acc = acc_arr.view(np.uint8)
    prop_arr = np.empty(K)
    cdef double[::1] prop = prop_arr
    with nogil:
        for i in range(n):
            pn = 0.0
            cn = 0.0
            for k in range(K):
                prop[k] = U[i, k] + steps[i] * znorm[i, k]
                pn += prop[k] * prop[k]
                cn += U[i, k] * U[i, k]
            delta = -(pn - cn) / (2.0 * sigma2)
            for j in range(n):
                if not mask[i, j]:
                    continue
                q_cur = 0.0
                q_prop = 0.0
                for k in range(K):
                    q_cur += lam[k] * U[i, k] * U[j, k]
                    q_prop += lam[k] * prop[k] * U[j, k]
                delta += _bern(adj[i, j], zeta + q_prop) \
                    - _bern(adj[i, j], zeta + q_cur)
            if logu[i] < delta:
                for k in range(K):
                    U[i, k] = prop[k]
                acc[i] = 1
    return acc_arr


def eigen_update_lambda(const double[:, ::1] adj, double[:, ::1] U, double[::1] lam,
                        double zeta, double kappa2, double[::1] steps,
                        double[::1] zk, double[::1] logu,
                        long[::1] di, long[::1] dj):
    cdef Py_ssize_t m = di.shape[0], K = lam.shape[0], t, k, kk
    cdef double prop, delta, c, q
    acc_arr = np.zeros(K, dtype=bool)
    cdef cnp.uint8_t[::1] acc = acc_arr.view(np.uint8)
    logits_arr = np.empty(m)
    cdef double[::1] logits = logits_arr
    with nogil:
        for t in range(m):
            q = 0.0
            for kk in range(K):
                q += lam[kk] * U[di[t], kk] * U[dj[t], kk]
            logits[t] = zeta + q
        for k in range(K):
            prop = lam[k] + steps[k] * zk[k]
            delta = -(prop * prop - lam[k] * lam[k]) / (2.0 * kappa2)
            for t in range(m):
                c = (prop - lam[k]) * U[di[t], k] * U[dj[t], k]
                delta += _bern(adj[di[t], dj[t]], logits[t] + c) \
                    - _bern(adj[di[t], dj[t]], logits[t])
            if logu[k] < delta:
                for t in range(m):
                    logits[t] += (prop - lam[k]) * U[di[t], k] * U[dj[t], k]
                lam[k] = prop
                acc[k] = 1
    return acc_arr


# -- class model ------------------------------------------------------------

def class_block_stats(const double[:, ::1] adj, long[::1] xi, Py_ssize_t n_classes,
                      long[::1] di, long[::1] dj):
    cdef Py_ssize_t m = di.shape[0], t
    cdef long a, b
    s_arr = np.zeros((n_classes, n_classes))
    n_arr = np.zeros((n_classes, n_classes))
    cdef double[:, ::1] s = s_arr
    cdef double[:, ::1] n = n_arr
    with nogil:
        for t in range(m):
            a = xi[di[t]]
            b = xi[dj[t]]
            if a > b:
                a, b = b, a
            s[a, b] += adj[di[t], dj[t]]
            n[a, b] += 1.0
    return s_arr, n_arr


def class_gibbs_labels(const double[:, ::1] adj, cnp.uint8_t[:, ::1] mask,
                       long[::1] xi, double[:, ::1] eta_full,
                       double[::1] log_omega, double[::1] uniforms):
    cdef Py_ssize_t n = xi.shape[0], K = log_omega.shape[0], i, j, k
    cdef double wmax, total, target, cum, logit
    w_arr = np.empty(K)
    cdef double[::1] w = w_arr
    with nogil:
        for i in range(n):
            for k in range(K):
                w[k] = log_omega[k]
            for j in range(n):
                if not mask[i, j]:
                    continue
                for k in range(K):
                    logit = eta_full[k, xi[j]]
                    w[k] += adj[i, j] * logit - _log1pexp(logit)
            wmax = w[0]
            for k in range(1, K):
                if w[k] > wmax:
                    wmax = w[k]
            total = 0.0
            for k in range(K):
                w[k] = exp(w[k] - wmax)
                total += w[k]
            target = uniforms[i] * total
            cum = 0.0
            xi[i] = K - 1
            for k in range(K):
                cum += w[k]
                if cum > target:
                    xi[i] = k
                    break
    return None


def class_loglik_dyads(const double[:, ::1] adj, long[::1] xi,
                       double[:, ::1] eta_full, long[::1] di, long[::1] dj):
    cdef Py_ssize_t m = di.shape[0], t
    cdef long a, b
    cdef double logit
    out_arr = np.empty(m)
    cdef double[::1] out = out_arr
    with nogil:
        for t in range(m):
            a = xi[di[t]]
            b = xi[dj[t]]
            if a > b:
                a, b = b, a
            logit = eta_full[a, b]
            out[t] = _bern(adj[di[t], dj[t]], logit)
    return out_arr
