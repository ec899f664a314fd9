"""Latent eigenmodel: edge probability expit(zeta + sum_k lambda_k u_ik u_jk),
a multiplicative low-rank effects model, with its MCMC sampler."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logit

from . import _kernels as kern
from .mcmc import (AdaptiveScale, McmcConfig, PosteriorSamples,
                   rw_metropolis_step, run_chains, sample_inv_gamma,
                   target_accept_rate)
from .modelbase import (Workspace, log_inv_gamma_pdf, log_normal_pdf,
                        make_workspace, symmetrize_draw)
from .network import Network


@dataclass
class EigenHyper:
    n_dims: int
    a_sigma: float = 2.0
    b_sigma: float = 3.0
    a_kappa: float = 2.0
    b_kappa: float = 3.0
    a_omega: float = 2.0
    b_omega: float = 3.0

    def __post_init__(self):
        if self.n_dims < 1:
            raise ValueError("n_dims must be positive")
        for v in (self.a_sigma, self.b_sigma, self.a_kappa, self.b_kappa,
                  self.a_omega, self.b_omega):
            if v <= 0:
                raise ValueError("hyperparameters must be positive")


@dataclass
class EigenState:
    zeta: float
    U: np.ndarray     # (I, K)
    lam: np.ndarray   # (K,)
    sigma2: float
    kappa2: float
    omega2: float


@dataclass
class _ChainState:
    params: EigenState
    log_step_u: np.ndarray
    log_step_lam: np.ndarray
    zeta_scale: AdaptiveScale
    adapt_count: int = 0


def prob_eigen(zeta, lam, u_i, u_j):
    """Edge probability expit(zeta + sum_k lambda_k u_ik u_jk)."""
    q = float(np.asarray(lam, dtype=float)
              @ (np.asarray(u_i, dtype=float) * np.asarray(u_j, dtype=float)))
    return float(expit(zeta + q))


def gibbs_kappa2(lam, a_kappa, b_kappa):
    """(shape, rate) of the inverse-gamma full conditional for kappa^2."""
    return a_kappa + lam.shape[0] / 2.0, b_kappa + 0.5 * float(lam @ lam)


def gibbs_sigma2_eigen(U, a_sigma, b_sigma):
    """(shape, rate) of the inverse-gamma full conditional for sigma^2."""
    return a_sigma + U.size / 2.0, b_sigma + 0.5 * float((U * U).sum())


def gibbs_omega2_eigen(zeta, a_omega, b_omega):
    """(shape, rate) of the inverse-gamma full conditional for omega^2."""
    return a_omega + 0.5, b_omega + 0.5 * zeta * zeta


class EigenModel:
    name = "eigen"

    def __init__(self, hyper: EigenHyper):
        self.hyper = hyper

    def prepare(self, net: Network) -> Workspace:
        return make_workspace(net)

    def init_state(self, ws: Workspace, rng):
        h = self.hyper
        n, k = ws.n_actors, h.n_dims
        y = ws.adj[ws.di, ws.dj]
        dens = np.clip(y.mean() if y.size else 0.5, 1e-3, 1 - 1e-3)
        sigma2 = h.b_sigma / max(h.a_sigma - 1.0, 0.5)
        kappa2 = h.b_kappa / max(h.a_kappa - 1.0, 0.5)
        omega2 = h.b_omega / max(h.a_omega - 1.0, 0.5)
        # warm start from the leading eigenpairs of the adjacency
        vals, vecs = np.linalg.eigh(ws.adj)
        order = np.argsort(np.abs(vals))[::-1][:k]
        U = np.ascontiguousarray(vecs[:, order] * np.sqrt(n))
        lam = np.ascontiguousarray(vals[order] / n)
        U += 0.01 * rng.standard_normal((n, k))
        params = EigenState(
            zeta=float(logit(dens)),
            U=U,
            lam=lam,
            sigma2=sigma2,
            kappa2=kappa2,
            omega2=omega2,
        )
        return _ChainState(
            params=params,
            log_step_u=np.zeros(n),
            log_step_lam=np.zeros(k),
            zeta_scale=AdaptiveScale(log_step=0.0, target_accept=0.44),
        )

    def sweep(self, ws: Workspace, cs: _ChainState, rng, adapt):
        st = cs.params
        n, k = st.U.shape
        z = rng.standard_normal((n, k))
        logu = np.log(rng.random(n))
        acc = kern.eigen_update_positions(ws.adj, ws.mask_u8, st.U, st.lam,
                                          st.zeta, st.sigma2,
                                          np.exp(cs.log_step_u), z, logu)
        zk = rng.standard_normal(k)
        logu_k = np.log(rng.random(k))
        acc_lam = kern.eigen_update_lambda(ws.adj, st.U, st.lam, st.zeta,
                                           st.kappa2, np.exp(cs.log_step_lam),
                                           zk, logu_k, ws.di, ws.dj)
        if adapt:
            cs.adapt_count += 1
            gain = cs.adapt_count ** -0.6
            cs.log_step_u += gain * (acc - target_accept_rate(k))
            cs.log_step_lam += gain * (acc_lam - 0.44)

        omega2 = st.omega2

        def zeta_logpost(zeta):
            ll = kern.eigen_loglik_dyads(ws.adj, st.U, st.lam, zeta,
                                         ws.di, ws.dj).sum()
            return ll - zeta * zeta / (2.0 * omega2)

        st.zeta, _ = rw_metropolis_step(zeta_logpost, st.zeta, cs.zeta_scale,
                                        rng, adapt)
        h = self.hyper
        st.sigma2 = sample_inv_gamma(
            *gibbs_sigma2_eigen(st.U, h.a_sigma, h.b_sigma), rng)
        st.kappa2 = sample_inv_gamma(*gibbs_kappa2(st.lam, h.a_kappa, h.b_kappa),
                                     rng)
        st.omega2 = sample_inv_gamma(
            *gibbs_omega2_eigen(st.zeta, h.a_omega, h.b_omega), rng)

    def dyad_loglik(self, ws: Workspace, cs: _ChainState):
        st = cs.params
        return kern.eigen_loglik_dyads(ws.adj, st.U, st.lam, st.zeta,
                                       ws.di, ws.dj)

    def log_prior(self, cs: _ChainState):
        st = cs.params
        h = self.hyper
        lp = log_normal_pdf(st.U, 0.0, st.sigma2).sum()
        lp += log_normal_pdf(st.lam, 0.0, st.kappa2).sum()
        lp += log_normal_pdf(st.zeta, 0.0, st.omega2)
        lp += log_inv_gamma_pdf(st.sigma2, h.a_sigma, h.b_sigma)
        lp += log_inv_gamma_pdf(st.kappa2, h.a_kappa, h.b_kappa)
        lp += log_inv_gamma_pdf(st.omega2, h.a_omega, h.b_omega)
        return float(lp)

    def params(self, cs: _ChainState):
        st = cs.params
        return {"zeta": st.zeta, "sigma2": st.sigma2, "kappa2": st.kappa2,
                "omega2": st.omega2, "lambda": st.lam.copy(), "u": st.U.copy()}

    def prob_matrix(self, cs: _ChainState):
        st = cs.params
        p = expit(st.zeta + (st.U * st.lam) @ st.U.T)
        np.fill_diagonal(p, 0.0)
        return p

    # vectorized over stored samples, used by evaluation
    @staticmethod
    def dyad_probs(params, di, dj):
        u = params["u"]
        lam = params["lambda"]
        zeta = params["zeta"]
        q = np.einsum("bmk,bmk->bm", u[:, di, :] * lam[:, None, :], u[:, dj, :])
        return expit(zeta[:, None] + q)

    # joint-distribution (Geweke) support -----------------------------------

    def sample_prior_state(self, n_actors, rng):
        h = self.hyper
        sigma2 = sample_inv_gamma(h.a_sigma, h.b_sigma, rng)
        kappa2 = sample_inv_gamma(h.a_kappa, h.b_kappa, rng)
        omega2 = sample_inv_gamma(h.a_omega, h.b_omega, rng)
        params = EigenState(
            zeta=float(rng.normal(0.0, np.sqrt(omega2))),
            U=rng.standard_normal((n_actors, h.n_dims)) * np.sqrt(sigma2),
            lam=rng.standard_normal(h.n_dims) * np.sqrt(kappa2),
            sigma2=sigma2,
            kappa2=kappa2,
            omega2=omega2,
        )
        return _ChainState(params=params, log_step_u=np.zeros(n_actors),
                           log_step_lam=np.zeros(h.n_dims),
                           zeta_scale=AdaptiveScale())

    def sample_adjacency(self, cs: _ChainState, rng):
        return symmetrize_draw(self.prob_matrix(cs), rng)

    def geweke_scalars(self, cs: _ChainState):
        st = cs.params
        return {"zeta": st.zeta, "sigma2": st.sigma2, "kappa2": st.kappa2}


def fit_eigen(net: Network, hyper: EigenHyper = None,
              cfg: McmcConfig = None) -> PosteriorSamples:
    if hyper is None:
        hyper = EigenHyper(n_dims=2)
    if cfg is None:
        cfg = McmcConfig.paper_protocol()
    return run_chains(EigenModel(hyper), net, cfg)
