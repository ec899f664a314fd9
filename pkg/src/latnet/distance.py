"""Latent distance model: edge probability expit(zeta - ||u_i - u_j||) with
Gaussian position priors, its MCMC sampler, and Procrustes post-processing."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logit

from . import _kernels as kern
from .mcmc import (AdaptiveScale, ChainSamples, McmcConfig, PosteriorSamples,
                   rw_metropolis_step, run_chains, sample_inv_gamma,
                   target_accept_rate)
from .modelbase import (Workspace, log_inv_gamma_pdf, log_normal_pdf,
                        make_workspace, symmetrize_draw)
from .network import Network, density


def elicit_sigma2_prior(n_actors, n_dims):
    """Inverse-gamma hyperparameters for the position variance: coefficient of
    variation 1 around a prior mean of pi * I^(2/K) (the volume heuristic)."""
    if n_actors < 2 or n_dims < 1:
        raise ValueError("need n_actors >= 2 and n_dims >= 1")
    a = 3.0
    b = 2.0 * np.pi * float(n_actors) ** (2.0 / n_dims)
    return a, b


@dataclass
class DistanceHyper:
    n_dims: int
    a_sigma: float
    b_sigma: float
    a_omega: float = 2.0
    b_omega: float = 100.0

    def __post_init__(self):
        if self.n_dims < 1:
            raise ValueError("n_dims must be positive")
        for v in (self.a_sigma, self.b_sigma, self.a_omega, self.b_omega):
            if v <= 0:
                raise ValueError("hyperparameters must be positive")

    @classmethod
    def default(cls, n_actors, n_dims):
        a, b = elicit_sigma2_prior(n_actors, n_dims)
        return cls(n_dims=n_dims, a_sigma=a, b_sigma=b)


@dataclass
class DistanceState:
    zeta: float
    U: np.ndarray
    sigma2: float
    omega2: float


@dataclass
class _ChainState:
    params: DistanceState
    log_step_u: np.ndarray
    zeta_scale: AdaptiveScale
    adapt_count: int = 0


def prob_distance(zeta, u_i, u_j):
    """Edge probability expit(zeta - ||u_i - u_j||)."""
    d = np.linalg.norm(np.asarray(u_i, dtype=float) - np.asarray(u_j, dtype=float))
    return float(expit(zeta - d))


def gibbs_sigma2_distance(U, hyper):
    """(shape, rate) of the inverse-gamma full conditional for sigma^2."""
    n, k = U.shape
    return hyper.a_sigma + n * k / 2.0, hyper.b_sigma + 0.5 * float((U * U).sum())


def gibbs_omega2(zeta, a_omega, b_omega):
    """(shape, rate) of the inverse-gamma full conditional for omega^2."""
    return a_omega + 0.5, b_omega + 0.5 * zeta * zeta


class DistanceModel:
    name = "distance"

    def __init__(self, hyper: DistanceHyper):
        self.hyper = hyper

    def prepare(self, net: Network) -> Workspace:
        return make_workspace(net)

    def init_state(self, ws: Workspace, rng):
        h = self.hyper
        n = ws.n_actors
        y = ws.adj[ws.di, ws.dj]
        dens = np.clip(y.mean() if y.size else 0.5, 1e-3, 1 - 1e-3)
        sigma2 = h.b_sigma / max(h.a_sigma - 1.0, 0.5)
        omega2 = h.b_omega / max(h.a_omega - 1.0, 0.5)
        params = DistanceState(
            zeta=float(logit(dens)),
            U=rng.standard_normal((n, h.n_dims)) * np.sqrt(sigma2),
            sigma2=sigma2,
            omega2=omega2,
        )
        return _ChainState(
            params=params,
            log_step_u=np.zeros(n),
            zeta_scale=AdaptiveScale(log_step=0.0, target_accept=0.44),
        )

    def sweep(self, ws: Workspace, cs: _ChainState, rng, adapt):
        st = cs.params
        n, k = st.U.shape
        z = rng.standard_normal((n, k))
        logu = np.log(rng.random(n))
        acc = kern.dist_update_positions(ws.adj, ws.mask_u8, st.U, st.zeta,
                                         st.sigma2, np.exp(cs.log_step_u), z, logu)
        if adapt:
            cs.adapt_count += 1
            gain = cs.adapt_count ** -0.6
            cs.log_step_u += gain * (acc - target_accept_rate(k))

        omega2 = st.omega2

        def zeta_logpost(zeta):
            ll = kern.dist_loglik_dyads(ws.adj, st.U, zeta, ws.di, ws.dj).sum()
            return ll - zeta * zeta / (2.0 * omega2)

        st.zeta, _ = rw_metropolis_step(zeta_logpost, st.zeta, cs.zeta_scale,
                                        rng, adapt)
        st.sigma2 = sample_inv_gamma(*gibbs_sigma2_distance(st.U, self.hyper), rng)
        st.omega2 = sample_inv_gamma(
            *gibbs_omega2(st.zeta, self.hyper.a_omega, self.hyper.b_omega), rng)

    def dyad_loglik(self, ws: Workspace, cs: _ChainState):
        st = cs.params
        return kern.dist_loglik_dyads(ws.adj, st.U, st.zeta, ws.di, ws.dj)

    def log_prior(self, cs: _ChainState):
        st = cs.params
        h = self.hyper
        lp = log_normal_pdf(st.U, 0.0, st.sigma2).sum()
        lp += log_inv_gamma_pdf(st.sigma2, h.a_sigma, h.b_sigma)
        lp += log_normal_pdf(st.zeta, 0.0, st.omega2)
        lp += log_inv_gamma_pdf(st.omega2, h.a_omega, h.b_omega)
        return float(lp)

    def params(self, cs: _ChainState):
        st = cs.params
        return {"zeta": st.zeta, "sigma2": st.sigma2, "omega2": st.omega2,
                "u": st.U.copy()}

    def prob_matrix(self, cs: _ChainState):
        st = cs.params
        d = np.linalg.norm(st.U[:, None, :] - st.U[None, :, :], axis=-1)
        p = expit(st.zeta - d)
        np.fill_diagonal(p, 0.0)
        return p

    # vectorized over stored samples, used by evaluation
    @staticmethod
    def dyad_probs(params, di, dj):
        u = params["u"]
        zeta = params["zeta"]
        d = np.linalg.norm(u[:, di, :] - u[:, dj, :], axis=-1)
        return expit(zeta[:, None] - d)

    # joint-distribution (Geweke) support -----------------------------------

    def sample_prior_state(self, n_actors, rng):
        h = self.hyper
        sigma2 = sample_inv_gamma(h.a_sigma, h.b_sigma, rng)
        omega2 = sample_inv_gamma(h.a_omega, h.b_omega, rng)
        params = DistanceState(
            zeta=float(rng.normal(0.0, np.sqrt(omega2))),
            U=rng.standard_normal((n_actors, h.n_dims)) * np.sqrt(sigma2),
            sigma2=sigma2,
            omega2=omega2,
        )
        return _ChainState(params=params, log_step_u=np.zeros(n_actors),
                           zeta_scale=AdaptiveScale())

    def sample_adjacency(self, cs: _ChainState, rng):
        return symmetrize_draw(self.prob_matrix(cs), rng)

    def geweke_scalars(self, cs: _ChainState):
        st = cs.params
        return {"zeta": st.zeta, "sigma2": st.sigma2}


def fit_distance(net: Network, hyper: DistanceHyper = None,
                 cfg: McmcConfig = None) -> PosteriorSamples:
    if hyper is None:
        hyper = DistanceHyper.default(net.n_actors, 2)
    if cfg is None:
        cfg = McmcConfig.paper_protocol()
    return run_chains(DistanceModel(hyper), net, cfg)


# -- Procrustes post-processing --------------------------------------------

def procrustes_align(U_b, U_0, tol=1e-12):
    """Orthogonal Q minimizing ||U_0 - U_b Q||_F; returns (Q, U_b Q, unique).

    ``unique`` is False when the cross-product U_b^T U_0 is rank deficient
    (the minimizer is then non-unique, though still valid).
    """
    U_b = np.asarray(U_b, dtype=float)
    U_0 = np.asarray(U_0, dtype=float)
    if U_b.shape != U_0.shape:
        raise ValueError("configurations must have matching shapes")
    m = U_b.T @ U_0
    w, d, vt = np.linalg.svd(m)
    q = w @ vt
    unique = bool(d.size > 0 and d.min() > tol * max(d.max(), 1.0))
    return q, U_b @ q, unique


def align_samples(samples: PosteriorSamples, center=True) -> PosteriorSamples:
    """Procrustes-align every stored position matrix to the first post-burn-in
    sample of the first chain; pairwise distances are unchanged."""
    if not samples.chains or samples.chains[0].params["u"].shape[0] == 0:
        raise ValueError("no stored samples to align")

    def prep(u):
        return u - u.mean(axis=0, keepdims=True) if center else u

    ref = prep(samples.chains[0].params["u"][0])
    new_chains = []
    for chain in samples.chains:
        u = chain.params["u"]
        aligned = np.empty_like(u)
        for b in range(u.shape[0]):
            _, aligned[b], _ = procrustes_align(prep(u[b]), ref)
        params = dict(chain.params)
        params["u"] = aligned
        new_chains.append(ChainSamples(params=params, log_joint=chain.log_joint,
                                       dyad_loglik=chain.dyad_loglik))
    return dataclasses.replace(samples, chains=new_chains)
