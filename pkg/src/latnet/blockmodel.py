"""Latent class (stochastic block) model: block-wise edge logits eta_{k,l},
finite Dirichlet label prior with Gamma-distributed concentration, Gibbs/MH
sampler, co-membership summaries and a pairwise-loss partition estimate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, gammaln, logit

from . import _kernels as kern
from .mcmc import (AdaptiveScale, McmcConfig, PosteriorSamples,
                   rw_metropolis_step, run_chains, sample_inv_gamma)
from .modelbase import (Workspace, log_inv_gamma_pdf, log_normal_pdf,
                        make_workspace, symmetrize_draw)
from .network import Network


@dataclass
class ClassHyper:
    n_classes: int
    mu_zeta: float = 0.0
    sigma2_zeta: float = 3.0
    a_tau: float = 2.0
    b_tau: float = 3.0
    a_alpha: float = 1.0
    b_alpha: float = 1.0

    def __post_init__(self):
        if self.n_classes < 1:
            raise ValueError("n_classes must be positive")
        for v in (self.sigma2_zeta, self.a_tau, self.b_tau,
                  self.a_alpha, self.b_alpha):
            if v <= 0:
                raise ValueError("variance/shape/rate hyperparameters must be positive")


@dataclass
class ClassState:
    xi: np.ndarray        # (I,) labels in 0..K-1
    eta_full: np.ndarray  # (K, K) symmetric block logits
    omega: np.ndarray     # (K,) class probabilities
    zeta: float
    tau2: float
    alpha: float

    @property
    def n_classes(self):
        return self.omega.shape[0]


@dataclass
class _ChainState:
    params: ClassState
    log_step_eta: np.ndarray
    alpha_scale: AdaptiveScale
    adapt_count: int = 0


def phi(a, b, n_classes=None):
    """Canonical (min, max) ordering of a 1-based label pair."""
    if a < 1 or b < 1 or (n_classes is not None and max(a, b) > n_classes):
        raise ValueError(f"labels must lie in 1..{n_classes or 'K'}")
    return (a, b) if a <= b else (b, a)


def prob_class(eta, xi_i, xi_j):
    """Edge probability expit(eta_{phi(xi_i, xi_j)}) for 1-based labels."""
    eta = np.asarray(eta, dtype=float)
    a, b = phi(xi_i, xi_j, n_classes=eta.shape[0])
    return float(expit(eta[a - 1, b - 1]))


def _triu(n_classes):
    return np.triu_indices(n_classes)


def block_stats(net: Network, xi, n_classes):
    """Edge sums s_{k,l} and dyad counts n_{k,l} per (unordered) block pair."""
    ws = make_workspace(net)
    xi = np.ascontiguousarray(xi, dtype=np.int64)
    return kern.class_block_stats(ws.adj, xi, n_classes, ws.di, ws.dj)


def eta_log_conditional(e, s, n, zeta, tau2):
    """Log full conditional of one block logit given its sufficient stats."""
    return s * e - n * np.logaddexp(0.0, e) - (e - zeta) ** 2 / (2.0 * tau2)


def zeta_conditional(eta_upper, hyper: ClassHyper, tau2):
    """(mean, variance) of the Gaussian full conditional for zeta."""
    m_blocks = eta_upper.size
    v2 = 1.0 / (1.0 / hyper.sigma2_zeta + m_blocks / tau2)
    m = v2 * (hyper.mu_zeta / hyper.sigma2_zeta + eta_upper.sum() / tau2)
    return m, v2


def gibbs_zeta_class(eta_upper, hyper: ClassHyper, tau2, rng):
    m, v2 = zeta_conditional(np.asarray(eta_upper, dtype=float), hyper, tau2)
    return float(rng.normal(m, np.sqrt(v2)))


def tau2_conditional(eta_upper, zeta, hyper: ClassHyper):
    """(shape, rate) of the inverse-gamma full conditional for tau^2."""
    shape = hyper.a_tau + eta_upper.size / 2.0
    rate = hyper.b_tau + 0.5 * float(((eta_upper - zeta) ** 2).sum())
    return shape, rate


def gibbs_tau2(eta_upper, zeta, hyper: ClassHyper, rng):
    return float(sample_inv_gamma(
        *tau2_conditional(np.asarray(eta_upper, dtype=float), zeta, hyper), rng))


def gibbs_omega(xi, alpha, n_classes, rng):
    counts = np.bincount(np.asarray(xi, dtype=np.int64), minlength=n_classes)
    return rng.dirichlet(alpha / n_classes + counts)


def alpha_log_conditional(alpha, omega, hyper: ClassHyper):
    """Log full conditional of the Dirichlet concentration (Gamma prior)."""
    if alpha <= 0:
        return -np.inf
    k = omega.shape[0]
    slog = np.log(np.maximum(omega, 1e-300)).sum()
    return (gammaln(alpha) - k * gammaln(alpha / k) + alpha / k * slog
            + (hyper.a_alpha - 1.0) * np.log(alpha) - hyper.b_alpha * alpha)


def mh_update_alpha(omega, alpha, hyper: ClassHyper, rng, scale=None, adapt=False):
    """Log-scale random-walk update of alpha (log-normal proposal Jacobian
    folded into the transformed target)."""
    if scale is None:
        scale = AdaptiveScale(log_step=np.log(0.5))

    def log_target(x):
        return alpha_log_conditional(np.exp(x), omega, hyper) + x

    x, accepted = rw_metropolis_step(log_target, np.log(alpha), scale, rng, adapt)
    return float(np.exp(x)), accepted


class ClassModel:
    name = "class"

    def __init__(self, hyper: ClassHyper):
        self.hyper = hyper

    def prepare(self, net: Network) -> Workspace:
        return make_workspace(net)

    def init_state(self, ws: Workspace, rng):
        h = self.hyper
        n, k = ws.n_actors, h.n_classes
        xi = (self._spectral_labels(ws, k, rng) if k > 1
              else np.zeros(n, dtype=np.int64))
        s, cnt = kern.class_block_stats(ws.adj, xi, k, ws.di, ws.dj)
        eta_full = logit((s + 0.5) / (cnt + 1.0))
        iu, ju = _triu(k)
        eta_full[ju, iu] = eta_full[iu, ju]
        params = ClassState(
            xi=xi,
            eta_full=np.ascontiguousarray(eta_full),
            omega=np.full(k, 1.0 / k),
            zeta=0.0,
            tau2=h.b_tau / max(h.a_tau - 1.0, 0.5),
            alpha=h.a_alpha / h.b_alpha,
        )
        return _ChainState(
            params=params,
            log_step_eta=np.zeros(iu.size),
            alpha_scale=AdaptiveScale(log_step=np.log(0.5), target_accept=0.44),
        )

    @staticmethod
    def _spectral_labels(ws: Workspace, n_classes, rng):
        """k-means on a spectral embedding of the adjacency; cheap warm start."""
        from scipy.cluster.vq import kmeans2
        k = min(ws.n_actors, n_classes)
        dim = min(ws.n_actors, max(n_classes, 2))
        vals, vecs = np.linalg.eigh(ws.adj)
        order = np.argsort(np.abs(vals))[::-1]
        emb = vecs[:, order[:dim]] * np.abs(vals[order[:dim]])
        try:
            _, labels = kmeans2(emb, k, minit="++",
                                seed=int(rng.integers(2**31)))
            return labels.astype(np.int64)
        except Exception:
            return rng.integers(0, k, size=ws.n_actors).astype(np.int64)

    def sweep(self, ws: Workspace, cs: _ChainState, rng, adapt):
        st = cs.params
        h = self.hyper
        k = h.n_classes
        iu, ju = _triu(k)
        m = iu.size

        # block logits (step 1): MH per occupied block, exact prior draw else
        s, cnt = kern.class_block_stats(ws.adj, st.xi, k, ws.di, ws.dj)
        su, nu = s[iu, ju], cnt[iu, ju]
        eta_u = st.eta_full[iu, ju]
        z = rng.standard_normal(m)
        logu = np.log(rng.random(m))
        prop = eta_u + np.exp(cs.log_step_eta) * z
        delta = (eta_log_conditional(prop, su, nu, st.zeta, st.tau2)
                 - eta_log_conditional(eta_u, su, nu, st.zeta, st.tau2))
        acc = logu < delta
        eta_u = np.where(acc, prop, eta_u)
        empty = nu == 0
        eta_u[empty] = st.zeta + np.sqrt(st.tau2) * z[empty]
        if adapt:
            cs.adapt_count += 1
            gain = cs.adapt_count ** -0.6
            cs.log_step_eta += np.where(empty, 0.0, gain * (acc - 0.44))
        st.eta_full[iu, ju] = eta_u
        st.eta_full[ju, iu] = eta_u

        # labels (step 2)
        log_omega = np.log(np.maximum(st.omega, 1e-300))
        kern.class_gibbs_labels(ws.adj, ws.mask_u8, st.xi, st.eta_full,
                                log_omega, rng.random(ws.n_actors))

        # omega (step 3), zeta (step 4), tau2 (step 5)
        st.omega = gibbs_omega(st.xi, st.alpha, k, rng)
        eta_u = st.eta_full[iu, ju]
        st.zeta = gibbs_zeta_class(eta_u, h, st.tau2, rng)
        st.tau2 = gibbs_tau2(eta_u, st.zeta, h, rng)

        # alpha (step 6)
        st.alpha, _ = mh_update_alpha(st.omega, st.alpha, h, rng,
                                      scale=cs.alpha_scale, adapt=adapt)

    def dyad_loglik(self, ws: Workspace, cs: _ChainState):
        st = cs.params
        return kern.class_loglik_dyads(ws.adj, st.xi, st.eta_full, ws.di, ws.dj)

    def log_prior(self, cs: _ChainState):
        st = cs.params
        h = self.hyper
        k = st.n_classes
        iu, ju = _triu(k)
        eta_u = st.eta_full[iu, ju]
        log_omega = np.log(np.maximum(st.omega, 1e-300))
        lp = log_normal_pdf(eta_u, st.zeta, st.tau2).sum()
        lp += log_normal_pdf(st.zeta, h.mu_zeta, h.sigma2_zeta)
        lp += log_inv_gamma_pdf(st.tau2, h.a_tau, h.b_tau)
        lp += log_omega[st.xi].sum()
        lp += (gammaln(st.alpha) - k * gammaln(st.alpha / k)
               + (st.alpha / k - 1.0) * log_omega.sum())
        lp += (h.a_alpha * np.log(h.b_alpha) - gammaln(h.a_alpha)
               + (h.a_alpha - 1.0) * np.log(st.alpha) - h.b_alpha * st.alpha)
        return float(lp)

    def params(self, cs: _ChainState):
        st = cs.params
        return {"zeta": st.zeta, "tau2": st.tau2, "alpha": st.alpha,
                "xi": st.xi.copy(), "eta": st.eta_full.copy(),
                "omega": st.omega.copy()}

    def prob_matrix(self, cs: _ChainState):
        st = cs.params
        p = expit(st.eta_full[st.xi[:, None], st.xi[None, :]])
        np.fill_diagonal(p, 0.0)
        return p

    @staticmethod
    def dyad_probs(params, di, dj):
        xi = params["xi"].astype(np.int64)
        eta = params["eta"]
        b_idx = np.arange(xi.shape[0])[:, None]
        return expit(eta[b_idx, xi[:, di], xi[:, dj]])

    # joint-distribution (Geweke) support -----------------------------------

    def sample_prior_state(self, n_actors, rng):
        h = self.hyper
        k = h.n_classes
        alpha = rng.gamma(h.a_alpha, 1.0 / h.b_alpha)
        omega = rng.dirichlet(np.full(k, alpha / k))
        xi = rng.choice(k, size=n_actors, p=omega).astype(np.int64)
        zeta = rng.normal(h.mu_zeta, np.sqrt(h.sigma2_zeta))
        tau2 = sample_inv_gamma(h.a_tau, h.b_tau, rng)
        iu, ju = _triu(k)
        eta_full = np.zeros((k, k))
        draws = rng.normal(zeta, np.sqrt(tau2), size=iu.size)
        eta_full[iu, ju] = draws
        eta_full[ju, iu] = draws
        params = ClassState(xi=xi, eta_full=eta_full,
                            omega=omega, zeta=float(zeta), tau2=float(tau2),
                            alpha=float(alpha))
        return _ChainState(params=params,
                           log_step_eta=np.zeros(iu.size),
                           alpha_scale=AdaptiveScale(log_step=np.log(0.5)))

    def sample_adjacency(self, cs: _ChainState, rng):
        return symmetrize_draw(self.prob_matrix(cs), rng)

    def geweke_scalars(self, cs: _ChainState):
        st = cs.params
        return {"zeta": st.zeta, "tau2": st.tau2, "alpha": st.alpha}


def fit_class(net: Network, hyper: ClassHyper = None,
              cfg: McmcConfig = None) -> PosteriorSamples:
    if hyper is None:
        hyper = ClassHyper(n_classes=8)
    if cfg is None:
        cfg = McmcConfig.paper_protocol()
    return run_chains(ClassModel(hyper), net, cfg)


# -- posterior summaries ----------------------------------------------------

def co_membership(samples: PosteriorSamples) -> np.ndarray:
    """Posterior probability that two actors share a class; diagonal is 1."""
    xi = samples.param("xi").astype(np.int64)
    if xi.shape[0] == 0:
        raise ValueError("no stored samples")
    n = xi.shape[1]
    acc = np.zeros((n, n))
    for start in range(0, xi.shape[0], 256):
        chunk = xi[start:start + 256]
        acc += (chunk[:, :, None] == chunk[:, None, :]).sum(axis=0)
    acc /= xi.shape[0]
    np.fill_diagonal(acc, 1.0)
    return acc


def partition_loss(labels, comembership, rel_cost=0.5):
    """Pairwise misclassification loss of a hard partition against
    co-membership probabilities."""
    labels = np.asarray(labels)
    p = comembership
    same = labels[:, None] == labels[None, :]
    iu, ju = np.triu_indices(labels.shape[0], k=1)
    s = same[iu, ju]
    pv = p[iu, ju]
    return float((s * (1.0 - pv) * rel_cost + (~s) * pv * (1.0 - rel_cost)).sum())


def _icm_refine(labels, p, rel_cost, max_passes=200):
    """Single-move descent on the pairwise loss; cluster count is free."""
    n = labels.shape[0]
    labels = labels.copy()
    for _ in range(max_passes):
        moved = False
        for i in range(n):
            others = np.delete(np.arange(n), i)
            lab_o = labels[others]
            p_i = p[i, others]
            clusters = np.unique(lab_o)
            # cost of joining cluster c: rc*(n_c - S_c) + (1-rc)*(P - S_c)
            total_p = p_i.sum()
            best_lab, best_cost = None, np.inf
            for c in clusters:
                in_c = lab_o == c
                s_c = p_i[in_c].sum()
                cost = rel_cost * (in_c.sum() - s_c) + (1 - rel_cost) * (total_p - s_c)
                if cost < best_cost - 1e-12:
                    best_cost, best_lab = cost, c
            singleton_cost = (1 - rel_cost) * total_p
            if singleton_cost < best_cost - 1e-12:
                best_cost = singleton_cost
                best_lab = labels.max() + 1 + i  # fresh label
            if best_lab != labels[i]:
                labels[i] = best_lab
                moved = True
        if not moved:
            break
    # renumber contiguously
    _, labels = np.unique(labels, return_inverse=True)
    return labels


def partition_point_estimate(comembership, rel_cost=0.5, max_clusters=None):
    """Partition minimizing the pairwise misclassification loss, found by
    greedy search over hierarchical-clustering cuts plus single-move descent.

    The number of clusters is an output; returns 0-based labels.
    ``max_clusters`` caps the scanned initial cut sizes (default: all cuts up
    to 40 clusters; the descent can still merge or split beyond the cut)."""
    from scipy.cluster.hierarchy import fcluster, linkage
    from scipy.spatial.distance import squareform

    p = np.asarray(comembership, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError("co-membership matrix must be square")
    if not np.allclose(p, p.T, atol=1e-8):
        raise ValueError("co-membership matrix must be symmetric")
    if not 0.0 < rel_cost < 1.0:
        raise ValueError("rel_cost must lie in (0, 1)")
    n = p.shape[0]
    if n == 1:
        return np.zeros(1, dtype=np.int64)
    d = 1.0 - p
    np.fill_diagonal(d, 0.0)
    link = linkage(squareform((d + d.T) / 2.0, checks=False), method="average")
    if max_clusters is None:
        max_clusters = min(n, 40)
    best_labels, best_loss = None, np.inf
    for n_clust in range(1, min(n, max_clusters) + 1):
        init = fcluster(link, n_clust, criterion="maxclust") - 1
        labels = _icm_refine(init.astype(np.int64), p, rel_cost)
        loss = partition_loss(labels, p, rel_cost)
        if loss < best_loss - 1e-12:
            best_loss, best_labels = loss, labels
    return best_labels.astype(np.int64)
