"""Model assessment: WAIC/DIC, ROC-AUC link prediction with k-fold
cross-validation by dyad masking, and posterior predictive checks of
descriptive network statistics."""

from __future__ import annotations

import dataclasses
import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp
from scipy.stats import rankdata

from .mcmc import McmcConfig, PosteriorSamples, run_chains
from .network import Network, network_stats
from .modelbase import symmetrize_draw

_STAT_NAMES = ("density", "transitivity", "assortativity")


# -- model registry ---------------------------------------------------------

@dataclass
class ModelSpec:
    """Which model to fit: ``name`` in {distance, class, eigen} and its
    dimension (latent dimensions for distance/eigen, classes for class)."""

    name: str
    dim: int
    hyper: object = None

    def __post_init__(self):
        if self.name not in ("distance", "class", "eigen"):
            raise ValueError(f"unknown model {self.name!r}")
        if self.dim < 1:
            raise ValueError("dim must be positive")

    def build(self, net: Network):
        if self.name == "distance":
            from .distance import DistanceHyper, DistanceModel
            h = self.hyper or DistanceHyper.default(net.n_actors, self.dim)
            return DistanceModel(h)
        if self.name == "class":
            from .blockmodel import ClassHyper, ClassModel
            h = self.hyper or ClassHyper(n_classes=self.dim)
            return ClassModel(h)
        from .eigenmodel import EigenHyper, EigenModel
        h = self.hyper or EigenHyper(n_dims=self.dim)
        return EigenModel(h)

    def model_class(self):
        if self.name == "distance":
            from .distance import DistanceModel
            return DistanceModel
        if self.name == "class":
            from .blockmodel import ClassModel
            return ClassModel
        from .eigenmodel import EigenModel
        return EigenModel


def model_spec_for(samples: PosteriorSamples) -> ModelSpec:
    """Recover a ModelSpec (name and dimension) from stored samples."""
    p = samples.chains[0].params
    if samples.model == "distance":
        return ModelSpec("distance", p["u"].shape[2])
    if samples.model == "class":
        return ModelSpec("class", p["eta"].shape[1])
    if samples.model == "eigen":
        return ModelSpec("eigen", p["u"].shape[2])
    raise ValueError(f"unknown model {samples.model!r}")


# -- information criteria ---------------------------------------------------

def waic(ll) -> tuple:
    """Widely applicable information criterion from a (samples x dyads)
    log-likelihood matrix. Returns ``(waic, p_waic)``."""
    ll = np.asarray(ll, dtype=np.float64)
    if ll.ndim != 2 or ll.size == 0:
        raise ValueError("need a non-empty (samples, dyads) matrix")
    b = ll.shape[0]
    lppd = logsumexp(ll, axis=0) - np.log(b)
    p_waic = 2.0 * float((lppd - ll.mean(axis=0)).sum())
    return float(-2.0 * lppd.sum() + 2.0 * p_waic), p_waic


def dic(ll, ll_at_mean) -> tuple:
    """Deviance information criterion. ``ll_at_mean`` is the per-dyad
    log-likelihood at the posterior-mean parameters. Returns ``(dic, p_dic)``."""
    ll = np.asarray(ll, dtype=np.float64)
    ll_at_mean = np.asarray(ll_at_mean, dtype=np.float64)
    if ll.ndim != 2 or ll.size == 0:
        raise ValueError("need a non-empty (samples, dyads) matrix")
    if ll_at_mean.shape != (ll.shape[1],):
        raise ValueError("dyad sets of the two inputs do not match")
    l_hat = float(ll_at_mean.sum())
    p_dic = 2.0 * (l_hat - float(ll.sum(axis=1).mean()))
    return -2.0 * l_hat + 2.0 * p_dic, p_dic


# -- ROC / AUC --------------------------------------------------------------

def roc_auc(scores, labels) -> float:
    """Mann-Whitney AUC with tie correction: P(s+ > s-) + 0.5 P(tie)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be matching vectors")
    if not np.isin(labels, (0, 1)).all():
        raise ValueError("labels must be binary")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("both classes must be present")
    ranks = rankdata(scores)
    return float((ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2.0)
                 / (n_pos * n_neg))


# -- posterior predictive probabilities -------------------------------------

def predictive_dyad_probs(samples: PosteriorSamples, di, dj,
                          chunk=1024) -> np.ndarray:
    """Posterior-mean interaction probability per requested dyad, averaged
    over all retained samples (Rao-Blackwellized)."""
    di = np.asarray(di, dtype=np.int64)
    dj = np.asarray(dj, dtype=np.int64)
    cls = model_spec_for(samples).model_class()
    total = np.zeros(di.shape[0])
    n = 0
    for chain in samples.chains:
        b = chain.log_joint.shape[0]
        for start in range(0, b, chunk):
            part = {k: v[start:start + chunk] for k, v in chain.params.items()}
            total += cls.dyad_probs(part, di, dj).sum(axis=0)
            n += min(chunk, b - start)
    return total / n


def predictive_dyad_logits(samples: PosteriorSamples, di, dj,
                           chunk=1024) -> np.ndarray:
    """Posterior-mean log-odds per dyad (a parameter-scale plug-in that is
    invariant to class relabeling and latent rotations)."""
    from scipy.special import logit
    di = np.asarray(di, dtype=np.int64)
    dj = np.asarray(dj, dtype=np.int64)
    cls = model_spec_for(samples).model_class()
    total = np.zeros(di.shape[0])
    n = 0
    for chain in samples.chains:
        b = chain.log_joint.shape[0]
        for start in range(0, b, chunk):
            part = {k: v[start:start + chunk] for k, v in chain.params.items()}
            p = np.clip(cls.dyad_probs(part, di, dj), 1e-12, 1 - 1e-12)
            total += logit(p).sum(axis=0)
            n += min(chunk, b - start)
    return total / n


def in_sample_probs(samples: PosteriorSamples, net: Network) -> np.ndarray:
    di, dj = net.observed_dyads()
    return predictive_dyad_probs(samples, di, dj)


def in_sample_auc(samples: PosteriorSamples, net: Network) -> float:
    return roc_auc(in_sample_probs(samples, net), net.dyad_values())


# -- cross-validation -------------------------------------------------------

def fold_assignments(n_dyads, n_folds, seed) -> np.ndarray:
    """Uniformly random fold id per dyad; deterministic in the seed."""
    if n_folds < 2:
        raise ValueError("n_folds must be >= 2")
    if n_dyads < n_folds:
        raise ValueError("fewer dyads than folds")
    rng = np.random.default_rng(seed)
    ids = np.arange(n_dyads) % n_folds
    return ids[rng.permutation(n_dyads)]


def _run_fold(net, spec, cfg, di, dj, hold):
    held_i, held_j = di[hold], dj[hold]
    y_held = net.adjacency[held_i, held_j]
    masked = net.mask_dyads(held_i, held_j)
    fit = run_chains(spec.build(masked), masked, cfg)
    probs = predictive_dyad_probs(fit, held_i, held_j)
    return roc_auc(probs, y_held)


def cross_validate(net: Network, spec: ModelSpec, cfg: McmcConfig,
                   n_folds=5, seed=0, n_jobs=1) -> dict:
    """K-fold link-prediction experiment: held-out dyads are masked out of the
    likelihood, then scored by their posterior-mean interaction probability.
    Returns ``{"auc_per_fold", "auc_mean", "fold_sizes"}``."""
    di, dj = net.observed_dyads()
    folds = fold_assignments(di.shape[0], n_folds, seed)
    holds = [folds == f for f in range(n_folds)]
    if any(h.sum() == 0 for h in holds):
        raise ValueError("a fold has no held-out dyads")
    if n_jobs > 1:
        from joblib import Parallel, delayed
        aucs = Parallel(n_jobs=n_jobs)(
            delayed(_run_fold)(net, spec, cfg, di, dj, h) for h in holds)
    else:
        aucs = [_run_fold(net, spec, cfg, di, dj, h) for h in holds]
    aucs = [float(a) for a in aucs]
    return {"auc_per_fold": aucs, "auc_mean": float(np.mean(aucs)),
            "fold_sizes": [int(h.sum()) for h in holds]}


# -- posterior predictive checks --------------------------------------------

def _prob_matrix_from_params(model_name, p):
    from scipy.special import expit
    if model_name == "distance":
        u = p["u"]
        d = np.linalg.norm(u[:, None, :] - u[None, :, :], axis=-1)
        mat = expit(p["zeta"] - d)
    elif model_name == "class":
        xi = p["xi"].astype(np.int64)
        mat = expit(p["eta"][xi[:, None], xi[None, :]])
    elif model_name == "eigen":
        u = p["u"]
        mat = expit(p["zeta"] + (u * p["lambda"]) @ u.T)
    else:
        raise ValueError(f"unknown model {model_name!r}")
    np.fill_diagonal(mat, 0.0)
    return mat


def posterior_predictive(samples: PosteriorSamples, net: Network,
                         stats=_STAT_NAMES, max_replicates=2000,
                         seed=0) -> dict:
    """Simulate replicate networks from retained samples and compare summary
    statistics with the observed network.

    Replicates on which a statistic is undefined (NaN) are dropped for that
    statistic, with the count reported and warned about."""
    total = samples.n_stored_total
    if total < 1:
        raise ValueError("no retained samples")
    params = {k: samples.param(k) for k in samples.param_names()}
    take = np.linspace(0, total - 1, min(total, max_replicates)).astype(int)
    rng = np.random.default_rng(seed)
    observed = network_stats(net).as_dict()
    draws = {s: [] for s in stats}
    dropped = {s: 0 for s in stats}
    for b in take:
        p_b = {k: v[b] for k, v in params.items()}
        probs = _prob_matrix_from_params(samples.model, p_b)
        rep = Network(symmetrize_draw(probs, rng))
        rep_stats = network_stats(rep).as_dict()
        for s in stats:
            v = rep_stats[s]
            if np.isnan(v):
                dropped[s] += 1
            else:
                draws[s].append(v)
    records = {}
    for s in stats:
        if dropped[s]:
            warnings.warn(f"{dropped[s]} replicate(s) dropped for statistic "
                          f"{s!r} (undefined value)")
        vals = np.asarray(draws[s])
        if vals.size == 0:
            records[s] = {"observed": observed[s], "posterior_mean": float("nan"),
                          "q025": float("nan"), "q975": float("nan"),
                          "q005": float("nan"), "q995": float("nan"),
                          "n_replicates": 0, "n_dropped": dropped[s]}
            continue
        q = np.quantile(vals, [0.025, 0.975, 0.005, 0.995])
        records[s] = {"observed": observed[s],
                      "posterior_mean": float(vals.mean()),
                      "q025": float(q[0]), "q975": float(q[1]),
                      "q005": float(q[2]), "q995": float(q[3]),
                      "n_replicates": int(vals.size), "n_dropped": dropped[s]}
    return records


# -- report -----------------------------------------------------------------

@dataclass
class EvalReport:
    waic: float = None
    p_waic: float = None
    dic: float = None
    p_dic: float = None
    auc_per_fold: list = None
    auc_mean: float = None
    ppc: dict = field(default_factory=dict)

    def as_dict(self):
        return dataclasses.asdict(self)

    def to_json(self, path=None):
        text = json.dumps(self.as_dict(), indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def ppc_to_csv(self, path=None):
        lines = ["stat,observed,mean,q025,q975,q005,q995"]
        for s, r in self.ppc.items():
            lines.append(",".join([s] + [f"{r[k]:.6g}" for k in
                                         ("observed", "posterior_mean",
                                          "q025", "q975", "q005", "q995")]))
        text = "\n".join(lines) + "\n"
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def information_criteria(samples: PosteriorSamples, net: Network) -> EvalReport:
    """WAIC and DIC for a fit, using the posterior-mean per-dyad log-odds as
    the DIC plug-in (label- and rotation-invariant parameter summary)."""
    ll = samples.dyad_loglik_matrix()
    di, dj = samples.dyads[:, 0], samples.dyads[:, 1]
    logits = predictive_dyad_logits(samples, di, dj)
    y = net.adjacency[di, dj]
    ll_at_mean = y * logits - np.logaddexp(0.0, logits)
    w, pw = waic(ll)
    d, pd = dic(ll, ll_at_mean)
    return EvalReport(waic=w, p_waic=pw, dic=d, p_dic=pd)
