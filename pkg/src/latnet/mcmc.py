"""Shared MCMC machinery: adaptive random-walk Metropolis, chain driver,
sample storage and the Gelman-Rubin diagnostic."""

from __future__ import annotations

import dataclasses
import json
import pathlib
from dataclasses import dataclass, field

import numpy as np


@dataclass
class McmcConfig:
    n_iter: int
    burn_in: int = 0
    thin: int = 1
    n_chains: int = 2
    seed: int = 0
    adapt_during_burnin: bool = True
    store_dyad_loglik: bool = True
    loglik_dtype: str = "float64"
    n_jobs: int = 1

    def __post_init__(self):
        if self.n_iter <= 0 or self.thin <= 0 or self.n_chains <= 0:
            raise ValueError("n_iter, thin and n_chains must be positive")
        if not 0 <= self.burn_in < self.n_iter:
            raise ValueError("burn_in must satisfy 0 <= burn_in < n_iter")

    @property
    def n_stored(self):
        return (self.n_iter - self.burn_in) // self.thin

    @classmethod
    def paper_protocol(cls, seed=0, **kw):
        """60,000 iterations with a 10,000 burn-in, no thinning."""
        return cls(n_iter=60_000, burn_in=10_000, thin=1, seed=seed, **kw)

    def as_dict(self):
        return dataclasses.asdict(self)


@dataclass
class AdaptiveScale:
    """Robbins-Monro tuned log step size for a random-walk proposal."""

    log_step: float = 0.0
    target_accept: float = 0.44
    adapt_count: int = 0

    @property
    def step(self):
        return float(np.exp(self.log_step))

    def update(self, accepted):
        self.adapt_count += 1
        self.log_step += (float(accepted) - self.target_accept) / self.adapt_count**0.6


def target_accept_rate(dim):
    """Standard optimal-scaling acceptance targets by proposal dimension."""
    if dim <= 1:
        return 0.44
    if dim == 2:
        return 0.35
    return 0.234


def rw_metropolis_step(log_target, current, scale, rng, adapt=True):
    """One spherical-Gaussian random-walk Metropolis step.

    Returns ``(new_state, accepted)``. A NaN log target is an error; -inf at
    the proposal is an automatic rejection. When ``adapt`` is set the scale's
    log step is nudged toward its target acceptance rate.
    """
    current = np.asarray(current, dtype=np.float64)
    scalar = current.ndim == 0
    lp_cur = float(log_target(current if not scalar else float(current)))
    if np.isnan(lp_cur) or np.isinf(lp_cur):
        raise ValueError("log target not finite at current state")
    prop = current + scale.step * rng.standard_normal(current.shape)
    lp_prop = float(log_target(prop if not scalar else float(prop)))
    if np.isnan(lp_prop):
        raise ValueError("log target returned NaN at proposal")
    accepted = np.log(rng.random()) < lp_prop - lp_cur
    if adapt:
        scale.update(accepted)
    new = prop if accepted else current
    return (float(new) if scalar else new), bool(accepted)


def sample_inv_gamma(shape, rate, rng):
    """Draw from an inverse-gamma distribution with the given shape and rate."""
    return rate / rng.gamma(shape)


def gelman_rubin(chains):
    """Potential scale reduction factor over per-chain scalar traces."""
    chains = [np.asarray(c, dtype=np.float64) for c in chains]
    if len(chains) < 2:
        raise ValueError("gelman_rubin needs at least two chains")
    n = min(len(c) for c in chains)
    if n < 2:
        raise ValueError("chains must have length >= 2")
    x = np.stack([c[:n] for c in chains])
    within = x.var(axis=1, ddof=1).mean()
    if within == 0:
        raise ValueError("zero within-chain variance")
    between = n * x.mean(axis=1).var(ddof=1)
    var_hat = (n - 1) / n * within + between / n
    return float(np.sqrt(var_hat / within))


@dataclass
class ChainSamples:
    params: dict
    log_joint: np.ndarray
    dyad_loglik: np.ndarray = None


@dataclass
class PosteriorSamples:
    model: str
    config: McmcConfig
    n_actors: int
    dyads: np.ndarray
    chains: list = field(default_factory=list)

    @property
    def n_stored_total(self):
        return sum(c.log_joint.shape[0] for c in self.chains)

    def param(self, name):
        """Stacked samples of one parameter over all chains."""
        return np.concatenate([c.params[name] for c in self.chains], axis=0)

    def param_names(self):
        return list(self.chains[0].params)

    def scalar_names(self):
        return [k for k, v in self.chains[0].params.items() if v.ndim == 1]

    def dyad_loglik_matrix(self):
        if self.chains[0].dyad_loglik is None:
            raise ValueError("dyad log-likelihoods were not stored")
        return np.concatenate([c.dyad_loglik for c in self.chains], axis=0)

    def rhat_table(self):
        """Gelman-Rubin value per monitored scalar (requires >= 2 chains)."""
        out = {}
        names = self.scalar_names() + ["log_joint"]
        for name in names:
            if name == "log_joint":
                traces = [c.log_joint for c in self.chains]
            else:
                traces = [c.params[name] for c in self.chains]
            try:
                out[name] = gelman_rubin(traces)
            except ValueError:
                out[name] = float("nan")
        return out

    # -- serialization ------------------------------------------------------

    def save(self, outdir):
        outdir = pathlib.Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        shapes = {k: list(v.shape[1:]) for k, v in self.chains[0].params.items()}
        dtypes = {k: str(v.dtype) for k, v in self.chains[0].params.items()}
        manifest = {
            "format": "latnet-samples-v1",
            "model": self.model,
            "n_actors": self.n_actors,
            "n_chains": len(self.chains),
            "config": self.config.as_dict(),
            "array_shapes": shapes,
            "array_dtypes": dtypes,
        }
        (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2))
        np.save(outdir / "dyads.npy", self.dyads)
        for c, chain in enumerate(self.chains):
            cols, header = [], []
            for name, arr in chain.params.items():
                flat = arr.reshape(arr.shape[0], -1)
                cols.append(flat.astype(np.float64))
                if flat.shape[1] == 1 and arr.ndim == 1:
                    header.append(name)
                else:
                    for idx in np.ndindex(*arr.shape[1:]):
                        header.append("_".join([name, *map(str, idx)]))
            cols.append(chain.log_joint[:, None])
            header.append("log_joint")
            data = np.hstack(cols)
            np.savetxt(outdir / f"samples_chain{c}.csv", data, delimiter=",",
                       header=",".join(header), comments="", fmt="%.17g")
            if chain.dyad_loglik is not None:
                np.save(outdir / f"dyad_loglik_chain{c}.npy", chain.dyad_loglik)

    @classmethod
    def load(cls, outdir):
        outdir = pathlib.Path(outdir)
        manifest = json.loads((outdir / "manifest.json").read_text())
        cfg = McmcConfig(**manifest["config"])
        dyads = np.load(outdir / "dyads.npy")
        chains = []
        for c in range(manifest["n_chains"]):
            data = np.loadtxt(outdir / f"samples_chain{c}.csv", delimiter=",",
                              skiprows=1, ndmin=2)
            params = {}
            col = 0
            for name, shape in manifest["array_shapes"].items():
                width = int(np.prod(shape)) if shape else 1
                block = data[:, col:col + width]
                arr = block.reshape(data.shape[0], *shape)
                params[name] = arr.astype(manifest["array_dtypes"][name])
                col += width
            log_joint = data[:, col]
            ll_path = outdir / f"dyad_loglik_chain{c}.npy"
            ll = np.load(ll_path) if ll_path.exists() else None
            chains.append(ChainSamples(params=params, log_joint=log_joint,
                                       dyad_loglik=ll))
        return cls(model=manifest["model"], config=cfg,
                   n_actors=manifest["n_actors"], dyads=dyads, chains=chains)


def chain_rng(seed, chain_index):
    """Independent per-chain generator derived from (seed, chain index)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**63 - 1),
                                                         int(chain_index)]))


def _run_single_chain(model, ws, cfg, chain_index):
    rng = chain_rng(cfg.seed, chain_index)
    state = model.init_state(ws, rng)
    n_stored = cfg.n_stored
    store = None
    log_joint = np.empty(n_stored)
    ll_dtype = np.dtype(cfg.loglik_dtype)
    dyad_ll = (np.empty((n_stored, ws.di.shape[0]), dtype=ll_dtype)
               if cfg.store_dyad_loglik else None)
    pos = 0
    for it in range(cfg.n_iter):
        adapt = cfg.adapt_during_burnin and it < cfg.burn_in
        try:
            model.sweep(ws, state, rng, adapt)
        except Exception as exc:
            raise RuntimeError(f"kernel failure at iteration {it}") from exc
        if it < cfg.burn_in or (it - cfg.burn_in + 1) % cfg.thin != 0:
            continue
        ll = model.dyad_loglik(ws, state)
        pvals = model.params(state)
        if store is None:
            store = {k: np.empty((n_stored, *np.shape(v)), dtype=np.asarray(v).dtype)
                     for k, v in pvals.items()}
        for k, v in pvals.items():
            store[k][pos] = v
        log_joint[pos] = ll.sum() + model.log_prior(state)
        if dyad_ll is not None:
            dyad_ll[pos] = ll
        pos += 1
    assert pos == n_stored
    if store is None:
        store = {}
    return ChainSamples(params=store, log_joint=log_joint, dyad_loglik=dyad_ll)


def run_chains(model, net, cfg):
    """Run ``cfg.n_chains`` independent chains of ``model`` on ``net``."""
    ws = model.prepare(net)
    if cfg.n_jobs > 1 and cfg.n_chains > 1:
        from joblib import Parallel, delayed
        chains = Parallel(n_jobs=cfg.n_jobs)(
            delayed(_run_single_chain)(model, ws, cfg, c)
            for c in range(cfg.n_chains))
    else:
        chains = [_run_single_chain(model, ws, cfg, c)
                  for c in range(cfg.n_chains)]
    dyads = np.column_stack([ws.di, ws.dj])
    return PosteriorSamples(model=model.name, config=cfg, n_actors=net.n_actors,
                            dyads=dyads, chains=chains)
