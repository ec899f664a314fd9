"""Joint-distribution sampler-correctness testing.

Two simulators of the same joint distribution over (parameters, data):
the marginal-conditional one draws fresh prior parameters and data each
iteration; the successive-conditional one alternates the model's MCMC
transition with redrawing the data given the current parameters. If the
transition kernel is correct, every scalar functional has identical
distribution under both, which is checked by z-scores on the first two
moments."""

from __future__ import annotations

import numpy as np

from .modelbase import workspace_from_adjacency


def marginal_conditional(model, n_actors, n_iter, seed=0):
    """Independent draws of the monitored scalars from prior x likelihood."""
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(n_iter):
        state = model.sample_prior_state(n_actors, rng)
        model.sample_adjacency(state, rng)  # data marginalized out
        rows.append(model.geweke_scalars(state))
    return {k: np.array([r[k] for r in rows]) for k in rows[0]}


def successive_conditional(model, n_actors, n_iter, seed=0):
    """Alternate the MCMC transition with redrawing the adjacency, starting
    from a prior draw; adaptation is disabled (frozen kernel)."""
    rng = np.random.default_rng(seed)
    state = model.sample_prior_state(n_actors, rng)
    adj = model.sample_adjacency(state, rng)
    ws = workspace_from_adjacency(adj)
    rows = []
    for _ in range(n_iter):
        model.sweep(ws, state, rng, adapt=False)
        ws.adj[...] = model.sample_adjacency(state, rng)
        rows.append(model.geweke_scalars(state))
    return {k: np.array([r[k] for r in rows]) for k in rows[0]}


def _batch_se(x, n_batches=40):
    """Monte Carlo standard error of the mean via batch means (handles the
    autocorrelation of the successive-conditional chain)."""
    n = x.shape[0] // n_batches * n_batches
    means = x[:n].reshape(n_batches, -1).mean(axis=1)
    return float(means.std(ddof=1) / np.sqrt(n_batches))


def geweke_z_scores(mc, sc):
    """Per-scalar z-scores comparing first and second moments of the two
    simulators. Returns ``{name: {"z_mean": ..., "z_second": ...}}``."""
    out = {}
    for name in mc:
        a, b = np.asarray(mc[name]), np.asarray(sc[name])
        res = {}
        for key, fa, fb in (("z_mean", a, b), ("z_second", a * a, b * b)):
            se = np.hypot(_batch_se(fa), _batch_se(fb))
            res[key] = float((fa.mean() - fb.mean()) / se)
        out[name] = res
    return out


def run_geweke(model, n_actors, n_iter, seed=0, burn=None):
    """Full test: returns z-scores per monitored scalar."""
    mc = marginal_conditional(model, n_actors, n_iter, seed)
    sc = successive_conditional(model, n_actors, n_iter, seed + 1)
    if burn is None:
        burn = n_iter // 10
    sc = {k: v[burn:] for k, v in sc.items()}
    mc = {k: v[burn:] for k, v in mc.items()}
    return geweke_z_scores(mc, sc)
