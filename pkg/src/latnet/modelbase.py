"""Shared per-fit workspace consumed by the model sweep kernels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import Network


@dataclass
class Workspace:
    """Read-only arrays shared by all chains of one fit."""

    net: Network
    adj: np.ndarray        # (I, I) float64
    mask_u8: np.ndarray    # (I, I) uint8, diagonal 0
    di: np.ndarray         # observed dyads i < j, int64
    dj: np.ndarray

    @property
    def n_actors(self):
        return self.adj.shape[0]


def make_workspace(net: Network) -> Workspace:
    di, dj = net.observed_dyads()
    return Workspace(
        net=net,
        adj=np.ascontiguousarray(net.adjacency, dtype=np.float64),
        mask_u8=np.ascontiguousarray(net.observed_mask, dtype=np.uint8),
        di=np.ascontiguousarray(di, dtype=np.int64),
        dj=np.ascontiguousarray(dj, dtype=np.int64),
    )


def workspace_from_adjacency(adj, mask=None) -> Workspace:
    """Workspace over raw arrays (used by the joint-distribution samplers,
    where the adjacency is redrawn in place each iteration)."""
    adj = np.ascontiguousarray(adj, dtype=np.float64)
    n = adj.shape[0]
    if mask is None:
        mask = ~np.eye(n, dtype=bool)
    iu, ju = np.triu_indices(n, k=1)
    keep = mask[iu, ju]
    return Workspace(
        net=None,
        adj=adj,
        mask_u8=np.ascontiguousarray(mask, dtype=np.uint8),
        di=np.ascontiguousarray(iu[keep], dtype=np.int64),
        dj=np.ascontiguousarray(ju[keep], dtype=np.int64),
    )


def symmetrize_draw(probs, rng):
    """Draw a symmetric 0/1 adjacency matrix from per-dyad probabilities."""
    n = probs.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    adj = np.zeros((n, n))
    edges = rng.random(iu.size) < probs[iu, ju]
    adj[iu[edges], ju[edges]] = 1.0
    return adj + adj.T


def log_inv_gamma_pdf(x, shape, rate):
    from scipy.special import gammaln
    return shape * np.log(rate) - gammaln(shape) - (shape + 1) * np.log(x) - rate / x


def log_normal_pdf(x, mean, var):
    return -0.5 * (np.log(2.0 * np.pi * var) + (x - mean) ** 2 / var)
