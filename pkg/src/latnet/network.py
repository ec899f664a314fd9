"""Undirected binary network container, edge-list IO and descriptive statistics."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np


class EdgeListError(ValueError):
    """Raised for malformed edge-list input; carries the offending line number."""

    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class UndefinedStatistic(FloatingPointError):
    """A descriptive statistic is undefined for the given network."""


@dataclass
class Network:
    """Symmetric binary adjacency over ``n_actors`` actors, no self-loops.

    ``observed_mask`` flags which off-diagonal dyads are observed; masked-out
    dyads carry value 0 and are excluded from likelihoods and statistics.
    """

    adjacency: np.ndarray
    observed_mask: np.ndarray = None
    labels: list = field(default=None)

    def __post_init__(self):
        a = np.asarray(self.adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        if np.any(np.diag(a) != 0):
            raise ValueError("self-loops are not allowed")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        self.adjacency = a.astype(np.float64)
        if self.observed_mask is None:
            m = ~np.eye(a.shape[0], dtype=bool)
        else:
            m = np.asarray(self.observed_mask, dtype=bool)
            if m.shape != a.shape:
                raise ValueError("observed_mask shape mismatch")
            if not np.array_equal(m, m.T):
                raise ValueError("observed_mask must be symmetric")
            m = m & ~np.eye(a.shape[0], dtype=bool)
        if np.any(self.adjacency[~m] != 0):
            raise ValueError("masked-out dyads must carry value 0")
        self.observed_mask = m
        self.adjacency.flags.writeable = False
        self.observed_mask.flags.writeable = False

    @property
    def n_actors(self):
        return self.adjacency.shape[0]

    @property
    def fully_observed(self):
        return bool(self.observed_mask.sum() == self.n_actors * (self.n_actors - 1))

    def observed_dyads(self):
        """Index arrays (i, j) of observed dyads with i < j."""
        iu, ju = np.triu_indices(self.n_actors, k=1)
        keep = self.observed_mask[iu, ju]
        return iu[keep], ju[keep]

    def dyad_values(self):
        i, j = self.observed_dyads()
        return self.adjacency[i, j]

    @property
    def edge_count(self):
        return int(self.dyad_values().sum())

    def degrees(self):
        return self.adjacency.sum(axis=0).astype(np.int64)

    def mask_dyads(self, i_idx, j_idx):
        """Return a copy with the given dyads marked unobserved (and zeroed)."""
        mask = self.observed_mask.copy()
        adj = self.adjacency.copy()
        mask[i_idx, j_idx] = mask[j_idx, i_idx] = False
        adj[i_idx, j_idx] = adj[j_idx, i_idx] = 0.0
        return Network(adj, mask, self.labels)


@dataclass
class NetStats:
    density: float
    transitivity: float
    assortativity: float
    degree_sequence: np.ndarray
    edge_count: int

    def as_dict(self):
        return {
            "density": self.density,
            "transitivity": self.transitivity,
            "assortativity": self.assortativity,
            "edge_count": self.edge_count,
        }


def density(net: Network) -> float:
    if net.n_actors < 2:
        raise ValueError("density needs at least two actors")
    n_obs = net.observed_mask.sum() // 2
    if n_obs == 0:
        raise ValueError("no observed dyads")
    return net.edge_count / n_obs


def transitivity(net: Network) -> float:
    """Global clustering coefficient: 3 * triangles / connected triples.

    Returns NaN when the network has no connected triples.
    """
    a = net.adjacency
    deg = a.sum(axis=0)
    triples = float((deg * (deg - 1)).sum())  # ordered 2-paths
    if triples == 0:
        return float("nan")
    closed = float(np.trace(a @ a @ a))  # 6 * triangles
    return closed / triples


def degree_assortativity(net: Network) -> float:
    """Pearson correlation of degrees across edge endpoints (both orientations).

    Returns NaN when the endpoint degrees have zero variance (regular graphs).
    """
    src, dst = np.nonzero(net.adjacency)
    if src.size == 0:
        return float("nan")
    deg = net.degrees().astype(np.float64)
    x, y = deg[src], deg[dst]
    vx = x.var()
    if vx == 0:
        return float("nan")
    return float(((x - x.mean()) * (y - y.mean())).mean() / vx)


def network_stats(net: Network) -> NetStats:
    return NetStats(
        density=density(net),
        transitivity=transitivity(net),
        assortativity=degree_assortativity(net),
        degree_sequence=net.degrees(),
        edge_count=net.edge_count,
    )


def sample_random_graph(n_actors: int, theta: float, rng) -> Network:
    """Erdos-Renyi graph: each dyad i<j is an edge independently with prob theta."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    a = np.zeros((n_actors, n_actors))
    iu, ju = np.triu_indices(n_actors, k=1)
    edges = rng.random(iu.size) < theta
    a[iu[edges], ju[edges]] = 1.0
    a += a.T
    return Network(a)


def loglik_random_graph(net: Network, theta: float) -> float:
    """Bernoulli log-likelihood sum(y log theta + (1-y) log(1-theta)) over observed dyads."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError("theta must lie in [0, 1]")
    y = net.dyad_values()
    n1 = y.sum()
    n0 = y.size - n1
    if theta == 0.0:
        return 0.0 if n1 == 0 else float("-inf")
    if theta == 1.0:
        return 0.0 if n0 == 0 else float("-inf")
    return float(n1 * np.log(theta) + n0 * np.log1p(-theta))


def _parse_tokens(line):
    line = line.strip()
    if "," in line:
        return [t.strip() for t in line.split(",") if t.strip()]
    return line.split()


def load_edge_list(source, n_actors=None) -> Network:
    """Parse a whitespace- or comma-separated edge list into a Network.

    Lines starting with ``#`` are comments; a ``# nodes: N`` comment (or the
    ``n_actors`` argument) fixes the actor count so isolated actors survive.
    Integer identifiers are taken as 0-based indices; string labels are mapped
    to contiguous indices in first-appearance order (mapping kept in
    ``Network.labels``). Duplicate edges collapse silently.
    """
    if isinstance(source, (str, bytes)):
        source = io.StringIO(source)
    edges = []
    tokens_seen = []
    declared_n = n_actors
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.lower().startswith("nodes:"):
                declared_n = int(body.split(":", 1)[1])
            continue
        if not line:
            continue
        toks = _parse_tokens(line)
        if len(toks) != 2:
            raise EdgeListError(lineno, f"expected two identifiers, got {line!r}")
        a, b = toks
        if a == b:
            raise EdgeListError(lineno, f"self-loop {a!r}")
        edges.append((lineno, a, b))
        tokens_seen.extend(toks)

    all_int = all(t.lstrip("-").isdigit() for t in tokens_seen)
    labels = None
    if all_int:
        idx_edges = []
        for lineno, a, b in edges:
            ia, ib = int(a), int(b)
            if ia < 0 or ib < 0:
                raise EdgeListError(lineno, "negative actor index")
            idx_edges.append((ia, ib))
        n = max((max(e) for e in idx_edges), default=-1) + 1
    else:
        mapping = {}
        idx_edges = []
        for _, a, b in edges:
            for t in (a, b):
                if t not in mapping:
                    mapping[t] = len(mapping)
            idx_edges.append((mapping[a], mapping[b]))
        labels = list(mapping)
        n = len(mapping)
    if declared_n is not None:
        if declared_n < n:
            raise ValueError(f"declared node count {declared_n} below maximum index")
        n = declared_n
    adj = np.zeros((n, n))
    for ia, ib in idx_edges:
        adj[ia, ib] = adj[ib, ia] = 1.0
    return Network(adj, labels=labels)


def save_edge_list(net: Network, sink) -> None:
    """Write ``net`` in the format accepted by :func:`load_edge_list`."""
    close = False
    if isinstance(sink, (str, bytes)):
        sink = open(sink, "w")
        close = True
    try:
        sink.write(f"# nodes: {net.n_actors}\n")
        if net.labels is not None:
            for k, name in enumerate(net.labels):
                sink.write(f"# label {k}: {name}\n")
        i_idx, j_idx = np.nonzero(np.triu(net.adjacency, k=1))
        for i, j in zip(i_idx, j_idx):
            sink.write(f"{i} {j}\n")
    finally:
        if close:
            sink.close()
