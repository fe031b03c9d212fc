"""Network adjacency structures and random-graph generators.

A :class:`Network` couples a binary adjacency matrix (zero diagonal, no
self-connections) with its row-normalized weight matrix W: each row with
positive out-degree is divided by that degree so it sums to one; rows of
isolated nodes are identically zero, so the neighbour-average regressor of
such a node is zero.  Adjacency may be asymmetric (two of the generators
below produce directed edges); only rows of W are ever consumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import Rng


@dataclass(frozen=True)
class Network:
    adjacency: np.ndarray  # (N, N) binary, zero diagonal
    weights: np.ndarray    # (N, N) row-normalized, zero rows for isolated nodes

    @property
    def n_nodes(self) -> int:
        return self.adjacency.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        """Out-degrees (row sums of the adjacency)."""
        return self.adjacency.sum(axis=1)

    def __post_init__(self):
        self.adjacency.setflags(write=False)
        self.weights.setflags(write=False)


def row_normalize(adjacency: np.ndarray) -> Network:
    """Build a :class:`Network` from a binary adjacency matrix.

    Parameters
    ----------
    adjacency : (N, N) array-like
        Binary entries, zero diagonal.

    Raises
    ------
    ValueError
        If the matrix is not square, has a nonzero diagonal entry, or
        contains an entry outside {0, 1}.
    """
    adj = np.asarray(adjacency)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {adj.shape}")
    if not np.isin(adj, (0, 1)).all():
        bad = np.argwhere(~np.isin(adj, (0, 1)))[0]
        raise ValueError(
            f"adjacency entries must be 0 or 1; entry {tuple(bad)} is {adj[tuple(bad)]}")
    adj = adj.astype(np.int64)
    diag = np.diagonal(adj)
    if diag.any():
        i = int(np.argmax(diag != 0))
        raise ValueError(f"self-connection not allowed: nonzero diagonal at node {i}")
    deg = adj.sum(axis=1)
    weights = np.zeros(adj.shape, dtype=float)
    nz = deg > 0
    weights[nz] = adj[nz] / deg[nz, None]
    return Network(adjacency=adj, weights=weights)


def gen_d_neighbourhood(n: int, d: int) -> Network:
    """Band network: i and j are connected iff 0 < |i - j| <= d."""
    if n < 2:
        raise ValueError("need at least 2 nodes")
    if d <= 0:
        raise ValueError(f"band width must be positive, got {d}")
    if d >= n:
        raise ValueError(f"band width {d} must be smaller than n={n}")
    idx = np.arange(n)
    dist = np.abs(idx[:, None] - idx[None, :])
    adj = ((dist > 0) & (dist <= d)).astype(np.int64)
    return row_normalize(adj)


def gen_random(n: int, d_max: float = 5.0, seed: int = 0) -> Network:
    """Random out-degree network.

    Each node i draws D_i ~ U(0, d_max) and connects to floor(D_i) distinct
    targets chosen uniformly from the other nodes.  Directed by construction.
    """
    if n < 2:
        raise ValueError("need at least 2 nodes")
    rng = Rng(seed)
    adj = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        k = int(rng.uniform(0.0, d_max))
        k = min(k, n - 1)
        chosen: set[int] = set()
        while len(chosen) < k:
            j = rng.randbelow(n)
            if j != i and j not in chosen:
                chosen.add(j)
                adj[i, j] = 1
    return row_normalize(adj)


def _power_law_sizes(n: int, a: float, rng: Rng) -> np.ndarray:
    """Draw one size per node from P{s = x} proportional to x^-a on 1..n."""
    x = np.arange(1, n + 1, dtype=float)
    pmf = x ** (-a)
    cdf = np.cumsum(pmf / pmf.sum())
    sizes = np.empty(n, dtype=float)
    for i in range(n):
        u = rng.uniform()
        sizes[i] = 1 + int(np.searchsorted(cdf, u, side="right"))
    return sizes


def gen_power_law(n: int, a: float = 2.5, d_max: float = 5.0, seed: int = 0) -> Network:
    """Power-law attachment network.

    Node sizes s_i follow a discrete power law with scaling ``a``; each node
    picks floor(U(0, d_max)) targets without replacement with probability
    proportional to the target sizes, so a few large-s nodes collect most
    in-links.  Directed by construction.
    """
    if n < 2:
        raise ValueError("need at least 2 nodes")
    if a <= 1:
        raise ValueError(f"scaling parameter must exceed 1, got {a}")
    rng = Rng(seed)
    sizes = _power_law_sizes(n, a, rng)
    adj = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        k = int(rng.uniform(0.0, d_max))
        k = min(k, n - 1)
        # sequential weighted draws without replacement, renormalizing after
        # each pick; own weight removed up front (no self-loops)
        w = sizes.copy()
        w[i] = 0.0
        for _ in range(k):
            total = w.sum()
            if total <= 0.0:
                break
            u = rng.uniform() * total
            j = int(np.searchsorted(np.cumsum(w), u, side="right"))
            j = min(j, n - 1)
            adj[i, j] = 1
            w[j] = 0.0
    return row_normalize(adj)


def gen_block(n: int, k: int, p_in: float = 0.5, p_out_scale: float = 0.001,
              seed: int = 0) -> Network:
    """Stochastic block network with K equally likely group labels.

    Same-group pairs connect with probability ``p_in``; cross-group pairs
    with ``p_out_scale / n``.  Undirected (the pairwise coin decides both
    directions).
    """
    if n < 2:
        raise ValueError("need at least 2 nodes")
    if not 1 <= k <= n:
        raise ValueError(f"block count must be in [1, {n}], got {k}")
    rng = Rng(seed)
    labels = np.array([rng.randbelow(k) for _ in range(n)], dtype=np.int64)
    p_out = p_out_scale / n
    adj = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            p = p_in if labels[i] == labels[j] else p_out
            if rng.uniform() < p:
                adj[i, j] = 1
                adj[j, i] = 1
    return row_normalize(adj)


_GENERATORS = {
    "band": gen_d_neighbourhood,
    "random": gen_random,
    "powerlaw": gen_power_law,
    "block": gen_block,
}


def generate(kind: str, n: int, seed: int = 0, **kwargs) -> Network:
    """Dispatch to a generator by name: band | random | powerlaw | block."""
    try:
        gen = _GENERATORS[kind]
    except KeyError:
        raise ValueError(
            f"unknown network kind {kind!r}; expected one of {sorted(_GENERATORS)}")
    if kind == "band":
        return gen(n, **kwargs)
    return gen(n, seed=seed, **kwargs)


def save_edge_list(net: Network, path) -> None:
    """Write one "i,j" line per directed edge, with a node-count header."""
    lines = [f"# nodes: {net.n_nodes}"]
    rows, cols = np.nonzero(net.adjacency)
    lines.extend(f"{i},{j}" for i, j in zip(rows.tolist(), cols.tolist()))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_edge_list(path, n_nodes: int | None = None, symmetrize: bool = False) -> Network:
    """Read an edge list of 0-based "i,j" lines; '#' starts a comment.

    A leading "# nodes: N" comment pins the node count; otherwise it is
    inferred as max index + 1.  Self-loops and out-of-range indices are
    rejected with their line number.
    """
    edges: list[tuple[int, int, int]] = []  # (i, j, line number)
    declared = n_nodes
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if declared is None and body.lower().startswith("nodes:"):
                    declared = int(body.split(":", 1)[1])
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'i,j', got {line!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: indices must be integers, got {line!r}")
            if i == j:
                raise ValueError(f"{path}:{lineno}: self-loop {i},{j} not allowed")
            if i < 0 or j < 0:
                raise ValueError(f"{path}:{lineno}: negative node index in {line!r}")
            if declared is not None and max(i, j) >= declared:
                raise ValueError(
                    f"{path}:{lineno}: node index {max(i, j)} out of range "
                    f"for {declared} nodes")
            edges.append((i, j, lineno))
    max_idx = max((max(i, j) for i, j, _ in edges), default=-1)
    n = declared if declared is not None else max_idx + 1
    if n < 2:
        raise ValueError(f"{path}: edge list defines fewer than 2 nodes")
    adj = np.zeros((n, n), dtype=np.int64)
    for i, j, _ in edges:
        adj[i, j] = 1
        if symmetrize:
            adj[j, i] = 1
    return row_normalize(adj)
