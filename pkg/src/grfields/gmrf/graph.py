"""Weighted undirected graphs, regular grids, Laplacians and edge-list files."""

import math
from dataclasses import dataclass

import numpy as np

from .._validation import check_positive_int
from ..exceptions import ConfigurationError, DomainError
from ..sparse import from_arrays


@dataclass(frozen=True, eq=False)
class Graph:
    """``n`` vertices, edges ``(i, j, w)`` stored with ``i < j`` in sorted order."""

    n: int
    edges: tuple
    coords: np.ndarray = None

    def __post_init__(self):
        n = check_positive_int(self.n, "vertex count", error=DomainError)
        canon = {}
        for e in self.edges:
            if len(e) == 2:
                i, j, w = int(e[0]), int(e[1]), 1.0
            else:
                i, j, w = int(e[0]), int(e[1]), float(e[2])
            if i == j:
                raise DomainError(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise DomainError(f"edge ({i}, {j}) out of range for {n} vertices")
            if not math.isfinite(w) or w < 0:
                raise DomainError(f"edge ({i}, {j}) has invalid weight {w!r}")
            key = (min(i, j), max(i, j))
            if key in canon:
                raise DomainError(f"duplicate edge {key}")
            canon[key] = w
        object.__setattr__(self, "edges", tuple((i, j, canon[i, j]) for i, j in sorted(canon)))
        if self.coords is not None:
            c = np.array(self.coords, dtype=float)
            if c.ndim == 1:
                c = c[:, None]
            if c.shape[0] != n:
                raise DomainError("coords must have one row per vertex")
            c.flags.writeable = False
            object.__setattr__(self, "coords", c)

    def degrees(self):
        deg = np.zeros(self.n, dtype=np.int64)
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def edge_arrays(self):
        if not self.edges:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0)
        e = np.array(self.edges, dtype=float)
        return e[:, 0].astype(np.int64), e[:, 1].astype(np.int64), e[:, 2]


def grid_graph(side, dims=2):
    """Unit-spacing lattice path (``dims=1``) or 4-neighbour square grid (``dims=2``).

    Vertex ``i * side + j`` sits at coordinates ``(i, j)``.
    """
    side = check_positive_int(side, "side", minimum=2)
    if dims not in (1, 2):
        raise ConfigurationError(f"grid graphs are 1-D or 2-D, got dims={dims!r}")
    if dims == 1:
        edges = [(i, i + 1, 1.0) for i in range(side - 1)]
        return Graph(side, tuple(edges), np.arange(side, dtype=float))
    edges = []
    for i in range(side):
        for j in range(side):
            v = i * side + j
            if j + 1 < side:
                edges.append((v, v + 1, 1.0))
            if i + 1 < side:
                edges.append((v, v + side, 1.0))
    ii, jj = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
    coords = np.stack([ii.reshape(-1), jj.reshape(-1)], axis=1).astype(float)
    return Graph(side * side, tuple(edges), coords)


def graph_laplacian(g):
    """``L = D - W`` in symmetric sparse storage."""
    i, j, w = g.edge_arrays()
    deg = np.zeros(g.n)
    np.add.at(deg, i, w)
    np.add.at(deg, j, w)
    diag = np.arange(g.n)
    rows = np.concatenate([diag, np.maximum(i, j)])
    cols = np.concatenate([diag, np.minimum(i, j)])
    vals = np.concatenate([deg, -w])
    return from_arrays(g.n, rows, cols, vals)


def write_edge_list(g, path):
    """``i j weight`` per line, 0-based, after a ``# vertices N`` header."""
    lines = [f"# vertices {g.n}"]
    lines.extend(f"{i} {j} {w!r}" for i, j, w in g.edges)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_edge_list(path, n=None):
    """Parse an edge list; the vertex count comes from ``n``, a ``# vertices N`` line, or the largest index."""
    edges = []
    declared = None
    with open(path, encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "vertices":
                    declared = int(parts[1])
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise DomainError(f"{path}:{lineno}: expected 'i j [weight]'")
            try:
                i, j = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError as exc:
                raise DomainError(f"{path}:{lineno}: {exc}") from exc
            edges.append((i, j, w))
    if n is None:
        n = declared if declared is not None else 1 + max((max(i, j) for i, j, _ in edges), default=-1)
    return Graph(n, tuple(edges))
