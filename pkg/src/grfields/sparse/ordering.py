"""Fill-reducing symmetric orderings: approximate minimum degree, reverse Cuthill-McKee."""

import heapq
from collections import deque
from dataclasses import dataclass

import numpy as np

from ..exceptions import ConfigurationError, DomainError

METHODS = ("amd", "rcm", "natural")


@dataclass(frozen=True, eq=False)
class Ordering:
    """``perm[k]`` is the original index placed at position ``k``."""

    perm: np.ndarray
    method: str = "natural"

    def __post_init__(self):
        perm = np.array(self.perm, dtype=np.int64)
        n = perm.size
        if perm.ndim != 1 or not np.array_equal(np.sort(perm), np.arange(n)):
            raise DomainError("ordering is not a permutation of 0..n-1")
        perm.flags.writeable = False
        object.__setattr__(self, "perm", perm)

    @property
    def n(self):
        return int(self.perm.size)

    @property
    def inverse(self):
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.perm.size)
        return inv


def adjacency(A):
    """Sorted neighbour lists of the structural graph of ``A`` (diagonal excluded)."""
    rows, cols, _ = A.triplets()
    off = rows != cols
    rows, cols = rows[off], cols[off]
    nbrs = [[] for _ in range(A.n)]
    for i, j in zip(rows.tolist(), cols.tolist()):
        nbrs[i].append(j)
        nbrs[j].append(i)
    return [sorted(set(x)) for x in nbrs]


def _bfs_levels(adj, start, allowed):
    level = {start: 0}
    queue = deque([start])
    last = [start]
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w in allowed and w not in level:
                level[w] = level[v] + 1
                queue.append(w)
    depth = max(level.values())
    last = [v for v, lv in level.items() if lv == depth]
    return depth, last, level


def _pseudo_peripheral(adj, start, allowed):
    degree = {v: len(adj[v]) for v in allowed}
    depth, last, _ = _bfs_levels(adj, start, allowed)
    while True:
        cand = min(last, key=lambda v: (degree[v], v))
        new_depth, new_last, _ = _bfs_levels(adj, cand, allowed)
        if new_depth <= depth:
            return start
        start, depth, last = cand, new_depth, new_last


def rcm_order(adj):
    n = len(adj)
    degree = [len(a) for a in adj]
    visited = [False] * n
    order = []
    for seed in sorted(range(n), key=lambda v: (degree[v], v)):
        if visited[seed]:
            continue
        # component of seed
        comp = {seed}
        stack = [seed]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        start = _pseudo_peripheral(adj, seed, comp)
        visited[start] = True
        queue = deque([start])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in sorted((w for w in adj[v] if not visited[w]), key=lambda w: (degree[w], w)):
                visited[w] = True
                queue.append(w)
    return order[::-1]


def amd_order(adj):
    """Approximate minimum degree on a quotient graph.

    Eliminated pivots become elements; a variable's degree is bounded by
    ``|A_i| + |L_p \\ i| + sum_e |L_e \\ L_p|`` as in AMD. Elements adjacent to
    the pivot are absorbed, and elements whose variables all lie in the new
    element are absorbed aggressively. No supervariable detection. Ties go to
    the lowest index, so the result is deterministic.
    """
    n = len(adj)
    var_adj = [set(a) for a in adj]
    elems = [set() for _ in range(n)]
    members = {}
    degree = [len(a) for a in adj]
    heap = [(degree[i], i) for i in range(n)]
    heapq.heapify(heap)
    done = [False] * n
    order = []
    while heap:
        d, p = heapq.heappop(heap)
        if done[p] or d != degree[p]:
            continue
        new = set(var_adj[p])
        for e in elems[p]:
            new |= members[e]
        new.discard(p)
        for e in elems[p]:
            for i in members[e]:
                if i != p:
                    elems[i].discard(e)
            del members[e]
        done[p] = True
        order.append(p)
        var_adj[p] = None
        elems[p] = None
        members[p] = new
        for i in new:
            var_adj[i] = {j for j in var_adj[i] if j != p and j not in new}
            elems[i].add(p)
        outside = {}
        for i in new:
            for e in elems[i]:
                if e != p:
                    outside[e] = outside.get(e, len(members[e])) - 1
        for e in sorted(e for e, w in outside.items() if w == 0):
            for i in members[e]:
                elems[i].discard(e)
            del members[e]
        remaining = n - len(order)
        lp = len(new)
        for i in new:
            bound = len(var_adj[i]) + lp - 1
            for e in elems[i]:
                if e != p:
                    bound += outside[e]
            d_new = min(remaining - 1, degree[i] + lp - 1, bound)
            if d_new != degree[i]:
                degree[i] = d_new
                heapq.heappush(heap, (d_new, i))
    return order


def reorder(method, A):
    """Fill-reducing ordering of the symmetric matrix ``A``.

    ``method`` is ``"amd"`` (default choice), ``"rcm"`` or ``"natural"``.
    """
    if method not in METHODS:
        raise ConfigurationError(f"unknown ordering method {method!r}; choose from {METHODS}")
    if method == "natural":
        return Ordering(np.arange(A.n), "natural")
    adj = adjacency(A)
    perm = amd_order(adj) if method == "amd" else rcm_order(adj)
    return Ordering(np.array(perm, dtype=np.int64), method)


def bandwidth(A, ordering=None):
    """Maximum ``|pos(i) - pos(j)|`` over stored entries, under ``ordering``."""
    rows, cols, _ = A.triplets()
    if ordering is not None:
        inv = ordering.inverse
        rows, cols = inv[rows], inv[cols]
    return int(np.max(np.abs(rows - cols))) if rows.size else 0
