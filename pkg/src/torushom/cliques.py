"""Clique counting and enumeration on threshold graphs.

Cliques are generated by ordered extension: a clique is only ever extended
by common neighbors with a strictly larger vertex index, so every clique is
produced exactly once and in a deterministic order.  Adjacency is stored as
packed 64-bit words.  The hot counting path is JIT-compiled with numba when
available; a bit-identical pure-Python fallback is kept both as a safety net
and as an independent implementation for cross-checking.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


def pack_adjacency(adj_bool: np.ndarray) -> np.ndarray:
    """Pack a boolean (n, n) adjacency matrix into (n, ceil(n/64)) uint64."""
    n = adj_bool.shape[0]
    w = max(1, (n + 63) // 64)
    packed = np.zeros((n, w), dtype=np.uint64)
    rows, cols = np.nonzero(adj_bool)
    for r, c in zip(rows, cols):
        packed[r, c >> 6] |= np.uint64(1) << np.uint64(c & 63)
    return packed


@njit(cache=True)
def _ctz(b):
    # index of the lowest set bit of a nonzero uint64
    i = 0
    if b & np.uint64(0xFFFFFFFF) == np.uint64(0):
        b >>= np.uint64(32)
        i += 32
    if b & np.uint64(0xFFFF) == np.uint64(0):
        b >>= np.uint64(16)
        i += 16
    if b & np.uint64(0xFF) == np.uint64(0):
        b >>= np.uint64(8)
        i += 8
    if b & np.uint64(0xF) == np.uint64(0):
        b >>= np.uint64(4)
        i += 4
    if b & np.uint64(0x3) == np.uint64(0):
        b >>= np.uint64(2)
        i += 2
    if b & np.uint64(0x1) == np.uint64(0):
        i += 1
    return i


@njit(cache=True)
def _count_cliques_kernel(adj, max_size, cap):
    n = adj.shape[0]
    w = adj.shape[1]
    counts = np.zeros(n + 1, dtype=np.int64)
    rem = np.zeros((n + 1, w), dtype=np.uint64)
    ones = np.uint64(0xFFFFFFFFFFFFFFFF)
    total = 0
    for v in range(n):
        counts[1] += 1
        total += 1
        if cap > 0 and total > cap:
            return counts, False
        if max_size <= 1:
            continue
        for j in range(w):
            rem[0, j] = adj[v, j]
        wv = v >> 6
        for j in range(wv):
            rem[0, j] = np.uint64(0)
        bit = v & 63
        if bit == 63:
            rem[0, wv] = np.uint64(0)
        else:
            rem[0, wv] &= ones << np.uint64(bit + 1)
        level = 0
        while level >= 0:
            u = -1
            for j in range(w):
                if rem[level, j] != np.uint64(0):
                    u = (j << 6) + _ctz(rem[level, j])
                    break
            if u < 0:
                level -= 1
                continue
            rem[level, u >> 6] &= ~(np.uint64(1) << np.uint64(u & 63))
            size = level + 2
            counts[size] += 1
            total += 1
            if cap > 0 and total > cap:
                return counts, False
            if size < max_size:
                nonzero = False
                for j in range(w):
                    x = rem[level, j] & adj[u, j]
                    rem[level + 1, j] = x
                    if x != np.uint64(0):
                        nonzero = True
                if nonzero:
                    level += 1
    return counts, True


def _count_cliques_python(adj_bool: np.ndarray, max_size: int, cap: int):
    """Pure-Python mirror of the kernel using int bitsets."""
    n = adj_bool.shape[0]
    neigh = []
    for v in range(n):
        m = 0
        for u in np.nonzero(adj_bool[v])[0]:
            m |= 1 << int(u)
        neigh.append(m)
    counts = np.zeros(n + 1, dtype=np.int64)
    total = 0
    above = [(~((1 << (v + 1)) - 1)) for v in range(n)]
    for v in range(n):
        counts[1] += 1
        total += 1
        if cap > 0 and total > cap:
            return counts, False
        if max_size <= 1:
            continue
        stack = [neigh[v] & above[v]]
        while stack:
            cand = stack[-1]
            if cand == 0:
                stack.pop()
                continue
            u = (cand & -cand).bit_length() - 1
            stack[-1] = cand & (cand - 1)
            size = len(stack) + 1
            counts[size] += 1
            total += 1
            if cap > 0 and total > cap:
                return counts, False
            if size < max_size:
                child = stack[-1] & neigh[u]
                if child:
                    stack.append(child)
    return counts, True


def count_cliques(adj_bool: np.ndarray, max_size: int | None = None,
                  cap: int = 10_000_000):
    """Count cliques of every size in an undirected graph.

    Returns (counts, complete): counts[k] is the number of k-cliques
    (counts[1] = vertex count).  If the running total exceeds ``cap``,
    enumeration stops and complete is False.
    """
    n = adj_bool.shape[0]
    if max_size is None:
        max_size = n
    if n == 0:
        return np.zeros(1, dtype=np.int64), True
    if _HAVE_NUMBA and n > 16:
        packed = pack_adjacency(adj_bool)
        counts, complete = _count_cliques_kernel(packed, max_size, cap)
    else:
        counts, complete = _count_cliques_python(adj_bool, max_size, cap)
    top = max(1, int(np.nonzero(counts)[0].max(initial=1)))
    return counts[: top + 1], bool(complete)


def enumerate_cliques(adj_bool: np.ndarray, max_size: int,
                      cap: int = 10_000_000):
    """List all cliques up to ``max_size`` as sorted vertex tuples.

    Returns (by_size, complete) where by_size[k] is the lexicographically
    ordered list of k-cliques, k = 1..max_size.
    """
    n = adj_bool.shape[0]
    neigh = []
    for v in range(n):
        m = 0
        for u in np.nonzero(adj_bool[v])[0]:
            m |= 1 << int(u)
        neigh.append(m)
    by_size: dict[int, list[tuple[int, ...]]] = {k: [] for k in range(1, max_size + 1)}
    total = 0
    for v in range(n):
        by_size[1].append((v,))
        total += 1
        if total > cap:
            return by_size, False
        if max_size <= 1:
            continue
        stack = [(v,), ]
        cands = [neigh[v] & ~((1 << (v + 1)) - 1)]
        while cands:
            cand = cands[-1]
            if cand == 0:
                cands.pop()
                stack.pop()
                continue
            u = (cand & -cand).bit_length() - 1
            cands[-1] = cand & (cand - 1)
            clique = stack[-1] + (u,)
            by_size[len(clique)].append(clique)
            total += 1
            if total > cap:
                return by_size, False
            if len(clique) < max_size:
                child = cands[-1] & neigh[u]
                if child:
                    stack.append(clique)
                    cands.append(child)
    return by_size, True


def brute_force_clique_counts(adj_bool: np.ndarray, max_size: int) -> np.ndarray:
    """Exhaustive k-subset checker; independent oracle for small graphs."""
    n = adj_bool.shape[0]
    counts = np.zeros(max_size + 1, dtype=np.int64)
    for k in range(1, max_size + 1):
        for subset in combinations(range(n), k):
            if all(adj_bool[i, j] for i, j in combinations(subset, 2)):
                counts[k] += 1
    return counts
