"""Counting occurrences of a fixed connected graph pattern in the complex.

An occurrence of a pattern graph Gamma is an injective vertex map whose
required edges all pass the distance threshold (non-induced semantics:
extra edges among the image vertices are allowed).  Unordered occurrences
are the labeled embeddings divided by the automorphism count of Gamma's
edge set; the division is always exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .complexes import GeometricComplex
from .joracle import MAX_ORACLE_DIMENSION
from .moments import ModelParams
from .sampling import SeedSpec

MAX_AUTOMORPHISM_VERTICES = 10


@dataclass(frozen=True)
class GammaGraph:
    n: int
    edges: frozenset[tuple[int, int]]

    @staticmethod
    def make(n: int, edges) -> "GammaGraph":
        if n < 1:
            raise ValueError("pattern needs at least one vertex")
        canon = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError("self loops are not allowed")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            canon.add((min(u, v), max(u, v)))
        g = GammaGraph(n=n, edges=frozenset(canon))
        if not g.is_connected():
            raise ValueError("pattern graph must be connected")
        return g

    @staticmethod
    def from_json(doc: dict) -> "GammaGraph":
        return GammaGraph.make(int(doc["n"]), doc.get("edges", []))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in sorted(self.edges)]}

    @staticmethod
    def edge() -> "GammaGraph":
        return GammaGraph.make(2, [(0, 1)])

    @staticmethod
    def complete(k: int) -> "GammaGraph":
        return GammaGraph.make(k, [(i, j) for i in range(k) for j in range(i + 1, k)])

    def neighbors(self) -> list[set[int]]:
        nb: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return nb

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        nb = self.neighbors()
        seen = {0}
        frontier = [0]
        while frontier:
            v = frontier.pop()
            for u in nb[v]:
                if u not in seen:
                    seen.add(u)
                    frontier.append(u)
        return len(seen) == self.n


def automorphism_count(gamma: GammaGraph) -> int:
    """Number of vertex permutations mapping the edge set onto itself."""
    if gamma.n > MAX_AUTOMORPHISM_VERTICES:
        raise ValueError(
            f"exhaustive automorphism scan limited to n <= {MAX_AUTOMORPHISM_VERTICES}")
    count = 0
    for perm in permutations(range(gamma.n)):
        if all((min(perm[u], perm[v]), max(perm[u], perm[v])) in gamma.edges
               for u, v in gamma.edges):
            count += 1
    return count


@dataclass(frozen=True)
class SubcountResult:
    g_gamma: int
    standardized: float | None = None

    def __post_init__(self):
        if self.g_gamma < 0:
            raise ValueError("subgraph count must be nonnegative")


def count_gamma_adj(adj_bool: np.ndarray, gamma: GammaGraph) -> SubcountResult:
    """Count unordered embeddings of the pattern into a threshold graph."""
    n_pts = adj_bool.shape[0]
    if n_pts < gamma.n:
        return SubcountResult(g_gamma=0)
    nb = gamma.neighbors()
    # order pattern vertices so each (after the first) touches an earlier one
    order = [0]
    placed = {0}
    while len(order) < gamma.n:
        for v in range(gamma.n):
            if v not in placed and nb[v] & placed:
                order.append(v)
                placed.add(v)
                break
    back_edges = []  # for order position p: earlier positions that must be adjacent
    pos_of = {v: p for p, v in enumerate(order)}
    for p, v in enumerate(order):
        back_edges.append([pos_of[u] for u in nb[v] if pos_of[u] < p])

    labeled = 0
    assignment = [0] * gamma.n
    used = [False] * n_pts

    def extend(p: int):
        nonlocal labeled
        if p == gamma.n:
            labeled += 1
            return
        anchors = back_edges[p]
        if anchors:
            candidates = np.nonzero(adj_bool[assignment[anchors[0]]])[0]
        else:
            candidates = range(n_pts)
        for c in candidates:
            c = int(c)
            if used[c]:
                continue
            if all(adj_bool[assignment[q], c] for q in anchors):
                assignment[p] = c
                used[c] = True
                extend(p + 1)
                used[c] = False

    extend(0)
    c_gamma = automorphism_count(gamma)
    if labeled % c_gamma != 0:
        raise AssertionError(
            f"labeled count {labeled} not divisible by automorphism count {c_gamma}")
    return SubcountResult(g_gamma=labeled // c_gamma)


def count_gamma(complex_: GeometricComplex, gamma: GammaGraph) -> SubcountResult:
    """Count occurrences of the pattern in a built geometric complex.

    The threshold convention is taken from the complex as built and never
    rescaled here.
    """
    if complex_.adjacency is None:
        raise ValueError("complex carries no adjacency matrix")
    return count_gamma_adj(complex_.adjacency, gamma)


def kernel_integral_f_i(gamma: GammaGraph, params: ModelParams, i: int,
                        fixed_points, samples: int, seed: SeedSpec,
                        threshold: float | None = None) -> float:
    """Monte Carlo value of the i-th chaos kernel of the pattern count.

    f_i is C(n, i) * lambda^{n-i} times the integral of the pattern
    indicator over the n - i free vertices, evaluated at ``fixed_points``
    (a list of i points occupying the last i pattern slots).  For i = n no
    integration happens and the value is the indicator itself.  The pattern
    edge threshold defaults to epsilon (the subcomplex convention).
    """
    n = gamma.n
    if not (0 <= i <= n):
        raise ValueError("need 0 <= i <= n")
    fixed = np.asarray(fixed_points, dtype=float).reshape(i, params.spec.d)
    free = n - i
    d, a = params.spec.d, params.spec.a
    if free * d > MAX_ORACLE_DIMENSION:
        raise ValueError(f"integral dimension {free * d} exceeds cap "
                         f"{MAX_ORACLE_DIMENSION}")
    if threshold is None:
        threshold = params.epsilon
    prefactor = math.comb(n, i) * params.lam ** free
    if free == 0:
        pts = fixed
        ok = 1
        for u, v in gamma.edges:
            diff = np.abs(pts[u] - pts[v])
            diff = np.minimum(diff, a - diff)
            if diff.max() > threshold:
                ok = 0
        return prefactor * ok
    rng = seed.generator()
    hits = 0
    batch = 200_000
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        freepts = rng.random((m, free, d)) * a
        ok = np.ones(m, dtype=bool)
        for u, v in gamma.edges:
            pu = freepts[:, u, :] if u < free else np.broadcast_to(
                fixed[u - free], (m, d))
            pv = freepts[:, v, :] if v < free else np.broadcast_to(
                fixed[v - free], (m, d))
            diff = np.abs(pu - pv)
            diff = np.minimum(diff, a - diff)
            ok &= diff.max(axis=1) <= threshold
        hits += int(ok.sum())
        done += m
    volume = a ** (free * d)
    return prefactor * volume * hits / samples
