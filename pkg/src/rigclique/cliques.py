"""Clique algorithms, monochromatic cliques, rainbow witnesses and 4-cycle counts."""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple

import numpy as np
from scipy import sparse

from .errors import BudgetExceededError, ResourceLimitError
from .instance import AttributeIndex, IntersectionInstance, SparseGraph
from .matching import find_sdr

DEFAULT_NODE_BUDGET = 10**8
DEFAULT_K4_CAP = 10**7


@dataclass
class CliqueResult:
    vertices: list[int]
    algorithm: str
    elapsed_ns: int = 0

    @property
    def size(self) -> int:
        return len(self.vertices)

    def to_dict(self) -> dict:
        return {"algorithm": self.algorithm, "size": self.size,
                "vertices": self.vertices, "elapsed_ns": self.elapsed_ns}


def is_clique(g: SparseGraph, vertices) -> bool:
    vs = np.sort(np.asarray(vertices, dtype=np.int64))
    for i in range(len(vs) - 1):
        row = g.neighbors(int(vs[i]))
        rest = vs[i + 1:]
        pos = np.searchsorted(row, rest)
        if np.any(pos >= len(row)) or np.any(row[np.minimum(pos, len(row) - 1)] != rest):
            return False
    return True


def greedy_clique(g: SparseGraph) -> CliqueResult:
    """Scan vertices by descending degree (ties: ascending id), keep each one
    adjacent to everything kept so far."""
    start = time.perf_counter_ns()
    order = np.lexsort((np.arange(g.n), -g.degrees))
    members: list[int] = []
    candidates: set[int] | None = None  # common neighbourhood of the members
    for v in order.tolist():
        if candidates is None:
            members.append(v)
            candidates = set(g.neighbors(v).tolist())
        elif v in candidates:
            members.append(v)
            candidates.intersection_update(g.neighbors(v).tolist())
    return CliqueResult(sorted(members), "greedy", time.perf_counter_ns() - start)


def common_neighbor_counts(g: SparseGraph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Edges (u, v) in lexicographic order with D(uv) = |Γ(u) ∩ Γ(v)|."""
    u, v = g.edges()
    if len(u) == 0:
        return u, v, np.zeros(0, dtype=np.int64)
    a = g.to_csr()
    paths = a @ a
    d = np.asarray(paths[u, v]).ravel().astype(np.int64)
    return u, v, d


def mono_clique(g: SparseGraph) -> CliqueResult:
    """Return {u, v} ∪ (Γ(u) ∩ Γ(v)) for the first edge, by decreasing common-
    neighbour count, whose common neighbourhood is a clique."""
    start = time.perf_counter_ns()
    u, v, d = common_neighbor_counts(g)
    result: list[int] | None = None
    remaining = np.ones(len(d), dtype=bool)
    # take the edges level by level, highest D(uv) first, lexicographic within a level
    while result is None and remaining.any():
        level = d[remaining].max()
        hits = np.flatnonzero(remaining & (d == level))
        remaining[hits] = False
        for e in hits.tolist():
            a, b = int(u[e]), int(v[e])
            common = np.intersect1d(g.neighbors(a), g.neighbors(b), assume_unique=True)
            if is_clique(g, common):
                result = sorted([a, b, *common.tolist()])
                break
    if result is None:
        result = [0] if g.n > 0 else []
    return CliqueResult(result, "mono", time.perf_counter_ns() - start)


def degeneracy_order(g: SparseGraph) -> list[int]:
    """Smallest-last vertex ordering (ties by lowest id, deterministic)."""
    deg = g.degrees.astype(np.int64).tolist()
    heap = [(k, v) for v, k in enumerate(deg)]
    heapq.heapify(heap)
    removed = [False] * g.n
    order: list[int] = []
    while heap:
        k, v = heapq.heappop(heap)
        if removed[v] or k != deg[v]:
            continue
        removed[v] = True
        order.append(v)
        for w in g.neighbors(v).tolist():
            if not removed[w]:
                deg[w] -= 1
                heapq.heappush(heap, (deg[w], w))
    return order


class _Search:
    """Branch and bound over bitset candidate sets with a greedy-colouring bound."""

    def __init__(self, budget: int):
        self.budget = budget
        self.expansions = 0
        self.best: list[int] = []

    def run(self, adj: list[int], labels: list[int], prefix: list[int]) -> None:
        self.adj = adj
        self.labels = labels
        self._expand(prefix, (1 << len(adj)) - 1)

    def _colour(self, cand: int) -> tuple[list[int], list[int]]:
        order, bounds = [], []
        colour = 0
        uncoloured = cand
        while uncoloured:
            colour += 1
            avail = uncoloured
            while avail:
                low = avail & -avail
                v = low.bit_length() - 1
                uncoloured &= ~low
                avail &= ~low & ~self.adj[v]
                order.append(v)
                bounds.append(colour)
        return order, bounds

    def _expand(self, clique: list[int], cand: int) -> None:
        self.expansions += 1
        if self.expansions > self.budget:
            raise BudgetExceededError(self.expansions)
        order, bounds = self._colour(cand)
        for i in range(len(order) - 1, -1, -1):
            if len(clique) + bounds[i] <= len(self.best):
                return
            v = order[i]
            clique.append(self.labels[v])
            nxt = cand & self.adj[v]
            if nxt:
                self._expand(clique, nxt)
            elif len(clique) > len(self.best):
                self.best = list(clique)
            clique.pop()
            cand &= ~(1 << v)


def exact_max_clique(g: SparseGraph, budget: int = DEFAULT_NODE_BUDGET) -> CliqueResult:
    """Exact maximum clique; raises BudgetExceededError past ``budget`` expansions."""
    start = time.perf_counter_ns()
    search = _Search(budget)
    if g.n > 0:
        search.best = [0]
    order = degeneracy_order(g)
    position = [0] * g.n
    for i, v in enumerate(order):
        position[v] = i
    for v in reversed(order):
        later = [w for w in g.neighbors(v).tolist() if position[w] > position[v]]
        if len(later) + 1 <= len(search.best):
            continue
        local = {w: i for i, w in enumerate(later)}
        adj = [0] * len(later)
        for w, i in local.items():
            mask = 0
            for x in g.neighbors(w).tolist():
                j = local.get(x)
                if j is not None:
                    mask |= 1 << j
            adj[i] = mask
        search.run(adj, later, [v])
    return CliqueResult(sorted(search.best), "exact", time.perf_counter_ns() - start)


class Monochromatic(NamedTuple):
    attribute: int | None
    size: int


def max_monochromatic(idx: AttributeIndex) -> Monochromatic:
    """Largest T_w (lowest attribute id on ties); size 0 when every T_w is empty."""
    sizes = idx.sizes
    if len(sizes) == 0 or sizes.max() == 0:
        return Monochromatic(None, 0)
    w = int(np.argmax(sizes))
    return Monochromatic(w, int(sizes[w]))


def _subset_sets(inst: IntersectionInstance, vertices) -> dict[int, set[int]]:
    return {v: set(inst.subset(v).tolist()) for v in vertices}


def is_rainbow_witness(inst: IntersectionInstance, vertices) -> dict[tuple[int, int], int] | None:
    """Injective edge -> attribute assignment covering every pair, or None."""
    vs = sorted(int(v) for v in vertices)
    sets = _subset_sets(inst, vs)
    pairs = list(combinations(vs, 2))
    colours = [sets[a] & sets[b] for a, b in pairs]
    if any(not c for c in colours):
        return None
    reps = find_sdr(colours)
    if reps is None:
        return None
    return dict(zip(pairs, reps))


@dataclass
class RainbowWitnessReport:
    h: int
    count: int
    sample_witnesses: list[tuple[list[int], dict[tuple[int, int], int]]] = field(default_factory=list)


def four_cliques(g: SparseGraph, cap: int = DEFAULT_K4_CAP):
    """Yield every 4-clique (a < b < c < d) by extending ordered triangles."""
    higher = [set(g.neighbors(v)[g.neighbors(v) > v].tolist()) for v in range(g.n)]
    found = 0
    for a in range(g.n):
        ha = higher[a]
        for b in sorted(ha):
            abc = ha & higher[b]
            for c in sorted(abc):
                for d in sorted(abc & higher[c]):
                    found += 1
                    if found > cap:
                        raise ResourceLimitError(f"more than {cap} 4-cliques")
                    yield a, b, c, d


def rainbow_k4_report(inst: IntersectionInstance, g: SparseGraph,
                      cap: int = DEFAULT_K4_CAP, samples: int = 10) -> RainbowWitnessReport:
    report = RainbowWitnessReport(4, 0)
    for quad in four_cliques(g, cap):
        sets = _subset_sets(inst, quad)
        pairs = list(combinations(quad, 2))
        colours = [sets[a] & sets[b] for a, b in pairs]
        if len(set().union(*colours)) < 6:
            continue
        reps = find_sdr(colours)
        if reps is None:
            continue
        report.count += 1
        if len(report.sample_witnesses) < samples:
            report.sample_witnesses.append((list(quad), dict(zip(pairs, reps))))
    return report


def count_rainbow_k4(inst: IntersectionInstance, g: SparseGraph, cap: int = DEFAULT_K4_CAP) -> int:
    """Number R of 4-sets witnessing a rainbow K4."""
    return rainbow_k4_report(inst, g, cap, samples=0).count


class CycleCount(NamedTuple):
    count: int
    saturated: bool


def _diagonal_pairs(g: SparseGraph):
    """Ordered pairs (x, y), x != y, with c = |Γ(x) ∩ Γ(y)| >= 2."""
    a = g.to_csr()
    paths = sparse.coo_matrix(a @ a)
    keep = (paths.row != paths.col) & (paths.data >= 2)
    return paths.row[keep], paths.col[keep], paths.data[keep].astype(np.int64)


def count_4cycles(g: SparseGraph, cap: int) -> CycleCount:
    """Ordered 4-tuples of distinct vertices forming a 4-cycle v1 v2 v3 v4."""
    _, _, c = _diagonal_pairs(g)
    total = int(np.sum(c * (c - 1)))
    return CycleCount(min(total, cap), total >= cap)


def count_bad_cycles(inst: IntersectionInstance, g: SparseGraph, cap: int) -> CycleCount:
    """4-cycles v1 v2 v3 v4 whose diagonal v2, v4 has disjoint attribute sets."""
    x, y, c = _diagonal_pairs(g)
    if len(c):
        data = np.ones(len(inst.attrs), dtype=np.int64)
        incidence = sparse.csr_matrix((data, inst.attrs, inst.indptr), shape=(inst.n, inst.m))
        shared = np.asarray((incidence @ incidence.T)[x, y]).ravel()
        c = c[shared == 0]
    total = int(np.sum(c * (c - 1)))
    return CycleCount(min(total, cap), total >= cap)
