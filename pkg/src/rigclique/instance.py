"""Sampling intersection instances and materialising the intersection graph.

Instances and graphs are stored in compressed-row form: ``indptr`` of length
rows + 1 and a flat ``indices`` array, each row sorted ascending.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy import sparse

from .distributions import SetSizeLaw, moments_y, sample_sizes
from .errors import ResourceLimitError

DEFAULT_PAIR_BUDGET = 50_000_000


def _rows_from_lists(rows) -> tuple[np.ndarray, np.ndarray]:
    lengths = np.fromiter((len(r) for r in rows), dtype=np.int64, count=len(rows))
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    np.cumsum(lengths, out=indptr[1:])
    flat = np.fromiter((x for r in rows for x in r), dtype=np.int64, count=int(indptr[-1]))
    return indptr, flat


def _row_pairs(indptr: np.ndarray, flat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All pairs (a, b), a before b, within each row; rows grouped by length."""
    lengths = np.diff(indptr)
    firsts, seconds = [], []
    for s in np.unique(lengths[lengths >= 2]):
        rows = np.flatnonzero(lengths == s)
        block = flat[indptr[rows][:, None] + np.arange(s)]
        i, j = np.triu_indices(s, 1)
        firsts.append(block[:, i].ravel())
        seconds.append(block[:, j].ravel())
    if not firsts:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    return np.concatenate(firsts), np.concatenate(seconds)


@dataclass(eq=False)
class IntersectionInstance:
    n: int
    m: int
    indptr: np.ndarray
    attrs: np.ndarray
    seed: int = 0
    law: SetSizeLaw | None = field(default=None, repr=False)

    @classmethod
    def from_subsets(cls, subsets, m: int, seed: int = 0, law: SetSizeLaw | None = None):
        rows = [sorted(set(int(w) for w in s)) for s in subsets]
        for row in rows:
            if row and (row[0] < 0 or row[-1] >= m):
                raise ValueError("attribute ids must lie in [0, m)")
        indptr, flat = _rows_from_lists(rows)
        return cls(len(rows), m, indptr, flat, seed, law)

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def subsets(self) -> list[list[int]]:
        return [self.subset(v).tolist() for v in range(self.n)]

    def subset(self, v: int) -> np.ndarray:
        return self.attrs[self.indptr[v]:self.indptr[v + 1]]

    def __eq__(self, other):
        if not isinstance(other, IntersectionInstance):
            return NotImplemented
        return (self.n == other.n and self.m == other.m and self.seed == other.seed
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.attrs, other.attrs))

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m} {self.seed}"]
        lines.extend(" ".join(map(str, self.subset(v).tolist())) for v in range(self.n))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "IntersectionInstance":
        lines = text.splitlines()
        if not lines:
            raise ValueError("empty instance file")
        try:
            n, m, seed = (int(tok) for tok in lines[0].split())
        except ValueError:
            raise ValueError("instance header must be 'n m seed'") from None
        body = lines[1:n + 1]
        body += [""] * (n - len(body))
        return cls.from_subsets([[int(t) for t in line.split()] for line in body], m, seed)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "IntersectionInstance":
        return cls.from_text(Path(path).read_text())


@dataclass(eq=False)
class AttributeIndex:
    m: int
    indptr: np.ndarray
    occupants_flat: np.ndarray

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.indptr)

    def occupants_of(self, w: int) -> np.ndarray:
        return self.occupants_flat[self.indptr[w]:self.indptr[w + 1]]

    @property
    def occupants(self) -> list[list[int]]:
        return [self.occupants_of(w).tolist() for w in range(self.m)]


@dataclass(eq=False)
class SparseGraph:
    n: int
    indptr: np.ndarray
    indices: np.ndarray

    @classmethod
    def from_edges(cls, n: int, edges) -> "SparseGraph":
        edges = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        u = np.minimum(edges[:, 0], edges[:, 1])
        v = np.maximum(edges[:, 0], edges[:, 1])
        keep = u != v
        return cls._from_pairs(n, u[keep], v[keep])

    @classmethod
    def _from_pairs(cls, n: int, u: np.ndarray, v: np.ndarray) -> "SparseGraph":
        keys = np.unique(u * n + v)
        u, v = keys // n, keys % n
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        order = np.lexsort((dst, src))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst[order].astype(np.int64))

    @classmethod
    def complete(cls, n: int) -> "SparseGraph":
        i, j = np.triu_indices(n, 1)
        return cls._from_pairs(n, i.astype(np.int64), j.astype(np.int64))

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(v).tolist() for v in range(self.n)]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return bool(i < len(row) and row[i] == v)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge endpoints (u, v), u < v, in lexicographic order."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        upper = src < self.indices
        return src[upper], self.indices[upper]

    def to_csr(self) -> sparse.csr_matrix:
        data = np.ones(len(self.indices), dtype=np.int64)
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def to_edge_list(self) -> str:
        u, v = self.edges()
        return "".join(f"{a} {b}\n" for a, b in zip(u.tolist(), v.tolist()))

    def check(self) -> None:
        """Assert symmetry, sortedness, no loops and no duplicates."""
        for v in range(self.n):
            row = self.neighbors(v)
            assert np.all(np.diff(row) > 0), f"row {v} not strictly increasing"
            assert not np.any(row == v), f"self-loop at {v}"
        csr = self.to_csr()
        assert (csr != csr.T).nnz == 0, "adjacency not symmetric"


def _uniform_subsets(sizes: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    """Flat sorted attribute lists: row v is a uniform sizes[v]-subset of [0, m)."""
    n = len(sizes)
    dense = sizes * 4 > m
    owner = np.repeat(np.arange(n, dtype=np.int64), np.where(dense, 0, sizes))
    vals = rng.integers(0, m, size=len(owner), dtype=np.int64)
    # redraw repeated values inside a row until every row is distinct; the law
    # stays invariant under relabelling of [0, m), hence uniform over k-subsets
    while True:
        order = np.lexsort((vals, owner))
        so, sv = owner[order], vals[order]
        dup = np.flatnonzero((so[1:] == so[:-1]) & (sv[1:] == sv[:-1])) + 1
        if len(dup) == 0:
            owner, vals = so, sv
            break
        vals[order[dup]] = rng.integers(0, m, size=len(dup), dtype=np.int64)
    if dense.any():
        extra_owner, extra_vals = [], []
        for v in np.flatnonzero(dense):
            k = int(sizes[v])
            extra_owner.append(np.full(k, v, dtype=np.int64))
            extra_vals.append(np.sort(rng.choice(m, size=k, replace=False)).astype(np.int64))
        owner = np.concatenate([owner, *extra_owner])
        vals = np.concatenate([vals, *extra_vals])
        order = np.lexsort((vals, owner))
        vals = vals[order]
    return vals


def _assemble(n: int, m: int, sizes: np.ndarray, rng, seed: int, law) -> IntersectionInstance:
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(sizes, out=indptr[1:])
    return IntersectionInstance(n, m, indptr, _uniform_subsets(sizes, m, rng), seed, law)


def generate(n: int, m: int, law: SetSizeLaw, seed: int) -> IntersectionInstance:
    """Sample G(n, m, P): n independent uniform subsets with sizes drawn from ``law``."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be at least 1")
    rng = np.random.default_rng(seed)
    sizes = sample_sizes(law, n, m, n, rng)
    return _assemble(n, m, sizes, rng, seed, law)


def generate_binomial(n: int, m: int, p: float, seed: int) -> IntersectionInstance:
    """Binomial model G(n, m, p): each attribute kept independently with probability p."""
    return generate(n, m, SetSizeLaw.binomial(p), seed)


def invert(inst: IntersectionInstance) -> AttributeIndex:
    owners = np.repeat(np.arange(inst.n, dtype=np.int64), inst.sizes)
    order = np.argsort(inst.attrs, kind="stable")
    indptr = np.zeros(inst.m + 1, dtype=np.int64)
    np.cumsum(np.bincount(inst.attrs, minlength=inst.m), out=indptr[1:])
    return AttributeIndex(inst.m, indptr, owners[order])


def build_graph(inst: IntersectionInstance, pair_budget: int = DEFAULT_PAIR_BUDGET,
                index: AttributeIndex | None = None) -> SparseGraph:
    """Intersection graph built by expanding every T_w into a clique."""
    index = index if index is not None else invert(inst)
    load = int(np.sum(index.sizes.astype(np.int64) ** 2))
    if load > pair_budget:
        raise ResourceLimitError(f"sum of |T_w|^2 = {load} exceeds budget {pair_budget}")
    u, v = _row_pairs(index.indptr, index.occupants_flat)
    return SparseGraph._from_pairs(inst.n, u, v)


class DegreeStats(NamedTuple):
    mean: float
    variance: float
    max: int


def degree_stats(g: SparseGraph) -> DegreeStats:
    d = g.degrees.astype(float)
    if g.n == 0:
        return DegreeStats(0.0, 0.0, 0)
    return DegreeStats(float(d.mean()), float(d.var()), int(d.max()))


def triangle_count(g: SparseGraph) -> int:
    a = g.to_csr()
    return int((a @ a).multiply(a).sum()) // 6


def two_path_count(g: SparseGraph) -> int:
    d = g.degrees.astype(np.int64)
    return int(np.sum(d * (d - 1) // 2))


class Clustering(NamedTuple):
    empirical: float | None
    predicted: float | None


def clustering(inst: IntersectionInstance, g: SparseGraph) -> Clustering:
    """Empirical clustering 3T/P against sqrt(n/m) E Y / E Y^2.

    The prediction uses the instance's law when known, otherwise the
    empirical moments of its set sizes.
    """
    paths = two_path_count(g)
    empirical = 3 * triangle_count(g) / paths if paths else None
    if inst.law is not None:
        mom = moments_y(inst.law, inst.n, inst.m)
        mean_y, mean_y2 = mom.mean_y, mom.mean_y2
    else:
        y = math.sqrt(inst.n / inst.m) * inst.sizes.astype(float)
        mean_y, mean_y2 = float(y.mean()), float((y * y).mean())
    predicted = math.sqrt(inst.n / inst.m) * mean_y / mean_y2 if mean_y2 > 0 else None
    return Clustering(empirical, predicted)


def attribute_pair_multiplicity(inst: IntersectionInstance) -> int:
    """Largest number of vertices sharing one pair of attributes (0 if no pair)."""
    a, b = _row_pairs(inst.indptr, inst.attrs)
    if len(a) == 0:
        return 0
    _, counts = np.unique(a * inst.m + b, return_counts=True)
    return int(counts.max())
