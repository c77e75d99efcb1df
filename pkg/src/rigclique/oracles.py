"""Brute-force baselines that the fast paths are checked against."""

from __future__ import annotations

import math
from itertools import combinations, permutations, product
from typing import NamedTuple

import numpy as np

from .errors import SizeLimitError
from .instance import IntersectionInstance, SparseGraph
from .matching import has_sdr

BRUTE_CLIQUE_LIMIT = 20
OUTCOME_LIMIT = 10**6


def brute_max_clique(g: SparseGraph) -> int:
    """Largest vertex subset inducing a clique, over all 2^n subsets."""
    n = g.n
    if n > BRUTE_CLIQUE_LIMIT:
        raise SizeLimitError(f"brute force limited to n <= {BRUTE_CLIQUE_LIMIT}")
    if n == 0:
        return 0
    adj = [0] * n
    for v in range(n):
        for w in g.neighbors(v).tolist():
            adj[v] |= 1 << w
    # clique[mask]: mask induces a clique; built from mask minus its lowest bit
    clique = bytearray(1 << n)
    clique[0] = 1
    best = 0
    for mask in range(1, 1 << n):
        low = mask & -mask
        rest = mask ^ low
        v = low.bit_length() - 1
        if clique[rest] and (adj[v] & rest) == rest:
            clique[mask] = 1
            best = max(best, mask.bit_count())
    return best


def colex_combinations(m: int, d: int):
    """All d-subsets of range(m) in colex order, as tuples."""
    if d > m or d < 0:
        return
    c = list(range(d))
    while True:
        yield tuple(c)
        # advance to the next combination in colex order
        j = 0
        while j < d and (c[j] + 1 == (c[j + 1] if j + 1 < d else m)):
            j += 1
        if j == d:
            return
        c[j] += 1
        for i in range(j):
            c[i] = i


def sdr_probability_exact(family, m: int, d: int) -> float:
    """P({S ∩ A_1, ..., S ∩ A_k} has an SDR) for a uniform d-subset S of [0, m)."""
    if d > m:
        raise ValueError("need d <= m")
    total = math.comb(m, d)
    if total > OUTCOME_LIMIT:
        raise SizeLimitError(f"C({m},{d}) exceeds {OUTCOME_LIMIT}")
    sets = [frozenset(a) for a in family]
    good = 0
    for outcome in colex_combinations(m, d):
        chosen = set(outcome)
        if has_sdr([a & chosen for a in sets]):
            good += 1
    return good / total


class DisjointCheck(NamedTuple):
    max_other: float
    disjoint: float
    holds: bool


def _random_family(sizes, m: int, rng: np.random.Generator) -> list[frozenset]:
    return [frozenset(rng.choice(m, size=a, replace=False).tolist()) for a in sizes]


def _pairwise_disjoint(family) -> bool:
    return all(not (a & b) for a, b in combinations(family, 2))


def verify_disjoint_maximizes(sizes, m: int, d: int, candidates: int,
                              rng: np.random.Generator) -> DisjointCheck:
    """Compare the disjoint family against random overlapping ones of equal sizes."""
    sizes = [int(a) for a in sizes]
    if sum(sizes) > m:
        raise ValueError("sizes must sum to at most m")
    if d < len(sizes):
        raise ValueError("need d >= number of sets")
    blocks, start = [], 0
    for a in sizes:
        blocks.append(frozenset(range(start, start + a)))
        start += a
    disjoint = sdr_probability_exact(blocks, m, d)
    # with fewer than two non-empty sets no overlapping family exists
    can_overlap = sum(1 for a in sizes if a > 0) >= 2
    best_other = 0.0
    for _ in range(candidates):
        family = _random_family(sizes, m, rng)
        while can_overlap and _pairwise_disjoint(family):
            family = _random_family(sizes, m, rng)
        best_other = max(best_other, sdr_probability_exact(family, m, d))
    return DisjointCheck(best_other, disjoint, disjoint >= best_other - 1e-12)


def rainbow_clique_probability_exact(sizes, m: int) -> float:
    """P(the k vertices with fixed set sizes form a rainbow K_k), by enumeration."""
    k = len(sizes)
    choices = [list(combinations(range(m), x)) for x in sizes]
    total = math.prod(len(c) for c in choices)
    if total > OUTCOME_LIMIT:
        raise SizeLimitError(f"{total} outcomes exceed {OUTCOME_LIMIT}")
    pairs = list(combinations(range(k), 2))
    good = 0
    for outcome in product(*choices):
        sets = [set(s) for s in outcome]
        if has_sdr([sets[i] & sets[j] for i, j in pairs]):
            good += 1
    return good / total


def edge_probability_exact(x1: int, x2: int, m: int) -> float:
    """P(S_1 ∩ S_2 nonempty) for uniform subsets of sizes x1, x2."""
    return 1.0 - math.comb(m - x1, x2) / math.comb(m, x2)


def rainbow_witness_brute(inst: IntersectionInstance, vertices) -> bool:
    """Try every injective edge -> attribute map over the union of edge colours."""
    vs = sorted(int(v) for v in vertices)
    sets = {v: set(inst.subset(v).tolist()) for v in vs}
    colours = [sets[a] & sets[b] for a, b in combinations(vs, 2)]
    if any(not c for c in colours):
        return False
    palette = sorted(set().union(*colours))
    for assignment in permutations(palette, len(colours)):
        if all(w in c for w, c in zip(assignment, colours)):
            return True
    return False


def exhaustive_disjoint_check(m_max: int) -> tuple[int, int]:
    """Check the disjoint-family maximum over every family of non-empty subsets
    of [0, m) with sizes summing to at most m, for all m <= m_max and d >= k.

    Returns (configurations checked, failures).
    """
    from itertools import combinations_with_replacement

    checked = failures = 0
    for m in range(1, m_max + 1):
        subsets = [frozenset(c) for r in range(1, m + 1) for c in combinations(range(m), r)]
        disjoint_cache: dict[tuple, float] = {}
        for k in range(1, m + 1):
            for family in combinations_with_replacement(subsets, k):
                sizes = tuple(sorted(len(a) for a in family))
                if sum(sizes) > m:
                    continue
                for d in range(k, m + 1):
                    key = (sizes, d)
                    if key not in disjoint_cache:
                        blocks, start = [], 0
                        for a in sizes:
                            blocks.append(range(start, start + a))
                            start += a
                        disjoint_cache[key] = sdr_probability_exact(blocks, m, d)
                    checked += 1
                    if sdr_probability_exact(family, m, d) > disjoint_cache[key] + 1e-12:
                        failures += 1
    return checked, failures
