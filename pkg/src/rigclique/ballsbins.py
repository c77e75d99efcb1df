"""Maximum bin load M(N, m): sampling, exact small-case law, coupling, and the
comparison with the largest monochromatic clique."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import stats

from .distributions import SetSizeLaw, moments_y
from .errors import SizeLimitError
from .instance import generate

EXACT_LIMIT = 200


@dataclass
class LoadDistribution:
    pmf: dict[int, float]
    source: str
    trials: int | None = field(default=None)

    @classmethod
    def from_samples(cls, samples) -> "LoadDistribution":
        values, counts = np.unique(np.asarray(samples, dtype=np.int64), return_counts=True)
        total = int(counts.sum())
        return cls({int(k): c / total for k, c in zip(values, counts)}, "empirical", total)

    def mean(self) -> float:
        return math.fsum(k * p for k, p in self.pmf.items())

    def to_dict(self) -> dict:
        out = {"source": self.source}
        if self.trials is not None:
            out["trials"] = self.trials
        out["pmf"] = {str(k): p for k, p in sorted(self.pmf.items())}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "LoadDistribution":
        return cls({int(k): float(p) for k, p in data["pmf"].items()},
                   data["source"], data.get("trials"))


def max_load_sample(N: int, m: int, rng: np.random.Generator) -> int:
    if N < 0 or m < 1:
        raise ValueError("need N >= 0 and m >= 1")
    if N == 0:
        return 0
    return int(np.bincount(rng.integers(0, m, size=N), minlength=m).max())


def max_load_samples(N: int, m: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    return np.array([max_load_sample(N, m, rng) for _ in range(trials)], dtype=np.int64)


def _prob_all_at_most(N: int, m: int, k: int) -> float:
    # split the remaining balls bin by bin: bin i takes Bin(r, 1/(m - i)) of them
    remaining = np.zeros(N + 1)
    remaining[N] = 1.0
    r = np.arange(N + 1)
    for i in range(m - 1):
        q = 1.0 / (m - i)
        nxt = np.zeros(N + 1)
        for c in range(min(k, N) + 1):
            weight = remaining[c:] * stats.binom.pmf(c, r[c:], q)
            nxt[:N + 1 - c] += weight
        remaining = nxt
    # the last bin takes whatever is left
    return float(math.fsum(remaining[:k + 1]))


def max_load_exact(N: int, m: int) -> LoadDistribution:
    """Exact law of M(N, m) for N, m <= 200."""
    if N < 0 or m < 1:
        raise ValueError("need N >= 0 and m >= 1")
    if N > EXACT_LIMIT or m > EXACT_LIMIT:
        raise SizeLimitError(f"exact max load limited to N, m <= {EXACT_LIMIT}")
    if N == 0:
        return LoadDistribution({0: 1.0}, "exact")
    low = -(-N // m)
    pmf: dict[int, float] = {}
    below = 0.0
    for k in range(low, N + 1):
        cdf = 1.0 if k == N else min(1.0, _prob_all_at_most(N, m, k))
        if cdf - below > 0:
            pmf[k] = cdf - below
        below = cdf
        if cdf >= 1.0 - 1e-15:
            break
    total = math.fsum(pmf.values())
    return LoadDistribution({k: p / total for k, p in pmf.items()}, "exact")


def tv_distance(a: LoadDistribution, b: LoadDistribution) -> float:
    keys = set(a.pmf) | set(b.pmf)
    return 0.5 * math.fsum(abs(a.pmf.get(k, 0.0) - b.pmf.get(k, 0.0)) for k in keys)


class CouplingOutcome(NamedTuple):
    p_equal: float
    p_within_delta: float
    loads: np.ndarray      # M after deletion, per trial
    loads_full: np.ndarray  # M' before deletion, per trial
    delta: float


def coupled_max_loads(N: int, m: int, eps: float, rng: np.random.Generator) -> tuple[int, int]:
    """One coupled draw (M', M): M' after floor(N(1+eps)) balls, M after
    deleting floor(eps N) of those balls uniformly at random."""
    thrown = math.floor(N * (1 + eps))
    removed = math.floor(eps * N)
    if thrown == 0:
        return 0, 0
    bins = rng.integers(0, m, size=thrown)
    load = np.bincount(bins, minlength=m)
    full = int(load.max())
    if removed:
        gone = rng.choice(thrown, size=removed, replace=False)
        load = load - np.bincount(bins[gone], minlength=m)
    return full, int(load.max())


def coupling_experiment(N: int, m: int, eps: float, trials: int, rng: np.random.Generator,
                        delta: float | None = None) -> CouplingOutcome:
    """Throw floor(N(1+eps)) balls, record M', delete floor(eps N) of them
    uniformly, record M.  Reports how often M = M' and M' - M <= delta E M'."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    delta = 1.0 / math.log(N + 2) if delta is None else delta
    full = np.empty(trials, dtype=np.int64)
    kept = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        full[t], kept[t] = coupled_max_loads(N, m, eps, rng)
    gap = full - kept
    p_equal = float(np.mean(gap == 0))
    p_within = float(np.mean(gap <= delta * full.mean()))
    return CouplingOutcome(p_equal, p_within, kept, full, delta)


class OmegaLoadComparison(NamedTuple):
    tv: float
    pmf_omega: LoadDistribution
    pmf_load: LoadDistribution
    balls: int


def omega_prime_vs_maxload(n: int, m: int, law: SetSizeLaw, trials: int,
                           rng: np.random.Generator) -> OmegaLoadComparison:
    """Empirical TV distance between the law of ω' and M(floor(sqrt(mn) E Y), m)."""
    mean_y = moments_y(law, n, m).mean_y
    balls = math.floor(math.sqrt(m * n) * mean_y)
    omega = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        inst = generate(n, m, law, int(rng.integers(0, 2**63)))
        omega[t] = np.bincount(inst.attrs, minlength=m).max() if len(inst.attrs) else 0
    loads = max_load_samples(balls, m, trials, rng)
    a = LoadDistribution.from_samples(omega)
    b = LoadDistribution.from_samples(loads)
    return OmegaLoadComparison(tv_distance(a, b), a, b, balls)
