"""Attribute-set size laws P(n) and the moments of the normalised size Y.

A law describes the distribution of X = |S_v| on {0, ..., m}.  The normalised
size is Y = sqrt(n/m) * X.  All moment and tail queries are answered from the
exact pmf of X as actually sampled (after quantisation and truncation at m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, NamedTuple

import numpy as np
from scipy import stats

from .errors import InvalidLawError

POWER_LAW = "PowerLawTail"
BINOMIAL = "Binomial"
DETERMINISTIC = "Deterministic"
EMPIRICAL = "Empirical"
KINDS = (POWER_LAW, BINOMIAL, DETERMINISTIC, EMPIRICAL)


def slowly_varying(x, gamma: float):
    """L(x) = (ln(e + x))**gamma, the built-in slowly varying family."""
    return np.log(np.e + x) ** gamma


@dataclass(frozen=True)
class SetSizeLaw:
    kind: str
    alpha: float | None = None
    y_min: float | None = None
    sv_gamma: float = 0.0
    p: float | None = None
    x_fixed: int | None = None
    pmf: tuple[tuple[int, float], ...] | None = field(default=None)

    def __post_init__(self):
        if self.pmf is not None and not isinstance(self.pmf, tuple):
            object.__setattr__(self, "pmf", tuple((int(k), float(q)) for k, q in self.pmf))
        self.validate()

    @classmethod
    def power_law(cls, alpha: float, y_min: float = 1.0, sv_gamma: float = 0.0) -> "SetSizeLaw":
        return cls(POWER_LAW, alpha=float(alpha), y_min=float(y_min), sv_gamma=float(sv_gamma))

    @classmethod
    def binomial(cls, p: float) -> "SetSizeLaw":
        return cls(BINOMIAL, p=float(p))

    @classmethod
    def deterministic(cls, x: int) -> "SetSizeLaw":
        return cls(DETERMINISTIC, x_fixed=int(x))

    @classmethod
    def empirical(cls, pmf) -> "SetSizeLaw":
        if isinstance(pmf, dict):
            pmf = sorted(pmf.items())
        return cls(EMPIRICAL, pmf=tuple((int(k), float(q)) for k, q in pmf))

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise InvalidLawError(f"unknown law kind {self.kind!r}")
        if self.kind == POWER_LAW:
            if self.alpha is None or not self.alpha > 0:
                raise InvalidLawError("alpha must be positive")
            if self.y_min is None or not self.y_min > 0:
                raise InvalidLawError("y_min must be positive")
            # beyond this the tail function stops being monotone
            if self.sv_gamma > self.alpha:
                raise InvalidLawError("sv_gamma must not exceed alpha")
        elif self.kind == BINOMIAL:
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise InvalidLawError("p must lie in [0, 1]")
        elif self.kind == DETERMINISTIC:
            if self.x_fixed is None or self.x_fixed < 0:
                raise InvalidLawError("x_fixed must be a non-negative integer")
        else:
            if not self.pmf:
                raise InvalidLawError("empirical pmf is empty")
            if any(k < 0 or q < 0 for k, q in self.pmf):
                raise InvalidLawError("empirical pmf needs non-negative sizes and weights")
            if abs(math.fsum(q for _, q in self.pmf) - 1.0) > 1e-12:
                raise InvalidLawError("empirical pmf must sum to 1")

    def to_dict(self) -> dict[str, Any]:
        if self.kind == POWER_LAW:
            return {"kind": self.kind, "alpha": self.alpha, "y_min": self.y_min,
                    "sv_gamma": self.sv_gamma}
        if self.kind == BINOMIAL:
            return {"kind": self.kind, "p": self.p}
        if self.kind == DETERMINISTIC:
            return {"kind": self.kind, "x_fixed": self.x_fixed}
        return {"kind": self.kind, "pmf": [[k, q] for k, q in self.pmf]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SetSizeLaw":
        kind = data.get("kind")
        try:
            if kind == POWER_LAW:
                return cls.power_law(data["alpha"], data.get("y_min", 1.0), data.get("sv_gamma", 0.0))
            if kind == BINOMIAL:
                return cls.binomial(data["p"])
            if kind == DETERMINISTIC:
                return cls.deterministic(data["x_fixed"])
            if kind == EMPIRICAL:
                return cls.empirical(data["pmf"])
        except KeyError as exc:
            raise InvalidLawError(f"missing law parameter {exc}") from None
        raise InvalidLawError(f"unknown law kind {kind!r}")

    def y_tail(self, y):
        """Continuous tail P(Y >= y) of the unquantised power law."""
        y = np.asarray(y, dtype=float)
        ratio = np.maximum(y, self.y_min) / self.y_min
        tail = (slowly_varying(np.maximum(y, self.y_min), self.sv_gamma)
                / slowly_varying(self.y_min, self.sv_gamma)) * ratio ** (-self.alpha)
        return np.where(y <= self.y_min, 1.0, np.minimum(1.0, tail))

    def y_quantile(self, u):
        """Inverse of y_tail: the y >= y_min with P(Y >= y) = u, for u in (0, 1]."""
        u = np.asarray(u, dtype=float)
        if self.sv_gamma == 0.0:
            return self.y_min * u ** (-1.0 / self.alpha)
        # bisection on log(y / y_min)
        lo = np.zeros_like(u)
        hi = np.ones_like(u)
        while True:
            short = self.y_tail(self.y_min * np.exp(hi)) > u
            if not short.any():
                break
            hi = np.where(short, hi * 2.0, hi)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            above = self.y_tail(self.y_min * np.exp(mid)) > u
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        return self.y_min * np.exp(hi)


def _check_nm(n: int, m: int) -> None:
    if n < 1 or m < 1:
        raise ValueError("n and m must be at least 1")


@lru_cache(maxsize=64)
def _pmf_x_cached(law: SetSizeLaw, n: int, m: int) -> np.ndarray:
    ks = np.arange(m + 1)
    if law.kind == DETERMINISTIC:
        out = np.zeros(m + 1)
        out[min(law.x_fixed, m)] = 1.0
    elif law.kind == BINOMIAL:
        out = stats.binom.pmf(ks, m, law.p)
    elif law.kind == EMPIRICAL:
        out = np.zeros(m + 1)
        for k, q in law.pmf:
            out[min(k, m)] += q
    else:
        scale = math.sqrt(m / n)
        # P(X >= k) = P(scale * Y >= k - 1/2) for k >= 1, rounding half up
        at_least = np.empty(m + 2)
        at_least[0] = 1.0
        at_least[1:m + 1] = law.y_tail((ks[1:] - 0.5) / scale)
        at_least[m + 1] = 0.0
        out = at_least[:-1] - at_least[1:]
    out.setflags(write=False)
    return out


def pmf_x(law: SetSizeLaw, n: int, m: int) -> np.ndarray:
    """Exact pmf of the sampled size X on {0, ..., m} (read-only array)."""
    _check_nm(n, m)
    return _pmf_x_cached(law, n, m)


def sample_sizes(law: SetSizeLaw, n: int, m: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``size`` independent set sizes X, each in [0, m]."""
    _check_nm(n, m)
    if law.kind == DETERMINISTIC:
        return np.full(size, min(law.x_fixed, m), dtype=np.int64)
    if law.kind == BINOMIAL:
        return rng.binomial(m, law.p, size=size).astype(np.int64)
    if law.kind == EMPIRICAL:
        ks = np.array([min(k, m) for k, _ in law.pmf], dtype=np.int64)
        qs = np.array([q for _, q in law.pmf])
        return rng.choice(ks, size=size, p=qs / qs.sum())
    u = 1.0 - rng.random(size)  # in (0, 1]
    scaled = np.minimum(math.sqrt(m / n) * law.y_quantile(u), float(m))
    return np.minimum(np.floor(scaled + 0.5), m).astype(np.int64)


def sample_size(law: SetSizeLaw, n: int, m: int, rng: np.random.Generator) -> int:
    return int(sample_sizes(law, n, m, 1, rng)[0])


class YMoments(NamedTuple):
    mean_y: float
    var_y: float
    mean_y2: float


def moments_y(law: SetSizeLaw, n: int, m: int) -> YMoments:
    """E Y, Var Y and E Y^2 of the exact sampled law."""
    pmf = pmf_x(law, n, m)
    ks = np.arange(m + 1, dtype=float)
    ex = math.fsum(pmf * ks)
    ex2 = math.fsum(pmf * ks * ks)
    ratio = n / m
    mean_y = math.sqrt(ratio) * ex
    mean_y2 = ratio * ex2
    return YMoments(mean_y, max(mean_y2 - mean_y * mean_y, 0.0), mean_y2)


def tail_prob_y(law: SetSizeLaw, n: int, m: int, t: float) -> float:
    """Exact P(Y >= t) under the quantised law."""
    if not t > 0:
        raise ValueError("t must be positive")
    pmf = pmf_x(law, n, m)
    threshold = t * math.sqrt(m / n)
    # t > 0 forces X >= 1; the relative slack absorbs rounding in t * sqrt(m/n)
    k = max(1, math.ceil(threshold * (1 - 1e-12)))
    if k > m:
        return 0.0
    return float(min(1.0, math.fsum(pmf[k:])))
