"""Closed-form predictions for clique numbers, thresholds and degree moments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .distributions import SetSizeLaw, moments_y
from .errors import InvalidRegimeError


def slowly_varying(x: float, gamma: float) -> float:
    return math.log(math.e + x) ** gamma


@dataclass(frozen=True)
class PowerLawRegime:
    alpha: float
    beta: float = 1.0
    eps0: float = 0.2
    eps1: float = 0.1
    sv_gamma: float = 0.0

    def __post_init__(self):
        if not 1.0 < self.alpha < 2.0:
            raise InvalidRegimeError("alpha must lie in (1, 2)")
        if not self.beta > max(2.0 - self.alpha, self.alpha - 1.0):
            raise InvalidRegimeError("beta must exceed max(2 - alpha, alpha - 1)")
        if not 0.0 < self.eps1 < self.eps0 < 0.5:
            raise InvalidRegimeError("need 0 < eps1 < eps0 < 0.5")


def predicted_clique_powerlaw(n: int, regime: PowerLawRegime) -> float:
    """(1 - α/2)^(-α/2) L(sqrt(n ln n)) n^(1 - α/2) (ln n)^(-α/2)."""
    if n < 3:
        raise ValueError("n must be at least 3")
    a = regime.alpha
    ln_n = math.log(n)
    lv = slowly_varying(math.sqrt(n * ln_n), regime.sv_gamma)
    return (1 - a / 2) ** (-a / 2) * lv * n ** (1 - a / 2) * ln_n ** (-a / 2)


def predicted_clique_finite_variance(n: int) -> float:
    """ln n / ln ln n."""
    if n < 16:
        raise ValueError("n must be at least 16")
    return math.log(n) / math.log(math.log(n))


class Thresholds(NamedTuple):
    theta1: float
    theta2: float


def thresholds(n: int, m: int, regime: PowerLawRegime) -> Thresholds:
    """Set-size cut points separating small, intermediate and large vertices."""
    if n < 2 or m < 1:
        raise InvalidRegimeError("need n >= 2 and m >= 1")
    ln_n = math.log(n)
    e1 = max(0.0, math.log(slowly_varying(math.sqrt(n * ln_n), regime.sv_gamma)))
    theta1 = math.sqrt(m) * n ** (-regime.eps1)
    theta2 = math.sqrt((1 - regime.alpha / 2) * m * ln_n + m * e1)
    return Thresholds(theta1, theta2)


class LambertRoot(NamedTuple):
    root: float
    asymptote: float


def lambert_root(a: float, b: float, rtol: float = 1e-12) -> LambertRoot:
    """Positive root z of a - ln z - b z^2 = 0.

    With t = 2 b z^2 the equation becomes t + ln t = 2a + ln 2b; Newton runs on
    s = ln t, where f(s) = e^s + s - c is increasing and convex, so starting
    to the right of the root gives monotone convergence.
    """
    if not b > 0 or not math.isfinite(a):
        raise ValueError("need finite a and b > 0")
    c = 2 * a + math.log(2 * b)
    s = math.log(c) if c > 1 else c
    for _ in range(200):
        es = math.exp(s)
        step = (es + s - c) / (es + 1)
        s -= step
        if abs(step) <= rtol * max(1.0, abs(s)):
            break
    root = math.exp(0.5 * (s - math.log(2 * b)))
    asymptote = math.sqrt(c / (2 * b)) if c > 0 else math.nan
    return LambertRoot(root, asymptote)


def h_of_k(k: int) -> int:
    """Smallest h >= 4 with C(h, 4) >= k."""
    if k < 1:
        raise ValueError("k must be positive")
    h = 4
    while math.comb(h, 4) < k:
        h += 1
    return h


def t_of_kp(k: int, p: int, c: float = 1.0) -> float:
    """c h^3 / ln h * p (sqrt(2k) + 5 + 2p) with h = h_of_k(k)."""
    if p < 1 or not c > 0:
        raise ValueError("need p >= 1 and c > 0")
    h = h_of_k(k)
    return c * h**3 / math.log(h) * p * (math.sqrt(2 * k) + 5 + 2 * p)


def rainbow_kk_prob_bound(sizes, m: int) -> float:
    """m^(-k(k-1)/2) (x_1 ... x_k)^(k-1), clamped to [0, 1]."""
    k = len(sizes)
    if k < 2:
        raise ValueError("need at least two sizes")
    if any(x < 0 or x > m for x in sizes):
        raise ValueError("sizes must lie in [0, m]")
    if 0 in sizes:
        return 0.0
    log_bound = (k - 1) * sum(math.log(x) for x in sizes) - k * (k - 1) / 2 * math.log(m)
    return min(1.0, math.exp(log_bound))


class DegreeMoments(NamedTuple):
    mean_d: float
    var_d: float


def degree_moment_predictions(law: SetSizeLaw, n: int, m: int) -> DegreeMoments:
    """Leading-order degree mean (E Y)^2 and variance (E Y)^2 (Var Y + 1)."""
    mom = moments_y(law, n, m)
    mean_d = mom.mean_y**2
    return DegreeMoments(mean_d, mean_d * (mom.var_y + 1))


class EdgeProbBounds(NamedTuple):
    lower: float
    upper: float


def edge_prob_bounds(x1: int, x2: int, m: int) -> EdgeProbBounds:
    """Bounds on P(S_1 ∩ S_2 nonempty) for fixed sizes x1, x2."""
    if not (0 <= x1 <= m and 0 <= x2 <= m):
        raise ValueError("sizes must lie in [0, m]")
    r = x1 * x2 / m
    return EdgeProbBounds(max(0.0, r - r * r), min(1.0, r))


def clustering_prediction(law: SetSizeLaw, n: int, m: int) -> float:
    mom = moments_y(law, n, m)
    return math.sqrt(n / m) * mom.mean_y / mom.mean_y2
