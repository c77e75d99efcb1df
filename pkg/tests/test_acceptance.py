"""Acceptance criteria, each run at its stated tolerance.

Every test prints one PASS/FAIL line and the full set is repeated in the
terminal summary.  All randomness flows from MASTER_SEED, fixed in advance.
"""

import math

import numpy as np
import pytest

from rigclique.ballsbins import LoadDistribution, max_load_exact, max_load_samples, tv_distance
from rigclique.cliques import exact_max_clique
from rigclique.distributions import SetSizeLaw
from rigclique.harness import ExperimentConfig, run, summarize
from rigclique.instance import build_graph, generate
from rigclique.oracles import brute_max_clique, rainbow_clique_probability_exact
from rigclique.theory import lambert_root, rainbow_kk_prob_bound

MASTER_SEED = 2026
D3 = SetSizeLaw.deterministic(3)
POWER = SetSizeLaw.power_law(1.5)

pytestmark = pytest.mark.slow


def _experiment(name, schedule, law, trials, **params):
    return run(ExperimentConfig(name, schedule, law, trials, MASTER_SEED, params))


def _rule(report, name, index=0):
    return [r for r in report["rules"] if r["name"] == name][index]


@pytest.fixture(scope="module")
def structure_run():
    return _experiment("finite-variance-structure", [(2000, 2000)], D3, 200)


@pytest.fixture(scope="module")
def degree_run():
    return _experiment("degree-moments", [(10**4, 10**4)], D3, 100)


@pytest.fixture(scope="module")
def rainbow_run():
    return _experiment("rainbow-bound", [(2000, 2000)], D3, 200)


def test_01_exact_clique_matches_brute_force(verdict):
    rng = np.random.default_rng(MASTER_SEED)
    mismatches = 0
    for _ in range(500):
        n, m = int(rng.integers(1, 13)), int(rng.integers(1, 13))
        law = (SetSizeLaw.binomial(float(rng.uniform(0.05, 0.5))) if rng.random() < 0.5
               else SetSizeLaw.deterministic(int(rng.integers(0, 4))))
        g = build_graph(generate(n, m, law, int(rng.integers(2**63))))
        mismatches += exact_max_clique(g).size != brute_max_clique(g)
    verdict(1, "exact clique vs brute force", mismatches == 0, f"{mismatches} mismatches in 500")


def test_02_max_load_sampler_matches_exact(verdict):
    rng = np.random.default_rng(MASTER_SEED)
    tvs = {}
    for N, m in [(5, 3), (8, 4), (10, 10)]:
        sampled = LoadDistribution.from_samples(max_load_samples(N, m, 10**5, rng))
        tvs[(N, m)] = tv_distance(sampled, max_load_exact(N, m))
    worst = max(tvs.values())
    verdict(2, "max-load sampler vs exact law", worst <= 0.01,
            ", ".join(f"{k}: {v:.4f}" for k, v in tvs.items()) + " (limit 0.01)")


def test_03_tv_distance_to_max_load(verdict):
    report = _experiment("tv-maxload", [(256, 256), (4096, 4096)], D3, 2000)
    first, last = report["points"]
    passed = _rule(report, "tv_last")["passed"] and _rule(report, "tv_trend")["passed"]
    verdict(3, "omega' vs max load TV", passed,
            f"TV(256)={first['tv']:.4f}, TV(4096)={last['tv']:.4f} (limit 0.15, trend slack 0.05)")


def test_04_omega_close_to_monochromatic(verdict, structure_run):
    pt = structure_run["points"][0]
    passed = all(r["passed"] for r in structure_run["rules"])
    verdict(4, "omega vs omega'", passed,
            f"omega <= omega'+3 in {pt['omega_le_prime_plus_3']:.3f} (need 0.95), "
            f"omega >= omega' in {pt['omega_ge_prime']:.3f} (need 1), excluded {pt['excluded']}")


def test_05_mono_clique_optimal(verdict, structure_run):
    cfg = ExperimentConfig.from_dict({**structure_run["config"], "experiment": "mono-optimality"})
    points, rules = summarize(cfg, structure_run["records"])
    pt = points[0]
    verdict(5, "Mono-Clique vs omega", all(r["passed"] for r in rules),
            f"|C| = omega in {pt['mono_exact']:.3f} (need 0.9), "
            f"mean (omega-|C|)^2 = {pt['mean_sq_gap']:.4f} (limit 1.0)")


def test_06_powerlaw_greedy_ratio(verdict):
    report = _experiment("powerlaw-clique", [(10**3, 10**3), (10**4, 10**4), (10**5, 10**5)],
                         POWER, 20)
    ratios = [pt["ratio"] for pt in report["points"]]
    verdict(6, "greedy / predicted power-law clique", report["passed"],
            "ratios " + ", ".join(f"{r:.3f}" for r in ratios)
            + f"; range [0.4, 1.6] at 1e5, |r-1| trend {abs(ratios[-1] - 1):.3f}"
            f" <= {abs(ratios[0] - 1) + 0.1:.3f}")


def test_07_degree_moments(verdict, degree_run):
    pt = degree_run["points"][0]
    passed = _rule(degree_run, "mean_degree")["passed"] and _rule(degree_run, "degree_variance")["passed"]
    verdict(7, "degree mean and variance", passed,
            f"mean {pt['grand_mean_degree']:.4f} (9 +- 5%), "
            f"variance {pt['pooled_degree_variance']:.4f} (9 +- 10%)")


def test_08_clustering(verdict, degree_run):
    pt = degree_run["points"][0]
    verdict(8, "clustering coefficient", _rule(degree_run, "clustering")["passed"],
            f"{pt['clustering']:.4f} vs 1/3 (abs tol 0.05)")


def test_09_rainbow_k4_mean(verdict, rainbow_run):
    pt = rainbow_run["points"][0]
    assert pt["bound"] == pytest.approx(273.375)
    verdict(9, "rainbow K4 count", _rule(rainbow_run, "rainbow_mean_upper95")["passed"],
            f"mean {pt['stats']['rainbow_k4']['mean']:.4f}, one-sided 95% upper "
            f"{pt['upper95']:.4f} <= {pt['bound']}")


def test_10_pair_multiplicity(verdict, rainbow_run):
    pt = rainbow_run["points"][0]
    verdict(10, "attribute pair multiplicity", _rule(rainbow_run, "pair_multiplicity")["passed"],
            f"<= 2 in {pt['pair_le_2']:.3f} of trials (need 0.9)")


def test_11_disjoint_families_maximise_sdr(verdict):
    sampled = run(ExperimentConfig("sdr-maximization", [(1, 1)], None, 1, MASTER_SEED,
                                   {"sizes": [2, 2, 2], "m": 8, "d": 3, "candidates": 50}))
    exhaustive = run(ExperimentConfig("sdr-maximization", [(1, 1)], None, 1, MASTER_SEED,
                                      {"exhaustive_m": 5}))
    rec = exhaustive["records"][0]
    verdict(11, "disjoint families maximise SDR probability",
            sampled["passed"] and exhaustive["passed"],
            f"(2,2,2) m=8 d=3: disjoint {sampled['records'][0]['disjoint']:.4f} >= "
            f"{sampled['records'][0]['max_other']:.4f}; exhaustive m<=5: "
            f"{rec['failures']} failures in {rec['families']}")


def test_12_rainbow_triangle_bound(verdict):
    exact = rainbow_clique_probability_exact([2, 2, 2], 6)
    bound = rainbow_kk_prob_bound([2, 2, 2], 6)
    verdict(12, "rainbow K3 probability bound", exact <= bound, f"exact {exact:.6f} <= {bound:.6f}")


def test_13_lambert_root(verdict):
    res = lambert_root(100, 0.01)
    rel = abs(res.root / res.asymptote - 1)
    rng = np.random.default_rng(MASTER_SEED)
    worst = 0.0
    for a, b in zip(rng.uniform(-10, 1e3, 10**4), 10 ** rng.uniform(-6, 3, 10**4)):
        z = lambert_root(float(a), float(b)).root
        worst = max(worst, abs(a - math.log(z) - b * z * z))
    verdict(13, "Lambert-type root", rel <= 0.05 and worst < 1e-9,
            f"root/asymptote - 1 = {rel:.4f} (limit 0.05); max residual {worst:.2e} (limit 1e-9)")


def test_14_coupling(verdict):
    report = _experiment("coupling", [(10**4, 10**4)], None, 10**4, eps=1e-3)
    pt = report["points"][0]
    verdict(14, "max-load coupling", report["passed"],
            f"M <= M' in {pt['monotone']:.4f} (need 1), P(M = M') = {pt['p_equal']:.4f} (need 0.9)")


def test_15_runtime_scaling(verdict):
    mono = _experiment("runtime-scaling", [(10**5, 10**5), (2 * 10**5, 2 * 10**5)], D3, 20,
                       time_greedy=False)
    greedy = _experiment("runtime-scaling", [(10**4, 10**4), (10**5, 10**5)], POWER, 20,
                         time_mono=False)
    growth = _rule(mono, "mono_growth")
    envelope = _rule(greedy, "greedy_quadratic_envelope")
    verdict(15, "running-time scaling", growth["passed"] and envelope["passed"],
            f"Mono-Clique median growth x{growth['value']:.3f} (limit 3.0); Greedy-Clique "
            f"{envelope['value']:.3f}s <= envelope {envelope['threshold']:.3f}s")
