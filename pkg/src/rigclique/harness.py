"""Seeded Monte Carlo experiments comparing sampled graphs with predictions.

Every trial draws its randomness from a seed derived from (master seed,
experiment, point index, trial index), so a report does not depend on how
trials are scheduled across workers.  Reports hold flat per-trial records;
aggregates and rule verdicts are recomputed from those records.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import ballsbins, cliques, instance, oracles, theory
from .distributions import SetSizeLaw, moments_y
from .errors import BudgetExceededError, ConfigError

EXCLUSION_LIMIT = 0.05
Z95 = 1.959963984540054
Z95_ONE_SIDED = 1.6448536269514722

CLAIMS = {
    "powerlaw-clique": "power-law clique number (1 - a/2)^(-a/2) K(n)",
    "finite-variance-structure": "omega = omega' + O_P(1) under bounded Var Y",
    "tv-maxload": "d_TV(omega', M(floor(sqrt(mn) E Y), m)) -> 0",
    "mono-optimality": "E(omega - |Mono-Clique|)^2 = O(1)",
    "degree-moments": "E D = (E Y)^2, Var D = (E Y)^2 (Var Y + 1); clustering sqrt(n/m) E Y / E Y^2",
    "rainbow-bound": "E R <= (E Y^2)^4 / 4!",
    "pair-multiplicity": "each attribute pair shared by at most two vertices whp",
    "sdr-maximization": "SDR probability is maximised by disjoint families",
    "coupling": "M <= M' always and M' - delta E M' <= M whp",
    "runtime-scaling": "Mono-Clique expected O(n) time; Greedy-Clique O(n^2) time",
}


def derive_seed(master_seed: int, experiment: str, point: int, trial: int) -> int:
    """64-bit trial seed from a BLAKE2b digest of its coordinates."""
    key = f"{master_seed}:{experiment}:{point}:{trial}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


@dataclass
class ExperimentConfig:
    experiment: str
    schedule: list[tuple[int, int]]
    law: SetSizeLaw | None = None
    trials: int = 1
    master_seed: int = 0
    params: dict[str, Any] = field(default_factory=dict)
    worker_count: int = 1

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not self.schedule:
            raise ConfigError("schedule must not be empty")
        if self.worker_count < 1:
            raise ConfigError("worker_count must be at least 1")
        if any(n < 1 or m < 1 for n, m in self.schedule):
            raise ConfigError("schedule entries need n, m >= 1")
        if EXPERIMENTS[self.experiment].needs_law and self.law is None:
            raise ConfigError(f"{self.experiment} needs a law")

    def to_dict(self, with_workers: bool = True) -> dict:
        out = {
            "experiment": self.experiment,
            "schedule": [list(p) for p in self.schedule],
            "law": self.law.to_dict() if self.law else None,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "params": self.params,
        }
        if with_workers:
            out["worker_count"] = self.worker_count
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        try:
            law = SetSizeLaw.from_dict(data["law"]) if data.get("law") else None
            cfg = cls(
                experiment=data["experiment"],
                schedule=[(int(n), int(m)) for n, m in data["schedule"]],
                law=law,
                trials=int(data.get("trials", 1)),
                master_seed=int(data.get("master_seed", 0)),
                params=dict(data.get("params", {})),
                worker_count=int(data.get("worker_count", 1)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad config: {exc}") from None
        cfg.validate()
        return cfg


# ---------------------------------------------------------------- trials

def _instance(n, m, law, seed, params):
    path = params.get("instance_file")
    if path:
        return instance.IntersectionInstance.load(path)
    return instance.generate(n, m, law, seed)


def _trial_structure(n, m, law, seed, params):
    inst = _instance(n, m, law, seed, params)
    idx = instance.invert(inst)
    g = instance.build_graph(inst, index=idx)
    mono = cliques.mono_clique(g)
    rec = {"omega_prime": cliques.max_monochromatic(idx).size, "mono": mono.size,
           "edges": g.edge_count}
    try:
        rec["omega"] = cliques.exact_max_clique(g, int(params.get("node_budget",
                                                          cliques.DEFAULT_NODE_BUDGET))).size
        rec["excluded"] = 0
    except BudgetExceededError:
        rec["omega"] = None
        rec["excluded"] = 1
    if params.get("count_bad_cycles", False):
        rec["bad_cycles"] = cliques.count_bad_cycles(inst, g, cap=10**9).count
    return rec


def _trial_powerlaw(n, m, law, seed, params):
    inst = _instance(n, m, law, seed, params)
    g = instance.build_graph(inst)
    res = cliques.greedy_clique(g)
    regime = _regime(law, params)
    cut = theory.thresholds(n, m, regime)
    return {"greedy": res.size,
            "large_vertices": int(np.sum(inst.sizes > cut.theta2)),
            "edges": g.edge_count}


def _trial_tv(n, m, law, seed, params):
    inst = _instance(n, m, law, seed, params)
    omega_prime = int(np.bincount(inst.attrs, minlength=m).max()) if len(inst.attrs) else 0
    balls = math.floor(math.sqrt(m * n) * moments_y(law, n, m).mean_y)
    rng = np.random.default_rng([seed, 1])
    return {"omega_prime": omega_prime, "max_load": ballsbins.max_load_sample(balls, m, rng)}


def _trial_degrees(n, m, law, seed, params):
    inst = _instance(n, m, law, seed, params)
    g = instance.build_graph(inst)
    d = g.degrees.astype(np.int64)
    st = instance.degree_stats(g)
    return {"mean_degree": st.mean, "degree_variance": st.variance,
            "degree_sum": int(d.sum()), "degree_sq_sum": int((d * d).sum()),
            "triangles": instance.triangle_count(g), "two_paths": instance.two_path_count(g)}


def _trial_rainbow(n, m, law, seed, params):
    inst = _instance(n, m, law, seed, params)
    g = instance.build_graph(inst)
    return {"rainbow_k4": cliques.count_rainbow_k4(inst, g),
            "pair_multiplicity": instance.attribute_pair_multiplicity(inst)}


def _trial_pairs(n, m, law, seed, params):
    inst = _instance(n, m, law, seed, params)
    return {"pair_multiplicity": instance.attribute_pair_multiplicity(inst)}


def _trial_sdr(n, m, law, seed, params):
    rng = np.random.default_rng(seed)
    if params.get("exhaustive_m"):
        checked, failures = oracles.exhaustive_disjoint_check(int(params["exhaustive_m"]))
        return {"holds": int(failures == 0), "families": checked, "failures": failures}
    res = oracles.verify_disjoint_maximizes(params.get("sizes", [2, 2, 2]), int(params.get("m", 8)),
                                            int(params.get("d", 3)),
                                            int(params.get("candidates", 50)), rng)
    return {"holds": int(res.holds), "disjoint": res.disjoint, "max_other": res.max_other}


def _trial_coupling(n, m, law, seed, params):
    rng = np.random.default_rng(seed)
    full, kept = ballsbins.coupled_max_loads(n, m, float(params.get("eps", 1e-3)), rng)
    return {"load_full": full, "load": kept}


def _trial_runtime(n, m, law, seed, params):
    inst = _instance(n, m, law, seed, params)
    g = instance.build_graph(inst)
    rec = {"edges": g.edge_count}
    if params.get("time_mono", True):
        start = time.perf_counter()
        rec["mono"] = cliques.mono_clique(g).size
        rec["mono_seconds"] = time.perf_counter() - start
    if params.get("time_greedy", True):
        start = time.perf_counter()
        rec["greedy"] = cliques.greedy_clique(g).size
        rec["greedy_seconds"] = time.perf_counter() - start
    return rec


def _regime(law: SetSizeLaw, params) -> theory.PowerLawRegime:
    return theory.PowerLawRegime(alpha=law.alpha, beta=float(params.get("beta", 1.0)),
                                 eps0=float(params.get("eps0", 0.2)),
                                 eps1=float(params.get("eps1", 0.1)),
                                 sv_gamma=law.sv_gamma)


# ---------------------------------------------------------------- aggregation

def _summary(values) -> dict:
    vals = [float(v) for v in values if v is not None]
    if not vals:
        return {"count": 0, "mean": None, "variance": None, "ci95": None}
    mean = math.fsum(vals) / len(vals)
    var = statistics.variance(vals) if len(vals) > 1 else 0.0
    half = Z95 * math.sqrt(var / len(vals))
    return {"count": len(vals), "mean": mean, "variance": var, "ci95": [mean - half, mean + half]}


def _fraction(records, predicate) -> float:
    return sum(1 for r in records if predicate(r)) / len(records) if records else 0.0


def _point_extra(cfg: ExperimentConfig, n: int, m: int, recs: list[dict]) -> dict:
    name, law, p = cfg.experiment, cfg.law, cfg.params
    out: dict[str, Any] = {}
    if name == "powerlaw-clique":
        pred = theory.predicted_clique_powerlaw(n, _regime(law, p))
        mean = _summary(r["greedy"] for r in recs)["mean"]
        out.update(predicted=pred, ratio=mean / pred)
    elif name in ("finite-variance-structure", "mono-optimality"):
        kept = [r for r in recs if not r["excluded"]]
        out["excluded"] = len(recs) - len(kept)
        out["omega_le_prime_plus_3"] = _fraction(kept, lambda r: r["omega"] <= r["omega_prime"] + 3)
        out["omega_ge_prime"] = _fraction(kept, lambda r: r["omega"] >= r["omega_prime"])
        out["mono_exact"] = _fraction(kept, lambda r: r["mono"] == r["omega"])
        gaps = [(r["omega"] - r["mono"]) ** 2 for r in kept]
        out["mean_sq_gap"] = math.fsum(gaps) / len(gaps) if gaps else None
        out["gap_distribution"] = {str(k): v for k, v in sorted(
            _counts(r["omega"] - r["omega_prime"] for r in kept).items())}
        if n >= 16:
            out["predicted"] = theory.predicted_clique_finite_variance(n)
    elif name == "tv-maxload":
        a = ballsbins.LoadDistribution.from_samples([r["omega_prime"] for r in recs])
        b = ballsbins.LoadDistribution.from_samples([r["max_load"] for r in recs])
        out.update(tv=ballsbins.tv_distance(a, b), pmf_omega=a.to_dict(), pmf_load=b.to_dict(),
                   balls=math.floor(math.sqrt(m * n) * moments_y(law, n, m).mean_y))
    elif name == "degree-moments":
        total = n * len(recs)
        mean = math.fsum(r["degree_sum"] for r in recs) / total
        pooled_var = math.fsum(r["degree_sq_sum"] for r in recs) / total - mean * mean
        pred = theory.degree_moment_predictions(law, n, m)
        paths = sum(r["two_paths"] for r in recs)
        out.update(grand_mean_degree=mean, pooled_degree_variance=pooled_var,
                   predicted_mean=pred.mean_d, predicted_variance=pred.var_d,
                   clustering=3 * sum(r["triangles"] for r in recs) / paths if paths else None,
                   predicted_clustering=theory.clustering_prediction(law, n, m))
    elif name == "rainbow-bound":
        s = _summary(r["rainbow_k4"] for r in recs)
        se = math.sqrt(s["variance"] / s["count"])
        out.update(bound=moments_y(law, n, m).mean_y2 ** 4 / 24,
                   upper95=s["mean"] + Z95_ONE_SIDED * se,
                   pair_le_2=_fraction(recs, lambda r: r["pair_multiplicity"] <= 2))
    elif name == "pair-multiplicity":
        out["pair_le_2"] = _fraction(recs, lambda r: r["pair_multiplicity"] <= 2)
    elif name == "sdr-maximization":
        out["all_hold"] = int(all(r["holds"] for r in recs))
    elif name == "coupling":
        delta = float(p.get("delta", 1.0 / math.log(n + 2)))
        mean_full = math.fsum(r["load_full"] for r in recs) / len(recs)
        out.update(p_equal=_fraction(recs, lambda r: r["load"] == r["load_full"]),
                   p_within_delta=_fraction(recs, lambda r: r["load_full"] - r["load"] <= delta * mean_full),
                   monotone=_fraction(recs, lambda r: r["load"] <= r["load_full"]), delta=delta)
    elif name == "runtime-scaling":
        if "mono_seconds" in recs[0]:
            out["median_mono_seconds"] = statistics.median(r["mono_seconds"] for r in recs)
        if "greedy_seconds" in recs[0]:
            out["total_greedy_seconds"] = math.fsum(r["greedy_seconds"] for r in recs)
    return out


def _counts(values) -> dict[int, int]:
    out: dict[int, int] = {}
    for v in values:
        out[v] = out.get(v, 0) + 1
    return out


def _rule(name: str, value, threshold, passed: bool) -> dict:
    return {"name": name, "value": value, "threshold": threshold, "passed": bool(passed)}


def _rules(cfg: ExperimentConfig, points: list[dict]) -> list[dict]:
    name, p = cfg.experiment, cfg.params
    first, last = points[0], points[-1]
    rules: list[dict] = []
    if name == "powerlaw-clique":
        lo, hi = p.get("ratio_range", [0.4, 1.6])
        slack = p.get("trend_slack", 0.1)
        r = last["ratio"]
        rules.append(_rule("ratio_in_range", r, [lo, hi], lo <= r <= hi))
        rules.append(_rule("ratio_trend", abs(r - 1), abs(first["ratio"] - 1) + slack,
                           abs(r - 1) <= abs(first["ratio"] - 1) + slack))
    elif name in ("finite-variance-structure", "mono-optimality"):
        for pt in points:
            share = pt["excluded"] / pt["trials"]
            rules.append(_rule("exclusions", share, EXCLUSION_LIMIT, share <= EXCLUSION_LIMIT))
            if name == "finite-variance-structure":
                q = p.get("within3_min", 0.95)
                rules.append(_rule("omega_le_prime_plus_3", pt["omega_le_prime_plus_3"], q,
                                   pt["omega_le_prime_plus_3"] >= q))
                rules.append(_rule("omega_ge_prime", pt["omega_ge_prime"], 1.0,
                                   pt["omega_ge_prime"] == 1.0))
            else:
                q = p.get("mono_exact_min", 0.9)
                cap = p.get("mean_sq_gap_max", 1.0)
                rules.append(_rule("mono_exact", pt["mono_exact"], q, pt["mono_exact"] >= q))
                rules.append(_rule("mean_sq_gap", pt["mean_sq_gap"], cap,
                                   pt["mean_sq_gap"] is not None and pt["mean_sq_gap"] <= cap))
    elif name == "tv-maxload":
        cap = p.get("tv_max", 0.15)
        slack = p.get("trend_slack", 0.05)
        rules.append(_rule("tv_last", last["tv"], cap, last["tv"] <= cap))
        if len(points) > 1:
            rules.append(_rule("tv_trend", last["tv"], first["tv"] + slack,
                               last["tv"] <= first["tv"] + slack))
    elif name == "degree-moments":
        for pt in points:
            mtol, vtol = p.get("mean_rel_tol", 0.05), p.get("var_rel_tol", 0.10)
            ctol = p.get("clustering_abs_tol", 0.05)
            em = abs(pt["grand_mean_degree"] - pt["predicted_mean"]) / pt["predicted_mean"]
            ev = abs(pt["pooled_degree_variance"] - pt["predicted_variance"]) / pt["predicted_variance"]
            rules.append(_rule("mean_degree", em, mtol, em <= mtol))
            rules.append(_rule("degree_variance", ev, vtol, ev <= vtol))
            if pt["clustering"] is not None:
                ec = abs(pt["clustering"] - pt["predicted_clustering"])
                rules.append(_rule("clustering", ec, ctol, ec <= ctol))
    elif name == "rainbow-bound":
        for pt in points:
            rules.append(_rule("rainbow_mean_upper95", pt["upper95"], pt["bound"],
                               pt["upper95"] <= pt["bound"]))
            q = p.get("pair_le_2_min", 0.9)
            rules.append(_rule("pair_multiplicity", pt["pair_le_2"], q, pt["pair_le_2"] >= q))
    elif name == "pair-multiplicity":
        q = p.get("pair_le_2_min", 0.9)
        for pt in points:
            rules.append(_rule("pair_multiplicity", pt["pair_le_2"], q, pt["pair_le_2"] >= q))
    elif name == "sdr-maximization":
        for pt in points:
            rules.append(_rule("disjoint_maximizes", pt["all_hold"], 1, pt["all_hold"] == 1))
    elif name == "coupling":
        q = p.get("p_equal_min", 0.9)
        for pt in points:
            rules.append(_rule("monotone", pt["monotone"], 1.0, pt["monotone"] == 1.0))
            rules.append(_rule("p_equal", pt["p_equal"], q, pt["p_equal"] >= q))
    elif name == "runtime-scaling":
        growth = p.get("mono_growth_max", 3.0)
        factor = p.get("greedy_envelope_factor", 1.5)
        for a, b in zip(points, points[1:]):
            if "median_mono_seconds" in a:
                ratio = b["median_mono_seconds"] / a["median_mono_seconds"]
                rules.append(_rule("mono_growth", ratio, growth, ratio <= growth))
        if "total_greedy_seconds" in first and len(points) > 1:
            envelope = first["total_greedy_seconds"] * (last["n"] / first["n"]) ** 2 * factor
            rules.append(_rule("greedy_quadratic_envelope", last["total_greedy_seconds"], envelope,
                               last["total_greedy_seconds"] <= envelope))
    selected = p.get("rules")
    if selected:
        rules = [r for r in rules if r["name"] in selected]
    return rules


def summarize(cfg: ExperimentConfig, records: list[dict]) -> tuple[list[dict], list[dict]]:
    """Per-point aggregates and rule verdicts, computed only from ``records``."""
    points = []
    skip = {"point", "trial", "n", "m", "seed"}
    for pi, (n, m) in enumerate(cfg.schedule):
        recs = [r for r in records if r["point"] == pi]
        agg: dict[str, Any] = {"point": pi, "n": n, "m": m, "trials": len(recs)}
        if recs:
            numeric = sorted(k for k in recs[0] if k not in skip)
            agg["stats"] = {k: _summary(r[k] for r in recs) for k in numeric}
            agg.update(_point_extra(cfg, n, m, recs))
        points.append(agg)
    rules = _rules(cfg, points) if records else []
    return points, rules


@dataclass
class Experiment:
    trial: Callable
    needs_law: bool = True


EXPERIMENTS: dict[str, Experiment] = {
    "powerlaw-clique": Experiment(_trial_powerlaw),
    "finite-variance-structure": Experiment(_trial_structure),
    "mono-optimality": Experiment(_trial_structure),
    "tv-maxload": Experiment(_trial_tv),
    "degree-moments": Experiment(_trial_degrees),
    "rainbow-bound": Experiment(_trial_rainbow),
    "pair-multiplicity": Experiment(_trial_pairs),
    "sdr-maximization": Experiment(_trial_sdr, needs_law=False),
    "coupling": Experiment(_trial_coupling, needs_law=False),
    "runtime-scaling": Experiment(_trial_runtime),
}


def _run_job(job):
    name, n, m, law_dict, seed, params = job
    law = SetSizeLaw.from_dict(law_dict) if law_dict else None
    return EXPERIMENTS[name].trial(n, m, law, seed, params)


def run(cfg: ExperimentConfig) -> dict:
    """Run every trial of every schedule point and assemble the report."""
    cfg.validate()
    law_dict = cfg.law.to_dict() if cfg.law else None
    keys, jobs = [], []
    for pi, (n, m) in enumerate(cfg.schedule):
        for t in range(cfg.trials):
            seed = derive_seed(cfg.master_seed, cfg.experiment, pi, t)
            keys.append((pi, t, n, m, seed))
            jobs.append((cfg.experiment, n, m, law_dict, seed, cfg.params))
    if cfg.worker_count > 1:
        with ProcessPoolExecutor(max_workers=cfg.worker_count) as pool:
            results = list(pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * cfg.worker_count))))
    else:
        results = [_run_job(job) for job in jobs]
    records = []
    for (pi, t, n, m, seed), res in zip(keys, results):
        records.append({"point": pi, "trial": t, "n": n, "m": m, "seed": seed, **res})
    points, rules = summarize(cfg, records)
    return {
        "experiment": cfg.experiment,
        "claim": CLAIMS[cfg.experiment],
        "config": cfg.to_dict(with_workers=False),
        "records": records,
        "points": points,
        "rules": rules,
        "passed": all(r["passed"] for r in rules),
    }


def emit(report: dict, fmt: str = "json") -> bytes:
    """Serialise a report: nested JSON, or CSV with one row per trial."""
    if fmt == "json":
        return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode()
    if fmt == "csv":
        base = ["point", "trial", "n", "m", "seed"]
        extra = sorted({k for r in report.get("records", []) for k in r} - set(base))
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=base + extra, lineterminator="\n")
        writer.writeheader()
        for r in report.get("records", []):
            writer.writerow(r)
        return buf.getvalue().encode()
    raise ValueError(f"unsupported format {fmt!r}")
