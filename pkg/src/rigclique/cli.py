"""Command-line entry point: ``rigclique <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 runtime error, 3 failed acceptance.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import ballsbins, cliques, harness, instance, theory
from .distributions import SetSizeLaw

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_FAILED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _load_json_arg(text: str):
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    return json.loads(text)


def _write(data: str | bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(data if isinstance(data, bytes) else data.encode())
    elif isinstance(data, bytes):
        sys.stdout.buffer.write(data)
    else:
        sys.stdout.write(data)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def cmd_gen(args) -> int:
    law = SetSizeLaw.from_dict(_load_json_arg(args.law))
    inst = instance.generate(args.n, args.m, law, args.seed)
    _write(inst.to_text(), args.out)
    return EXIT_OK


def cmd_graph(args) -> int:
    g = instance.build_graph(instance.IntersectionInstance.load(args.instance))
    _write(g.to_edge_list(), args.out)
    return EXIT_OK


def cmd_clique(args) -> int:
    g = instance.build_graph(instance.IntersectionInstance.load(args.instance))
    if args.algo == "greedy":
        res = cliques.greedy_clique(g)
    elif args.algo == "mono":
        res = cliques.mono_clique(g)
    else:
        res = cliques.exact_max_clique(g, args.budget)
    _write(_json(res.to_dict()), None)
    return EXIT_OK


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.formula} needs {', '.join(missing)}")
    return [getattr(args, n) for n in names]


def _regime(args) -> theory.PowerLawRegime:
    return theory.PowerLawRegime(alpha=args.alpha, beta=args.beta, eps0=args.eps0,
                                 eps1=args.eps1, sv_gamma=args.gamma)


def cmd_predict(args) -> int:
    f = args.formula
    if f == "finite-variance":
        (n,) = _need(args, "n")
        value = {"value": theory.predicted_clique_finite_variance(n)}
    elif f == "powerlaw-clique":
        n, _ = _need(args, "n", "alpha")
        value = {"value": theory.predicted_clique_powerlaw(n, _regime(args))}
    elif f == "thresholds":
        n, m, _ = _need(args, "n", "m", "alpha")
        value = theory.thresholds(n, m, _regime(args))._asdict()
    elif f == "lambert-root":
        a, b = _need(args, "a", "b")
        value = theory.lambert_root(a, b)._asdict()
    elif f == "h-of-k":
        (k,) = _need(args, "k")
        value = {"value": theory.h_of_k(k)}
    elif f == "t-of-kp":
        k, p = _need(args, "k", "p")
        value = {"value": theory.t_of_kp(k, p, args.c)}
    elif f == "rainbow-bound":
        sizes, m = _need(args, "sizes", "m")
        value = {"value": theory.rainbow_kk_prob_bound(sizes, m)}
    elif f == "edge-prob-bounds":
        x1, x2, m = _need(args, "x1", "x2", "m")
        value = theory.edge_prob_bounds(x1, x2, m)._asdict()
    elif f in ("degree-moments", "clustering"):
        law, n, m = _need(args, "law", "n", "m")
        law = SetSizeLaw.from_dict(_load_json_arg(law))
        if f == "degree-moments":
            value = theory.degree_moment_predictions(law, n, m)._asdict()
        else:
            value = {"value": theory.clustering_prediction(law, n, m)}
    else:  # argparse restricts choices
        raise UsageError(f"unknown formula {f}")
    _write(_json({"formula": f, **value}), None)
    return EXIT_OK


def cmd_maxload(args) -> int:
    if args.exact:
        dist = ballsbins.max_load_exact(args.N, args.m)
    else:
        rng = np.random.default_rng(args.seed)
        dist = ballsbins.LoadDistribution.from_samples(
            ballsbins.max_load_samples(args.N, args.m, args.trials, rng))
    _write(_json(dist.to_dict()), None)
    return EXIT_OK


def cmd_experiment(args) -> int:
    data = json.loads(Path(args.config).read_text())
    if args.workers is not None:
        data["worker_count"] = args.workers
    cfg = harness.ExperimentConfig.from_dict(data)
    report = harness.run(cfg)
    _write(harness.emit(report, args.format), args.out)
    for rule in report["rules"]:
        status = "PASS" if rule["passed"] else "FAIL"
        print(f"{status} {rule['name']}: {rule['value']} vs {rule['threshold']}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_FAILED


FORMULAS = ["finite-variance", "powerlaw-clique", "thresholds", "lambert-root", "h-of-k",
            "t-of-kp", "rainbow-bound", "edge-prob-bounds", "degree-moments", "clustering"]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rigclique", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="sample an instance file")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("law", help="law JSON, or @path to a JSON file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("graph", help="instance file to edge list")
    p.add_argument("instance")
    p.add_argument("--out")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("clique", help="run a clique algorithm on an instance file")
    p.add_argument("instance")
    p.add_argument("--algo", choices=["greedy", "mono", "exact"], default="mono")
    p.add_argument("--budget", type=int, default=cliques.DEFAULT_NODE_BUDGET)
    p.set_defaults(func=cmd_clique)

    p = sub.add_parser("predict", help="evaluate a closed-form prediction")
    p.add_argument("formula", choices=FORMULAS)
    for name, typ in [("n", int), ("m", int), ("alpha", float), ("a", float), ("b", float),
                      ("k", int), ("p", int), ("x1", int), ("x2", int), ("law", str)]:
        p.add_argument(f"--{name}", type=typ)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--eps0", type=float, default=0.2)
    p.add_argument("--eps1", type=float, default=0.1)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--sizes", type=int, nargs="+")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("maxload", help="law of the maximum bin load M(N, m)")
    p.add_argument("N", type=int)
    p.add_argument("m", type=int)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_maxload)

    p = sub.add_parser("experiment", help="run an experiment config")
    p.add_argument("config")
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
