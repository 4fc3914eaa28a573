"""Command-line front end.

Every subcommand is deterministic given its flags and seed; randomized
commands take --seed, which falls back to the KURAMEM_SEED environment
variable and then to 0. Exit codes: 1 I/O failure, 2 parameter domain
error, 3 enumeration budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import jsonutil
from .capacity import (build_topology, count_exact, results_to_csv,
                       run_experiment, sample_estimate)
from .dynamics import DEFAULT_CONV_TOL, DEFAULT_DT, DEFAULT_T_MAX, integrate
from .equilibria import audit_spurious, enumerate_exact, equilibria_to_json
from .errors import (EnumerationBudgetError, IntegrationBlowUpError,
                     KuramemError, ParameterDomainError, RetrievalError)
from .graphs import Graph, graph_from_json, graph_to_json
from .memory import PatternCodec, decode, retrieve, store
from .plotting import write_capacity_svg

SEED_ENV = "KURAMEM_SEED"


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ParameterDomainError(f"{SEED_ENV}={env!r} is not an integer")
    return 0


def _load_graph(path: str) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return graph_from_json(fh.read())


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _graph_from_args(args) -> Graph:
    if getattr(args, "graph", None):
        return _load_graph(args.graph)
    if not args.topology:
        raise ParameterDomainError("provide --graph FILE or --topology flags")
    return _build_from_args(args)


def _build_from_args(args) -> Graph:
    kind = args.topology
    if kind in ("honeycomb", "honeycomb_chain"):
        if args.nc is None or args.m is None:
            raise ParameterDomainError(f"{kind} requires --nc and --m")
        return build_topology(kind, args.nc, args.m, args.coupling)
    if args.rows is None or args.cols is None:
        raise ParameterDomainError(f"{kind} requires --rows and --cols")
    return build_topology(kind, args.rows, args.cols, args.coupling)


def _add_topology_flags(p: argparse.ArgumentParser, required: bool = False) -> None:
    p.add_argument("--topology", required=required,
                   choices=["honeycomb", "honeycomb_chain", "hex", "hex_array",
                            "square", "square_array", "tri", "tri_array"])
    p.add_argument("--nc", type=int, help="cycle size for honeycomb topologies")
    p.add_argument("--m", type=int, help="cycle count for honeycomb topologies")
    p.add_argument("--rows", type=int, help="cell rows for array topologies")
    p.add_argument("--cols", type=int, help="cell columns for array topologies")
    p.add_argument("--coupling", type=float, default=1.0)


def _codec_for_graph(args, g: Graph) -> PatternCodec:
    if args.nc is not None and args.m is not None:
        codec = PatternCodec(args.nc, args.m)
    else:
        # infer from the graph: equal-size basis cycles, honeycomb node count
        sizes = {len(c) for c in g.cycle_basis}
        if len(sizes) != 1:
            raise ParameterDomainError(
                "cannot infer codec from graph; pass --nc and --m")
        nc = sizes.pop()
        m = len(g.cycle_basis)
        if g.n != m * (nc - 1) + 1:
            raise ParameterDomainError(
                "graph is not a honeycomb chain; pass --nc and --m")
        codec = PatternCodec(nc, m)
    return codec


def cmd_build(args) -> int:
    g = _build_from_args(args)
    _write_output(graph_to_json(g), args.output)
    return 0


def cmd_enumerate(args) -> int:
    g = _load_graph(args.graph)
    eqs = enumerate_exact(g, budget=args.budget, jobs=args.jobs)
    _write_output(equilibria_to_json(g, eqs), args.output)
    return 0


def cmd_capacity(args) -> int:
    if args.exact and args.sample is not None:
        raise ParameterDomainError("--exact and --sample are mutually exclusive")
    g = _graph_from_args(args)
    if args.sample is not None:
        est = sample_estimate(g, args.sample, seed=_resolve_seed(args.seed))
        mode = "sample"
    else:
        est = count_exact(g, jobs=args.jobs)
        mode = "exact"
    row = {
        "topology": args.topology or "file",
        "param1": args.nc if args.nc is not None else (args.rows or 0),
        "param2": args.m if args.m is not None else (args.cols or 0),
        "n_nodes": g.n, "mode": mode, "count": est.count,
        "ci_low": est.ci_low, "ci_high": est.ci_high,
        "samples": est.samples, "seed": est.seed, "wall_ms": 0,
    }
    _write_output(results_to_csv([row]), args.output)
    return 0


def cmd_store(args) -> int:
    g = _load_graph(args.graph)
    codec = _codec_for_graph(args, g)
    theta = store(args.pattern, codec)
    if len(theta) != g.n:
        raise ParameterDomainError(
            f"codec implies {len(theta)} oscillators, graph has {g.n}")
    payload = {
        "pattern": args.pattern,
        "winding": [int(k) for k in decode(args.pattern, codec)],
        "theta": [float(x) for x in theta],
    }
    _write_output(jsonutil.dumps(payload), args.output)
    return 0


def cmd_retrieve(args) -> int:
    g = _load_graph(args.graph)
    codec = _codec_for_graph(args, g)
    theta0 = store(args.pattern, codec)
    if len(theta0) != g.n:
        raise ParameterDomainError(
            f"codec implies {len(theta0)} oscillators, graph has {g.n}")
    if args.noise > 0:
        rng = np.random.default_rng(_resolve_seed(args.seed))
        theta0 = theta0 + rng.uniform(-args.noise, args.noise, g.n)
    bits, diag = retrieve(theta0, codec, g, dt=args.dt, t_max=args.tmax)
    lines = [bits,
             f"t_converged: {diag.t_converged:.6g}",
             f"residual: {diag.residual:.6g}",
             f"cohesive: {str(diag.cohesive).lower()}"]
    _write_output("\n".join(lines) + "\n", args.output)
    return 0


def cmd_simulate(args) -> int:
    g = _load_graph(args.graph)
    if args.init == "zeros":
        theta0 = np.zeros(g.n)
    elif args.init == "random":
        rng = np.random.default_rng(_resolve_seed(args.seed))
        theta0 = rng.uniform(-np.pi, np.pi, g.n)
    else:
        with open(args.init, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        values = payload["theta"] if isinstance(payload, dict) else payload
        theta0 = np.asarray([float(x) for x in values])
        if len(theta0) != g.n:
            raise ParameterDomainError(
                f"initial state has {len(theta0)} entries, graph has {g.n}")
    if args.noise > 0:
        rng = np.random.default_rng(_resolve_seed(args.seed))
        theta0 = theta0 + rng.uniform(-args.noise, args.noise, g.n)
    result = integrate(theta0, g, dt=args.dt, t_max=args.tmax,
                       conv_tol=args.conv_tol, record_stride=args.stride)
    header = "t," + ",".join(f"theta_{i}" for i in range(1, g.n + 1))
    lines = [header]
    for t, th in result.trajectory:
        lines.append(",".join([format(t, ".17g")]
                              + [format(x, ".17g") for x in th]))
    _write_output("\n".join(lines) + "\n", args.output)
    sys.stderr.write(f"converged: {str(result.converged).lower()} "
                     f"t: {result.t_elapsed:.6g}\n")
    return 0


def cmd_audit(args) -> int:
    g = _load_graph(args.graph)
    known = enumerate_exact(g, budget=args.budget, jobs=args.jobs)
    report = audit_spurious(g, known, args.trials, seed=_resolve_seed(args.seed),
                            jobs=args.jobs)
    _write_output("\n".join(report.summary_lines()) + "\n", args.output)
    return 0 if not report.unmatched_stable else 4


def cmd_experiment(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    if args.seed is not None or SEED_ENV in os.environ:
        config["seed"] = _resolve_seed(args.seed)
    rows = run_experiment(config, jobs=args.jobs)
    _write_output(results_to_csv(rows), args.output)
    return 0


def cmd_plot(args) -> int:
    import csv

    with open(args.results, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    _write_output(write_capacity_svg(rows), args.output)
    return 0


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kuramem",
        description="Kuramoto-oscillator associative memory toolbox")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a topology and write its JSON")
    _add_topology_flags(p, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("enumerate", help="all stable cohesive equilibria of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("capacity", help="count stable configurations (CSV row)")
    p.add_argument("--graph")
    _add_topology_flags(p)
    p.add_argument("--exact", action="store_true", default=False)
    p.add_argument("--sample", type=int, metavar="N",
                   help="estimate from N sampled winding vectors")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("store", help="phase configuration for a bit pattern")
    p.add_argument("--graph", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--nc", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_store)

    p = sub.add_parser("retrieve",
                       help="store a pattern, perturb it, relax, read it back")
    p.add_argument("--graph", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int)
    p.add_argument("--nc", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--dt", type=float, default=DEFAULT_DT)
    p.add_argument("--tmax", type=float, default=DEFAULT_T_MAX)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("simulate", help="integrate and dump a trajectory CSV")
    p.add_argument("--graph", required=True)
    p.add_argument("--init", default="random",
                   help="'random', 'zeros', or a JSON file with a theta array")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int)
    p.add_argument("--dt", type=float, default=DEFAULT_DT)
    p.add_argument("--tmax", type=float, default=DEFAULT_T_MAX)
    p.add_argument("--conv-tol", type=float, default=DEFAULT_CONV_TOL)
    p.add_argument("--stride", type=int, default=10)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("audit", help="random-restart search for spurious memories")
    p.add_argument("--graph", required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("experiment", help="run a capacity sweep from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("plot", help="render a sweep CSV as an SVG scatter")
    p.add_argument("--results", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except EnumerationBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ParameterDomainError, RetrievalError, IntegrationBlowUpError,
            KuramemError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
