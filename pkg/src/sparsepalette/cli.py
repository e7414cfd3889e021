"""Experiment driver: generate graphs, run coloring pipelines and simulators
over seed sweeps, and emit machine-readable reports.

Reports are JSON lines (schema 1), one per (mode, seed) run; bench tables are
CSV.  Exit codes: 0 when every run verified, 1 on any abort/budget/verify
failure, 2 on usage or I/O errors."""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

import numpy as np

from .errors import MalformedInputError, ParameterError, PreconditionError
from .graphs import (
    Graph,
    clique_collection,
    gnp,
    gnp_triangle_free,
    load_edge_list,
    save_edge_list,
)
from .conflict import build_conflict_graph, oriented_out_degrees
from .nibble import nibble_schedule
from .palette import DegPlusOnePalette, sample_lists
from .pipelines import (
    color_deg_plus_one,
    color_degeneracy,
    color_one_eps_delta,
    color_one_eps_deg,
    color_triangle_free,
    partition_color,
)
from .sublinear import EdgeStream, query_color, stream_color

SCHEMA_VERSION = 1
COLOR_MODES = ("od", "trifree", "degp1", "onedeg", "degeneracy", "partition")
SIM_MODES = ("od", "trifree", "degp1", "onedeg")


def _parse_seeds(text: str) -> list[int]:
    seeds = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if ".." in chunk:
            lo, hi = chunk.split("..")
            seeds.extend(range(int(lo), int(hi) + 1))
        elif chunk:
            seeds.append(int(chunk))
    if not seeds:
        raise ParameterError(f"empty seed range {text!r}")
    return seeds


def _file_descriptor(path: str) -> dict:
    with open(path, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    return {"file": os.path.basename(path), "sha256": digest[:16]}


def _emit(report: dict, out) -> None:
    out.write(json.dumps(report, sort_keys=True) + "\n")
    out.flush()


def _pipeline_report(g: Graph, mode: str, seed: int, args) -> dict:
    t0 = time.perf_counter()
    params: dict = {}
    if mode == "od":
        params = {"eps": args.eps, "ell_constant": args.ell_constant}
        result = color_one_eps_delta(g, args.eps, seed, ell=args.ell, ell_constant=args.ell_constant)
    elif mode == "trifree":
        params = {"gamma": args.gamma, "b": args.b_constant, "d_floor": args.d_floor,
                  "sqrt_log": args.sqrt_log}
        result = color_triangle_free(
            g, args.gamma, seed, b=args.b_constant, ell=args.ell,
            sqrt_log=args.sqrt_log, d_floor=args.d_floor,
        )
    elif mode == "degp1":
        params = {"eps": args.dec_eps, "ell_factor": args.ell_factor, "alpha": args.alpha}
        result = color_deg_plus_one(
            g, seed, eps=args.dec_eps, ell=args.ell, ell_factor=args.ell_factor, alpha=args.alpha
        )
    elif mode == "onedeg":
        params = {"eps": args.eps}
        result = color_one_eps_deg(g, args.eps, seed, ell=args.ell)
    elif mode == "degeneracy":
        params = {"eps": args.eps}
        result = color_degeneracy(g, args.eps, seed, ell=args.ell)
    elif mode == "partition":
        params = {"eps": args.eps, "k": args.k, "subroutine": args.subroutine, "gamma": args.gamma}
        result = partition_color(g, args.k, args.eps, args.subroutine, seed, gamma=args.gamma)
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    elapsed = time.perf_counter() - t0
    outcome = result.outcome
    verified = result.verify(g) if outcome.is_success else False
    coloring = outcome.coloring
    diagnostics = dict(result.diagnostics)
    if result.lists is not None:
        cg = build_conflict_graph(g, result.lists)
        diagnostics["conflict_edges"] = cg.edge_count
        charges = oriented_out_degrees(cg)
        diagnostics["max_oriented_out_degree"] = int(charges.max()) if len(charges) else 0
    if getattr(args, "lists_out", None) and result.lists is not None:
        with open(args.lists_out, "w") as fh:
            fh.write(result.lists.to_text())
    return {
        "schema": SCHEMA_VERSION,
        "mode": mode,
        "seed": seed,
        "params": params,
        "outcome": outcome.status,
        "abort_vertex": outcome.vertex,
        "abort_reason": outcome.reason,
        "colors_used": coloring.distinct_colors() if coloring is not None else 0,
        "verify_passed": bool(verified),
        "diagnostics": _jsonable(diagnostics),
        "ledger": None,
        "elapsed_ms": round(elapsed * 1000.0, 3),
    }


def _sim_report(path: str, kind: str, mode: str, seed: int, args) -> dict:
    t0 = time.perf_counter()
    params = {"eps": args.eps, "gamma": args.gamma}
    if kind == "stream":
        stream = EdgeStream.from_file(path)
        sim = stream_color(
            stream, mode, seed, eps=args.eps, gamma=args.gamma, ell=args.ell,
            declared_delta=args.declared_delta, decomposition_eps=args.dec_eps,
        )
    else:
        g = load_edge_list(path)
        sim = query_color(
            g, mode, seed, eps=args.eps, gamma=args.gamma, ell=args.ell,
            decomposition_eps=args.dec_eps,
        )
    elapsed = time.perf_counter() - t0
    outcome = sim.outcome
    verified = False
    if outcome.is_success:
        g_full = load_edge_list(path)
        from .solver import verify_coloring

        ok, _ = verify_coloring(g_full, None, outcome.coloring)
        verified = bool(ok)
    coloring = outcome.coloring
    return {
        "schema": SCHEMA_VERSION,
        "mode": f"{kind}:{mode}",
        "seed": seed,
        "params": params,
        "outcome": outcome.status,
        "abort_vertex": outcome.vertex,
        "abort_reason": outcome.reason,
        "colors_used": coloring.distinct_colors() if coloring is not None else 0,
        "verify_passed": verified,
        "diagnostics": _jsonable(sim.diagnostics),
        "ledger": sim.ledger.snapshot(),
        "elapsed_ms": round(elapsed * 1000.0, 3),
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


_WORKER_GRAPHS: dict = {}


def _color_worker(job):
    path, mode, seed, args = job
    g = _WORKER_GRAPHS.get(path)
    if g is None:
        g = load_edge_list(path)
        _WORKER_GRAPHS[path] = g
    report = _pipeline_report(g, mode, seed, args)
    report["graph"] = _file_descriptor(path)
    return report


def _sim_worker(job):
    path, kind, mode, seed, args = job
    report = _sim_report(path, kind, mode, seed, args)
    report["graph"] = _file_descriptor(path)
    return report


def _pool_size(n_jobs: int) -> int:
    cap = os.environ.get("PALETTE_THREADS")
    if cap is not None:
        return max(1, min(int(cap), n_jobs))
    return max(1, min(os.cpu_count() or 1, 4, n_jobs))


def _run_jobs(jobs, worker, out) -> int:
    workers = _pool_size(len(jobs))
    failed = 0
    if workers <= 1 or len(jobs) <= 1:
        for job in jobs:
            report = worker(job)
            _emit(report, out)
            failed += not report["verify_passed"]
        return failed
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for report in pool.map(worker, jobs):
            _emit(report, out)
            failed += not report["verify_passed"]
    return failed


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    if args.gnp:
        if args.n is None or args.p is None:
            raise ParameterError("--gnp needs --n and --p")
        g = gnp(args.n, float(args.p), args.seed)
    elif args.gnp_trifree:
        if args.n is None:
            raise ParameterError("--gnp-trifree needs --n")
        p = (1.0 / 3.0) * args.n ** (-2.0 / 3.0) if args.p in (None, "auto") else float(args.p)
        g = gnp_triangle_free(args.n, p, args.seed)
    elif args.clique_collection:
        if args.ell is None or args.k is None:
            raise ParameterError("--clique-collection needs --ell and --k")
        g = clique_collection(args.ell, args.k)
    else:
        raise ParameterError("choose one of --gnp / --gnp-trifree / --clique-collection")
    save_edge_list(g, args.out)
    print(f"wrote {args.out}: n={g.n} m={g.m}", file=sys.stderr)
    return 0


def cmd_color(args) -> int:
    if args.mode not in COLOR_MODES:
        raise ParameterError(f"unknown mode {args.mode!r}")
    g = load_edge_list(args.graph)  # fail fast, with line numbers, before any output
    if args.decomposition_out:
        from .decompose import decompose, default_d_min
        from .pipelines import degp1_list_size

        ell = args.ell or degp1_list_size(g.n, args.ell_factor)
        dec = decompose(g, args.dec_eps, d_min=max(default_d_min(g.n, args.dec_eps, args.alpha), ell))
        with open(args.decomposition_out, "w") as fh:
            fh.write(dec.to_text())
    seeds = _parse_seeds(args.seeds)
    jobs = [(args.graph, args.mode, seed, args) for seed in seeds]
    failed = _run_jobs(jobs, _color_worker, sys.stdout)
    return 1 if failed else 0


def cmd_sim(args, kind: str) -> int:
    if args.mode not in SIM_MODES:
        raise ParameterError(f"unknown mode {args.mode!r}")
    load_edge_list(args.graph)
    seeds = _parse_seeds(args.seeds)
    jobs = [(args.graph, kind, args.mode, seed, args) for seed in seeds]
    failed = _run_jobs(jobs, _sim_worker, sys.stdout)
    return 1 if failed else 0


def _bench_conflict_size(writer, args) -> None:
    writer.writerow(["n", "metric_mean", "metric_max", "bound"])
    for n in (500, 1000, 2000, 4000):
        ell = math.ceil(2.0 * math.log(n))
        ratios = []
        for seed in range(args.bench_seeds):
            g = gnp(n, min(1.0, 40.0 / n), seed)
            lists = sample_lists(g, DegPlusOnePalette(), ell, seed)
            cg = build_conflict_graph(g, lists)
            ratios.append(cg.edge_count / (n * math.log(n) ** 2))
        writer.writerow([n, f"{np.mean(ratios):.4f}", f"{np.max(ratios):.4f}", 1.0])


def _bench_nibble_schedule(writer, args) -> None:
    writer.writerow(["d", "metric_mean", "metric_max", "bound"])
    for d in range(50, 5001, 150):
        s = nibble_schedule(d)
        ratio = s.i_star / math.log(d) ** 2
        writer.writerow([d, f"{ratio:.4f}", f"{ratio:.4f}", 4.5])


def _bench_query_scaling(writer, args) -> None:
    writer.writerow(["n", "metric_mean", "metric_max", "bound"])
    for n in (1024, 2048, 4096):
        ratios = []
        for seed in range(min(args.bench_seeds, 5)):
            g = gnp(n, min(1.0, 30.0 / n), seed)
            sim = query_color(g, "degp1", seed)
            ratios.append(sim.ledger.total_queries / (n**1.5 * math.log(n) ** 3))
        writer.writerow([n, f"{np.mean(ratios):.4f}", f"{np.max(ratios):.4f}", 0.2])


def _bench_partition_degree(writer, args) -> None:
    writer.writerow(["n", "metric_mean", "metric_max", "bound"])
    k, eps = 8, 0.5
    for n in (1000, 2000, 3000):
        ratios = []
        for seed in range(args.bench_seeds):
            g = gnp(n, 0.15, seed)
            result = partition_color(g, k, eps, "greedy-delta-plus-one", seed)
            bound = (1 + eps) * g.max_degree / k
            ratios.append(result.diagnostics["max_part_degree"] / bound)
        writer.writerow([n, f"{np.mean(ratios):.4f}", f"{np.max(ratios):.4f}", 1.0])


def cmd_bench(args) -> int:
    suites = {
        "conflict-size": _bench_conflict_size,
        "query-scaling": _bench_query_scaling,
        "nibble-schedule": _bench_nibble_schedule,
        "partition-degree": _bench_partition_degree,
    }
    if args.suite not in suites:
        raise ParameterError(f"unknown suite {args.suite!r}; choose from {sorted(suites)}")
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            suites[args.suite](csv.writer(out), args)
    finally:
        if args.out:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsepalette",
        description="Palette-sparsified coloring experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write an edge-list file")
    p_gen.add_argument("--gnp", action="store_true")
    p_gen.add_argument("--gnp-trifree", action="store_true")
    p_gen.add_argument("--clique-collection", action="store_true")
    p_gen.add_argument("--n", type=int)
    p_gen.add_argument("--p", default=None)
    p_gen.add_argument("--ell", type=int)
    p_gen.add_argument("--k", type=int)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_generate)

    def add_common(p):
        p.add_argument("graph")
        p.add_argument("--mode", required=True)
        p.add_argument("--seeds", default="0")
        p.add_argument("--eps", type=float, default=0.2)
        p.add_argument("--gamma", type=float, default=0.5)
        p.add_argument("--ell", type=int, default=None)
        p.add_argument("--dec-eps", type=float, default=0.1,
                       help="decomposition eps used by the local pipeline")

    p_color = sub.add_parser("color", help="run a coloring pipeline over seeds")
    add_common(p_color)
    p_color.add_argument("--ell-constant", type=float, default=20.0)
    p_color.add_argument("--ell-factor", type=float, default=3.0)
    p_color.add_argument("--b-constant", type=float, default=1.0)
    p_color.add_argument("--d-floor", type=float, default=20.0)
    p_color.add_argument("--sqrt-log", action="store_true",
                         help="experimental square-root list-size variant")
    p_color.add_argument("--alpha", type=float, default=1.0)
    p_color.add_argument("--k", type=int, default=4)
    p_color.add_argument("--subroutine", default="greedy-delta-plus-one")
    p_color.add_argument("--lists-out", default=None,
                         help="write the run's governing color lists (single-seed replays)")
    p_color.add_argument("--decomposition-out", default=None,
                         help="write the labeled partition used by the degp1 pipeline")
    p_color.set_defaults(func=cmd_color)

    p_stream = sub.add_parser("stream", help="single-pass streaming simulator")
    add_common(p_stream)
    p_stream.add_argument("--declared-delta", type=int, default=None)
    p_stream.set_defaults(func=lambda a: cmd_sim(a, "stream"))

    p_query = sub.add_parser("query", help="non-adaptive query-model simulator")
    add_common(p_query)
    p_query.set_defaults(func=lambda a: cmd_sim(a, "query"))

    p_bench = sub.add_parser("bench", help="scaling tables as CSV")
    p_bench.add_argument("--suite", required=True)
    p_bench.add_argument("--out", default=None)
    p_bench.add_argument("--bench-seeds", type=int, default=5)
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (MalformedInputError, ParameterError, PreconditionError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
