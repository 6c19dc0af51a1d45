"""Command-line front end.

Subcommands:
    fit                cluster a dataset directory, write labels + reports
    evaluate           score a predictions file against a labels file
    reconstruct-graph  expand an anchor graph to a full sample graph
    benchmark          time the pipeline over growing synthetic datasets
    sweep              grid-search (m, beta, gamma) over one dataset

Configuration comes from built-in defaults, then an optional named
preset, then an optional JSON config file, then explicit flags, in that
order. Exit codes: 0 success, 2 configuration error, 3 data error,
4 numerical breakdown. ANCHORCLUST_WORKERS sets the sweep worker pool.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import anchors as anchors_mod
from . import dataset as dataset_mod
from . import graph_tools, metrics, solver
from .errors import (
    AllZeroGraph,
    AnchorClustError,
    InvalidParameter,
    IoError,
    LengthMismatch,
    MalformedConfig,
    MalformedMeta,
    MissingFile,
    NonFiniteValue,
    NumericalBreakdown,
    ShapeMismatch,
)
from .single_view import fit_single

PRESETS = {
    "coil": {"m": 35, "beta": 0.3, "gamma": 0.01},
    "wiki": {"m": 30, "beta": 0.1, "gamma": 0.1},
    "usps": {"m": 40, "beta": 0.3, "gamma": 0.1},
    "reuters": {"m": 15, "beta": 0.8, "gamma": 0.0001},
    "noisymnist": {"m": 100, "beta": 0.2, "gamma": 1.0},
    "xmedia": {"m": 40, "beta": 0.1, "gamma": 1.0},
    "cifar10": {"m": 35, "beta": 1.0, "gamma": 0.001},
    "cifar100": {"m": 150, "beta": 0.4, "gamma": 0.1},
    "mnist": {"m": 30, "beta": 0.2, "gamma": 0.1},
}

DEFAULT_K = 5

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

_CONFIG_ERRORS = (MalformedConfig, InvalidParameter)
_DATA_ERRORS = (
    MissingFile,
    ShapeMismatch,
    NonFiniteValue,
    MalformedMeta,
    IoError,
    LengthMismatch,
    AllZeroGraph,
)


@dataclass
class RunConfig:
    """Resolved knobs for one fit run."""

    dataset: str
    output_dir: str
    c: int | None = None
    m: int | None = None
    k: int = DEFAULT_K
    seed: int = 0
    beta: float = solver.DEFAULT_BETA
    gamma: float = solver.DEFAULT_GAMMA
    rel_tol: float = 1e-6
    max_iters: int = 200
    qp_max_iters: int = 1000
    qp_tol: float = 1e-10
    single_view: bool = False
    normalize: bool = False
    cache_graphs: bool = False
    save_graph: bool = False
    preset: str | None = None


_CONFIG_FIELDS = {f.name: f.type for f in dataclasses.fields(RunConfig)}
_FIELD_KINDS = {
    "dataset": str, "output_dir": str, "preset": str,
    "c": int, "m": int, "k": int, "seed": int,
    "max_iters": int, "qp_max_iters": int,
    "beta": float, "gamma": float, "rel_tol": float, "qp_tol": float,
    "single_view": bool, "normalize": bool, "cache_graphs": bool,
    "save_graph": bool,
}


def _apply_mapping(cfg: RunConfig, mapping: dict, source: str) -> None:
    for key, value in mapping.items():
        if key not in _CONFIG_FIELDS:
            raise MalformedConfig(f"{source}: unknown key {key!r}")
        kind = _FIELD_KINDS[key]
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        bad_bool = isinstance(value, bool) and kind is not bool
        if bad_bool or not isinstance(value, kind):
            raise MalformedConfig(
                f"{source}: key {key!r} should be {kind.__name__}, "
                f"got {type(value).__name__}"
            )
        setattr(cfg, key, value)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """defaults < preset < config file < explicit flags."""
    cfg = RunConfig(dataset=args.dataset, output_dir=args.output)

    preset = getattr(args, "preset", None)
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            file_map = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise MalformedConfig(f"{config_path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise MalformedConfig(f"{config_path}: {exc}") from None
        if not isinstance(file_map, dict):
            raise MalformedConfig(f"{config_path}: top level must be an object")
        # consumed here; an explicit --preset flag wins over the file's
        preset = preset or file_map.pop("preset", None)

    if preset:
        if preset not in PRESETS:
            raise MalformedConfig(
                f"unknown preset {preset!r}; choose from {sorted(PRESETS)}"
            )
        cfg.preset = preset
        _apply_mapping(cfg, PRESETS[preset], f"preset {preset!r}")
    if config_path:
        _apply_mapping(cfg, file_map, str(config_path))
        cfg.dataset = args.dataset or cfg.dataset
        cfg.output_dir = args.output or cfg.output_dir

    for name in (
        "c", "m", "k", "seed", "beta", "gamma", "rel_tol", "max_iters",
        "qp_max_iters", "qp_tol",
    ):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    for flag in ("single_view", "normalize", "cache_graphs", "save_graph"):
        if getattr(args, flag, False):
            setattr(cfg, flag, True)

    if not cfg.dataset:
        raise MalformedConfig("no dataset path given")
    if not cfg.output_dir:
        raise MalformedConfig("no output directory given")
    return cfg


def _resolve_solver_params(cfg: RunConfig, ds) -> tuple[int, int, int]:
    """Fill c from labels when absent, default m to c+20, clamp k to m-1."""
    c = cfg.c
    if c is None:
        if ds.labels is None:
            raise MalformedConfig(
                "cluster count not set and the dataset has no labels; pass --c"
            )
        c = ds.num_classes
    m = cfg.m if cfg.m is not None else min(c + 20, ds.n)
    if m < 2 or m > ds.n:
        raise InvalidParameter(f"need 2 <= m <= n, got m={m}, n={ds.n}")
    k = min(cfg.k, m - 1)
    if k < 1:
        raise InvalidParameter(f"k must be >= 1, got {cfg.k}")
    return c, m, k


def _load_or_build_graphs(cfg: RunConfig, ds, m: int, k: int):
    cache_dir = Path(cfg.output_dir) / "graphs"
    if cfg.cache_graphs and (cache_dir / anchors_mod.GRAPH_META_FILE).is_file():
        gs, sidecar = anchors_mod.load_graph_set(cache_dir)
        if (
            sidecar.get("m") == m
            and sidecar.get("k") == k
            and sidecar.get("seed") == cfg.seed
            and gs.n == ds.n
            and gs.num_views == ds.num_views
        ):
            return gs, 0.0, True
    t0 = time.perf_counter()
    anchor_set = anchors_mod.select_anchors(ds, m, seed=cfg.seed)
    gs = anchors_mod.build_all(ds, anchor_set, k)
    build_seconds = time.perf_counter() - t0
    if cfg.cache_graphs:
        anchors_mod.save_graph_set(gs, cache_dir, seed=cfg.seed)
    return gs, build_seconds, False


def run_fit(cfg: RunConfig) -> dict:
    """Full pipeline for one configuration; returns the results record."""
    ds = dataset_mod.load_dataset(cfg.dataset)
    if cfg.normalize:
        ds = dataset_mod.zscore(ds)
    if cfg.single_view and ds.num_views != 1:
        raise MalformedConfig(
            f"--single-view needs a 1-view dataset, got {ds.num_views} views"
        )
    c, m, k = _resolve_solver_params(cfg, ds)
    graphs, build_seconds, cached = _load_or_build_graphs(cfg, ds, m, k)

    sconfig = solver.SolverConfig(
        c=c,
        beta=cfg.beta,
        gamma=cfg.gamma,
        max_iters=cfg.max_iters,
        rel_tol=cfg.rel_tol,
        seed=cfg.seed,
        qp_max_iters=cfg.qp_max_iters,
        qp_tol=cfg.qp_tol,
    )
    if cfg.single_view:
        result = fit_single(graphs.graphs[0], sconfig)
    else:
        result = solver.fit(graphs, sconfig)

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "labels.txt", "w", encoding="utf-8") as fh:
        fh.writelines(f"{int(y)}\n" for y in result.labels)
    with open(out / "convergence.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "objective"])
        for i, obj in enumerate(result.state.objective_history):
            writer.writerow([i, repr(obj)])
    if cfg.save_graph:
        dataset_mod.write_matrix_csv(result.state.Z, out / "consensus_graph.csv")

    scores = None
    if ds.labels is not None:
        scores = metrics.evaluate_all(result.labels, ds.labels)

    record = {
        "labels_file": "labels.txt",
        "alpha": [float(a) for a in result.state.alpha],
        "final_objective": result.state.objective_history[-1],
        "iterations": result.state.iters_run,
        "converged": result.converged,
        "elapsed_seconds": result.elapsed,
        "build_seconds": build_seconds,
        "graphs_cached": cached,
        "n": ds.n,
        "num_views": ds.num_views,
        "c": c,
        "m": m,
        "k": k,
        "beta": cfg.beta,
        "gamma": cfg.gamma,
        "seed": cfg.seed,
        "metrics": scores,
    }
    (out / "results.json").write_text(
        json.dumps(record, indent=2) + "\n", encoding="utf-8"
    )
    return record


def read_results(output_dir) -> dict:
    path = Path(output_dir) / "results.json"
    if not path.is_file():
        raise MissingFile(f"{path}: no such file")
    return json.loads(path.read_text(encoding="utf-8"))


def read_convergence(output_dir) -> list[tuple[int, float]]:
    path = Path(output_dir) / "convergence.csv"
    if not path.is_file():
        raise MissingFile(f"{path}: no such file")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return [(int(r["iteration"]), float(r["objective"])) for r in reader]


def _read_report(path, fields) -> list[dict]:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"{path}: no such file")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for raw in reader:
            rows.append({key: cast(raw[key]) for key, cast in fields.items()})
        return rows


def read_benchmark_report(path) -> list[dict]:
    return _read_report(
        path,
        {
            "n": int,
            "build_seconds": float,
            "solve_seconds": float,
            "total_seconds": float,
        },
    )


def read_sweep_report(path) -> list[dict]:
    def opt_float(s):
        return float(s) if s else None

    return _read_report(
        path,
        {
            "m": int,
            "beta": float,
            "gamma": float,
            "status": str,
            "acc": opt_float,
            "nmi": opt_float,
            "purity": opt_float,
            "ari": opt_float,
            "f_score": opt_float,
            "precision": opt_float,
            "final_objective": opt_float,
            "iterations": lambda s: int(s) if s else None,
            "converged": lambda s: s == "True" if s else None,
            "error": str,
        },
    )


def cmd_fit(args) -> int:
    cfg = resolve_config(args)
    record = run_fit(cfg)
    print(json.dumps(record, indent=2))
    return 0


def cmd_evaluate(args) -> int:
    truth = dataset_mod.load_labels_file(args.truth)
    pred = dataset_mod.load_labels_file(args.predictions)
    scores = metrics.evaluate_all(pred, truth)
    print(json.dumps(scores, indent=2))
    return 0


def cmd_reconstruct_graph(args) -> int:
    S = dataset_mod.read_matrix_csv(args.graph)
    if S.min() < 0:
        # learned consensus graphs can dip slightly negative after the
        # low-rank step; the reconstruction needs non-negative mass
        print(
            f"clamping {int((S < 0).sum())} negative entries "
            f"(min {S.min():.2e}) to zero",
            file=sys.stderr,
        )
        S = np.maximum(S, 0.0)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.top_k is not None:
        B = graph_tools.reconstruct_top_k(S, args.top_k)
        coo = B.tocoo()
        with open(out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row", "col", "value"])
            for i, j, v in zip(coo.row, coo.col, coo.data):
                writer.writerow([int(i), int(j), repr(float(v))])
    else:
        full = graph_tools.reconstruct_full_graph(S)
        if args.format == "f64le":
            full.B.astype("<f8").tofile(out)
        else:
            dataset_mod.write_matrix_csv(full.B, out)
    print(f"wrote {out}")
    return 0


def cmd_benchmark(args) -> int:
    sizes = args.sizes
    dims = args.dims
    rows = []
    for n in sizes:
        ds = dataset_mod.synth_blobs(
            n=n,
            c=args.c,
            V=len(dims),
            dims=dims,
            separation=args.separation,
            noise=args.noise,
            seed=args.seed,
        )
        t0 = time.perf_counter()
        anchor_set = anchors_mod.select_anchors(
            ds, args.m, seed=args.seed, max_iters=args.kmeans_max_iters
        )
        gs = anchors_mod.build_all(ds, anchor_set, min(args.k, args.m - 1))
        build = time.perf_counter() - t0
        sconfig = solver.SolverConfig(
            c=args.c,
            beta=args.beta,
            gamma=args.gamma,
            max_iters=args.max_iters,
            rel_tol=args.rel_tol,
            seed=args.seed,
        )
        result = solver.fit(gs, sconfig)
        rows.append(
            {
                "n": n,
                "build_seconds": build,
                "solve_seconds": result.elapsed,
                "total_seconds": build + result.elapsed,
            }
        )
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["n", "build_seconds", "solve_seconds", "total_seconds"]
        )
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    print(json.dumps(rows, indent=2))
    return 0


def _sweep_cell(job) -> dict:
    """One grid cell; failures are recorded, never raised."""
    cfg_map, m, beta, gamma = job
    cfg = RunConfig(**cfg_map)
    cfg.m, cfg.beta, cfg.gamma = m, beta, gamma
    cfg.output_dir = str(Path(cfg.output_dir) / f"cell_m{m}_b{beta}_g{gamma}")
    row = {"m": m, "beta": beta, "gamma": gamma, "status": "ok", "error": ""}
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            record = run_fit(cfg)
    except AnchorClustError as exc:
        row.update(status="failed", error=f"{type(exc).__name__}: {exc}")
        return row
    row.update(
        final_objective=record["final_objective"],
        iterations=record["iterations"],
        converged=record["converged"],
    )
    if record["metrics"]:
        row.update(record["metrics"])
    return row


def cmd_sweep(args) -> int:
    cfg = resolve_config(args)
    cells_dir = Path(cfg.output_dir) / "cells"
    base = dataclasses.asdict(cfg)
    base["output_dir"] = str(cells_dir)
    jobs = [
        (base, m, beta, gamma)
        for m in args.m_grid
        for beta in args.beta_grid
        for gamma in args.gamma_grid
    ]
    workers = int(os.environ.get("ANCHORCLUST_WORKERS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_cell, jobs))
    else:
        rows = [_sweep_cell(job) for job in jobs]

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    fields = [
        "m", "beta", "gamma", "status", "acc", "nmi", "purity", "ari",
        "f_score", "precision", "final_objective", "iterations", "converged",
        "error",
    ]
    with open(out / "sweep.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, restval="")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    print(f"wrote {out / 'sweep.csv'} ({len(rows)} cells)")
    return 0


def _add_fit_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--preset", help=f"named preset: {', '.join(sorted(PRESETS))}")
    p.add_argument("--c", type=int, help="cluster count (default: from labels)")
    p.add_argument("--m", type=int, help="anchor count (default: c+20)")
    p.add_argument("--k", type=int, help=f"neighbor count (default {DEFAULT_K}, clamped to m-1)")
    p.add_argument("--seed", type=int, help="RNG seed for anchors and solver")
    p.add_argument("--beta", type=float, help="low-rank weight")
    p.add_argument("--gamma", type=float, help="factorization weight")
    p.add_argument("--rel-tol", dest="rel_tol", type=float, help="stopping tolerance")
    p.add_argument("--max-iters", dest="max_iters", type=int, help="cycle cap")
    p.add_argument("--qp-tol", dest="qp_tol", type=float)
    p.add_argument("--qp-max-iters", dest="qp_max_iters", type=int)
    p.add_argument("--normalize", action="store_true", help="z-score features per view")
    p.add_argument("--cache-graphs", dest="cache_graphs", action="store_true")
    p.add_argument("--save-graph", dest="save_graph", action="store_true",
                   help="also write the learned consensus graph")


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anchorclust",
        description="Multi-view clustering on low-rank consensus anchor graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="cluster a dataset directory")
    p.add_argument("dataset", help="dataset directory (meta.json layout)")
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--single-view", dest="single_view", action="store_true",
                   help="use the single-graph solver (requires a 1-view dataset)")
    _add_fit_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("evaluate", help="score predictions against ground truth")
    p.add_argument("truth", help="labels file, one integer per line")
    p.add_argument("predictions", help="predicted labels file")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("reconstruct-graph", help="full sample graph from an anchor graph")
    p.add_argument("graph", help="anchor graph CSV (n x m)")
    p.add_argument("output", help="output CSV path")
    p.add_argument("--top-k", dest="top_k", type=int,
                   help="keep only the top-k entries per row (COO output)")
    p.add_argument("--format", choices=["csv", "f64le"], default="csv",
                   help="dense output encoding (n x n, row-major for f64le)")
    p.set_defaults(func=cmd_reconstruct_graph)

    p = sub.add_parser("benchmark", help="pipeline timing over synthetic sizes")
    p.add_argument("--sizes", type=_int_list, required=True, help="e.g. 1000,2000,4000")
    p.add_argument("--output", required=True, help="report CSV path")
    p.add_argument("--c", type=int, default=5)
    p.add_argument("--m", type=int, default=30)
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--dims", type=_int_list, default=[10, 10])
    p.add_argument("--beta", type=float, default=solver.DEFAULT_BETA)
    p.add_argument("--gamma", type=float, default=solver.DEFAULT_GAMMA)
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--noise", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", dest="max_iters", type=int, default=200)
    p.add_argument("--rel-tol", dest="rel_tol", type=float, default=1e-6)
    p.add_argument("--kmeans-max-iters", dest="kmeans_max_iters", type=int,
                   default=100, help="cap anchor k-means work per size")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("sweep", help="grid-search m, beta, gamma")
    p.add_argument("dataset")
    p.add_argument("--output", required=True)
    p.add_argument("--m-grid", dest="m_grid", type=_int_list, required=True)
    p.add_argument("--beta-grid", dest="beta_grid", type=_float_list, required=True)
    p.add_argument("--gamma-grid", dest="gamma_grid", type=_float_list, required=True)
    p.add_argument("--single-view", dest="single_view", action="store_true")
    _add_fit_flags(p)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"config error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalBreakdown as exc:
        print(f"numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except _DATA_ERRORS as exc:
        print(f"data error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
