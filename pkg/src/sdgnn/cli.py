"""Command-line surface: embed, run, bench, check, info."""

from __future__ import annotations

import argparse
import json
import sys
import time
from collections import Counter

import numpy as np

from . import selfcheck
from .classifier import TrainConfig
from .errors import SdgnnError
from .experiment import PAPER_RATIOS, ExperimentConfig, run_experiment
from .graph import load_edge_list, precompute_partitions
from .io import load_dataset, load_features, write_embeddings_csv, write_json
from .partition import DbscanParams
from .pipeline import VARIANTS, build_pipeline, run_plan


def _add_dataset_flags(p, labels=True):
    p.add_argument("--edges", required=True, help="edge-list file (u v per line)")
    p.add_argument("--features", required=True, help="feature matrix (.csv or .npy)")
    if labels:
        p.add_argument("--labels", required=True, help="label file (.txt or .npy)")


def _add_pipeline_flags(p):
    p.add_argument("--variant", default="dgs0", choices=VARIANTS)
    p.add_argument("--fusion", default="max", choices=("max", "mean"))
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--ablation", default="none",
                   choices=("none", "only1", "only2", "nojk"))
    p.add_argument("--k", type=int, default=2,
                   help="propagation hop count for the sgcn variant")
    p.add_argument("--eps", type=float, default=None,
                   help="dbscan radius override (default: per-node median)")
    p.add_argument("--min-pts", type=int, default=2, help="dbscan core threshold")


def _dbscan_params(args):
    if args.eps is None:
        return None
    return DbscanParams(eps=args.eps, min_pts=args.min_pts)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sdgnn",
        description="Parameter-free structural-diversity graph embeddings",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_embed = sub.add_parser("embed", help="run the pipeline, dump embeddings CSV")
    _add_dataset_flags(p_embed, labels=False)
    _add_pipeline_flags(p_embed)
    p_embed.add_argument("--out", required=True)

    p_run = sub.add_parser("run", help="full experiment, JSON report")
    _add_dataset_flags(p_run)
    _add_pipeline_flags(p_run)
    p_run.add_argument("--ratios", default=",".join(str(r) for r in PAPER_RATIOS),
                       help="comma-separated training ratios")
    p_run.add_argument("--runs", type=int, default=5)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--dataset-name", default=None)
    p_run.add_argument("--train-dtype", default="float32",
                       choices=("float32", "float64"))
    p_run.add_argument("--out", required=True)

    p_bench = sub.add_parser("bench", help="aggregation timing per variant")
    _add_dataset_flags(p_bench, labels=False)
    p_bench.add_argument("--variants", default=",".join(VARIANTS))
    p_bench.add_argument("--depth", type=int, default=2)
    p_bench.add_argument("--fusion", default="max", choices=("max", "mean"))
    p_bench.add_argument("--k", type=int, default=2)
    p_bench.add_argument("--out", default=None)

    p_check = sub.add_parser("check", help="invariance and oracle suites")
    p_check.add_argument("--out", default=None)

    p_info = sub.add_parser("info", help="dataset statistics")
    p_info.add_argument("--edges", required=True)
    p_info.add_argument("--features", default=None)
    p_info.add_argument("--labels", default=None)
    return parser


def cmd_embed(args):
    graph = load_edge_list(args.edges)
    feats = load_features(args.features)
    plan = build_pipeline(args.variant, depth=args.depth, ablation=args.ablation,
                          fusion=args.fusion, hops=args.k,
                          dbscan_params=_dbscan_params(args))
    emb = run_plan(graph, feats, plan)
    write_embeddings_csv(args.out, emb)
    print(f"wrote {emb.shape[0]}x{emb.shape[1]} embeddings to {args.out}")
    return 0


def cmd_run(args):
    bundle = load_dataset(args.edges, args.features, args.labels)
    ratios = tuple(float(r) for r in args.ratios.split(",") if r)
    cfg = ExperimentConfig(
        variant=args.variant,
        ratios=ratios,
        runs=args.runs,
        fusion=args.fusion,
        ablation=args.ablation,
        depth=args.depth,
        propagation_hops=args.k,
        base_seed=args.seed,
        eps=args.eps,
        min_pts=args.min_pts,
        dataset=args.dataset_name or args.edges,
        train=TrainConfig(dtype=args.train_dtype),
    )
    report = run_experiment(bundle.graph, bundle.features, bundle.labels, cfg)
    write_json(args.out, report.to_dict())
    for ratio, mean in report.summary.items():
        print(f"ratio {ratio}: mean accuracy {mean:.4f}")
    print(f"report written to {args.out}")
    return 0


def cmd_bench(args):
    graph = load_edge_list(args.edges)
    feats = load_features(args.features)
    rows = []
    for variant in args.variants.split(","):
        variant = variant.strip()
        if not variant:
            continue
        plan = build_pipeline(variant, depth=args.depth, fusion=args.fusion,
                              hops=args.k)
        t0 = time.perf_counter()
        emb = run_plan(graph, feats, plan)
        seconds = time.perf_counter() - t0
        rows.append({"variant": variant, "agg_seconds": seconds,
                     "embedding_dim": int(emb.shape[1])})
        print(f"{variant:12s} {seconds:10.4f} s  (dim {emb.shape[1]})")
    if args.out:
        write_json(args.out, {"edges": args.edges, "bench": rows})
    return 0


def cmd_check(args):
    results = []

    def record(line):
        print(line)
        results.append(line)

    ok = selfcheck.run_all(verbose_print=record)
    if args.out:
        write_json(args.out, {"passed": ok, "lines": results})
    return 0 if ok else 1


def cmd_info(args):
    graph = load_edge_list(args.edges)
    print(f"nodes:   {graph.num_nodes}")
    print(f"edges:   {graph.num_edges}")
    degs = graph.degrees()
    if graph.num_nodes:
        print(f"degree:  min {degs.min()} / mean {degs.mean():.2f} / max {degs.max()}")
    cache = precompute_partitions(graph)
    hist = Counter(p.size for p in cache)
    print("structural diversity histogram (value: count):")
    for value in sorted(hist):
        print(f"  {value}: {hist[value]}")
    if args.features:
        feats = load_features(args.features)
        print(f"features: {feats.shape[0]} rows x {feats.shape[1]} dims")
    if args.labels:
        from .io import load_labels

        labels, num_classes = load_labels(args.labels)
        print(f"labels:  {len(labels)} rows, {num_classes} classes")
    return 0


COMMANDS = {
    "embed": cmd_embed,
    "run": cmd_run,
    "bench": cmd_bench,
    "check": cmd_check,
    "info": cmd_info,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return COMMANDS[args.command](args)
    except SdgnnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
