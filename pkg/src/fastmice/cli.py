"""Command-line entry point: ``fastmice run | bench | synth``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import dataset as ds_mod
from .bench import benchmark_scaling, write_table
from .consensus import write_ensemble
from .pipeline import PipelineConfig, emit_labels, emit_report, report_lines, run_pipeline
from .synth import BlobConfig, make_blobs


def _add_pipeline_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, required=True, help="number of final clusters")
    p.add_argument("--groups", type=int, default=20, help="ensemble size M (default 20)")
    p.add_argument("--anchors", type=int, default=None, help="anchors p (default min(1000, N))")
    p.add_argument("--knn", type=int, default=5, help="nearest anchors K (default 5)")
    p.add_argument("--tau-min", type=float, default=0.2)
    p.add_argument("--tau-max", type=float, default=0.8)
    p.add_argument("--vmin", type=int, default=1, help="smallest view group (default 1)")
    p.add_argument("--vmax", type=int, default=None, help="largest view group (default V)")
    p.add_argument("--kmin", type=int, default=None, help="smallest base cluster count (default k)")
    p.add_argument("--kmax", type=int, default=None, help="largest base cluster count (default 2k)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=0, help="worker threads, 0 = all cores")


def _pipeline_config(args, runs: int = 1, metric=None) -> PipelineConfig:
    return PipelineConfig(
        k=args.k, m_groups=args.groups, anchors=args.anchors, knn=args.knn,
        tau_min=args.tau_min, tau_max=args.tau_max, v_min=args.vmin, v_max=args.vmax,
        k_min=args.kmin, k_max=args.kmax, seed=args.seed, metric=metric, runs=runs,
        threads=args.threads)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fastmice", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="cluster a multi-view dataset")
    run.add_argument("--manifest", required=True, type=Path)
    _add_pipeline_args(run)
    run.add_argument("--runs", type=int, default=1, help="repetitions for mean/std")
    run.add_argument("--metric", choices=["euclidean", "cosine"], default=None,
                     help="override the manifest metric")
    run.add_argument("--standardize", action="store_true", help="z-score every view column at load")
    run.add_argument("--out", type=Path, default=None, help="labels file (last run)")
    run.add_argument("--report", type=Path, default=None, help="key = value report file")
    run.add_argument("--ensemble", type=Path, default=None, help="dump base clusterings (last run)")
    run.add_argument("--figures", type=Path, default=None, help="directory for report figures")

    bench = sub.add_parser(
        "bench", help="time the pipeline on synthetic blobs of growing size",
        description="Synthetic data: Gaussian blobs, unit noise, centers on a simplex "
                    "with pairwise distance SEPARATION; each view randomly rotated.")
    bench.add_argument("--sizes", default="20000,40000,80000,160000",
                       help="comma-separated ascending N values")
    _add_pipeline_args(bench)
    bench.add_argument("--views", type=int, default=3)
    bench.add_argument("--dim", type=int, default=None, help="per-view dimension (default max(k,10))")
    bench.add_argument("--separation", type=float, default=6.0)
    bench.add_argument("--noise-views", type=int, default=0)
    bench.add_argument("--data-seed", type=int, default=0)
    bench.add_argument("--out", type=Path, default=None, help="tab-separated scaling table")
    bench.add_argument("--figure", type=Path, default=None, help="log-log scaling figure")

    synth = sub.add_parser(
        "synth", help="write a synthetic multi-view dataset",
        description="Gaussian blobs per view: unit isotropic noise around class centers on a "
                    "simplex (pairwise distance SEPARATION), then a random rotation per view. "
                    "The last NOISE_VIEWS views hold pure noise. Classes are balanced.")
    synth.add_argument("--n", type=int, required=True)
    synth.add_argument("--views", type=int, default=3)
    synth.add_argument("--k", type=int, required=True)
    synth.add_argument("--dim", type=int, default=None)
    synth.add_argument("--separation", type=float, default=6.0)
    synth.add_argument("--noise-views", type=int, default=0)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--out", type=Path, required=True, help="output directory")
    return parser


def _blob_config(args, n: int, seed: int) -> BlobConfig:
    dims = None if args.dim is None else [args.dim] * args.views
    return BlobConfig(n=n, k=args.k, n_views=args.views, dims=dims, separation=args.separation,
                      noise_views=args.noise_views, seed=seed)


def cmd_run(args) -> int:
    data = ds_mod.load_dataset(args.manifest, standardize=args.standardize)
    cfg = _pipeline_config(args, runs=args.runs, metric=args.metric)
    report = run_pipeline(data, cfg)
    print("\n".join(report_lines(report)))
    if args.out:
        emit_labels(report.runs[-1].labels, args.out)
    if args.report:
        emit_report(report, args.report)
    if args.ensemble:
        write_ensemble(args.ensemble, report.runs[-1].ensemble)
    if args.figures:
        from .plotting import plot_report

        plot_report(report, Path(args.figures) / "report.png")
    return 0


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    table = benchmark_scaling(_blob_config(args, sizes[0], args.data_seed), sizes,
                              _pipeline_config(args))
    for r in table.rows:
        print(f"n = {r.n}\tseconds = {r.seconds:.3f}\tmemory_proxy = {r.memory_proxy}")
    if len(sizes) > 1:
        print(f"time_slope = {table.time_slope:.4f}")
        print(f"memory_slope = {table.memory_slope:.4f}")
    if args.out:
        write_table(table, args.out)
    if args.figure:
        from .plotting import plot_scaling

        plot_scaling(table, args.figure)
    return 0


def cmd_synth(args) -> int:
    data = make_blobs(_blob_config(args, args.n, args.seed))
    manifest = ds_mod.write_dataset(data, args.out)
    print(manifest)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"run": cmd_run, "bench": cmd_bench, "synth": cmd_synth}
    try:
        return handlers[args.command](args)
    except (ds_mod.DatasetError, ValueError, RuntimeError) as exc:
        print(f"fastmice: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
