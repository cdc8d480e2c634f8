"""Command-line harness: solve, bench, analyze, serve.

Exit codes: 0 success, 2 input error, 3 partial failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analytics import diversity_report
from .bench import SCHEMA_VERSION, BenchConfig, emit_report, run_benchmark
from .decompose import TabuInnerSampler, solve_large
from .exceptions import QreadyError
from .io import normalize_format, parse_instance
from .plots import plot_dendrogram, plot_diversity_panel
from .tabu import (
    DEFAULT_MAX_SAMPLES,
    DEFAULT_REPEATS,
    DEFAULT_TIME_LIMIT,
    SampleSet,
    SamplerParams,
    sample,
)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_PARTIAL_FAILURE = 3


def _add_sampler_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT, metavar="S")
    p.add_argument("--max-samples", type=int, default=DEFAULT_MAX_SAMPLES, metavar="M")
    p.add_argument("--seed", type=int, default=0, metavar="N")
    p.add_argument("--num-starts", default="auto",
                   help="number of concurrent tabu starts, or 'auto' (one per core)")
    p.add_argument("--quality-bias", choices=["quality", "speed"], default="quality")
    p.add_argument("--decompose", action="store_true",
                   help="solve through the subQUBO decomposition loop")
    p.add_argument("--subsize", type=int, default=64, metavar="K")


def _parse_num_starts(value: str):
    return value if value == "auto" else int(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qready",
                                     description="Quantum-ready QUBO sampling toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="sample one instance file")
    solve.add_argument("file", type=Path)
    solve.add_argument("--format", choices=["qubo", "maxcut"], default="qubo")
    solve.add_argument("--repeats", type=int, default=1, metavar="K")
    _add_sampler_args(solve)
    solve.add_argument("--out", type=Path, default=Path("qready-out"), metavar="DIR")

    bench = sub.add_parser("bench", help="run the benchmark protocol over many instances")
    bench.add_argument("--catalog", type=Path, default=None,
                       help="catalog CSV (defaults to the shipped 45-instance catalog)")
    bench.add_argument("--instances-dir", type=Path, default=None)
    bench.add_argument("--instances", nargs="+", required=True,
                       help="instance files or catalog names")
    bench.add_argument("--format", choices=["qubo", "maxcut"], default="qubo")
    bench.add_argument("--repeats", type=int, default=DEFAULT_REPEATS, metavar="K")
    _add_sampler_args(bench)
    bench.add_argument("--sort-key",
                       choices=["relative_delta_energy", "problem_size", "problem_density"],
                       default="relative_delta_energy")
    bench.add_argument("--tolerance", type=float, default=1e-6)
    bench.add_argument("--linkage", choices=["single", "average", "complete"], default="average")
    bench.add_argument("--out", type=Path, default=Path("bench-out"), metavar="DIR")

    analyze = sub.add_parser("analyze", help="diversity analytics for a samples.json file")
    analyze.add_argument("samples", type=Path)
    analyze.add_argument("--tolerance", type=float, default=1e-6)
    analyze.add_argument("--linkage", choices=["single", "average", "complete"], default="average")
    analyze.add_argument("--out", type=Path, default=None, metavar="DIR",
                         help="output directory (defaults to the samples file's directory)")

    serve = sub.add_parser("serve", help="run the REST job service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8321)
    serve.add_argument("--data-dir", type=Path, default=Path("qready-jobs"))
    serve.add_argument("--workers", type=int, default=1)
    serve.add_argument("--size-cap-bytes", type=int, default=50_000_000)
    serve.add_argument("--size-cap-variables", type=int, default=50_000)
    serve.add_argument("--default-time-limit", type=float, default=60.0)
    serve.add_argument("--instances-dir", type=Path, default=None)

    return parser


def _cmd_solve(args) -> int:
    try:
        text = args.file.read_text()
        q = parse_instance(text, normalize_format(args.format))
    except (OSError, QreadyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    args.out.mkdir(parents=True, exist_ok=True)
    best_overall: SampleSet | None = None
    for repeat in range(args.repeats):
        params = SamplerParams(
            time_limit=args.time_limit,
            max_samples=args.max_samples,
            seed=args.seed ^ repeat,
            num_starts=_parse_num_starts(args.num_starts),
            quality_bias=args.quality_bias,
        )
        if args.decompose:
            sset = solve_large(q, params, TabuInnerSampler(), subsize=args.subsize)
        else:
            sset = sample(q, params)
        payload = {"schema_version": SCHEMA_VERSION, "instance": args.file.stem, **sset.to_dict()}
        out_path = args.out / f"{args.file.stem}-samples-r{repeat}.json"
        out_path.write_text(json.dumps(payload, indent=2) + "\n")
        if best_overall is None or sset.best.energy < best_overall.best.energy:
            best_overall = sset
        print(f"repeat {repeat}: best energy {sset.best.energy} "
              f"({len(sset)} samples, first found at {sset.first_found_time:.3f}s, "
              f"ended at {sset.end_time:.3f}s)")

    assert best_overall is not None
    print(f"best energy: {best_overall.best.energy}")
    if q.sense_of_origin == "maximize":
        print(f"best objective (native maximization sense): {-best_overall.best.energy}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    try:
        cfg = BenchConfig(
            instances=args.instances,
            instance_format=args.format,
            time_limit=args.time_limit,
            repeats=args.repeats,
            max_samples=args.max_samples,
            seed=args.seed,
            num_starts=_parse_num_starts(args.num_starts),
            quality_bias=args.quality_bias,
            sort_key=args.sort_key,
            output_dir=args.out,
            catalog_path=args.catalog,
            instances_dir=args.instances_dir,
            decompose=args.decompose,
            subsize=args.subsize,
            elite_tolerance=args.tolerance,
            linkage=args.linkage,
        )
    except QreadyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    report = run_benchmark(cfg)
    emit_report(report)
    for result in report.results:
        if result.error is not None:
            print(f"{result.name}: FAILED ({result.error})")
        else:
            print(f"{result.name}: best {result.selected.best_energy} "
                  f"[{result.classification}], elites {result.elite_count}")
    print(f"report written to {cfg.output_dir}")
    return EXIT_PARTIAL_FAILURE if report.has_failures else EXIT_OK


def _cmd_analyze(args) -> int:
    try:
        payload = json.loads(args.samples.read_text())
        sset = SampleSet.from_dict(payload)
        if not sset.samples:
            raise QreadyError("samples file contains no samples")
    except (OSError, KeyError, ValueError, QreadyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    try:
        report = diversity_report(sset, tolerance=args.tolerance, linkage=args.linkage)
    except QreadyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    out = args.out or args.samples.parent
    out.mkdir(parents=True, exist_ok=True)
    stem = args.samples.stem
    (out / f"{stem}-distances.csv").write_text(report.distances.to_csv())
    (out / f"{stem}-pair-histogram.csv").write_text(report.histogram.to_csv())
    (out / f"{stem}-dendrogram.json").write_text(
        json.dumps(report.dendrogram.to_dict(), indent=2) + "\n")
    plot_dendrogram(report.dendrogram, out / f"{stem}-dendrogram.svg")
    plot_diversity_panel(report.distances, report.histogram, report.dendrogram,
                         out / f"{stem}-diversity.svg")
    stats = report.histogram.descriptive_stats()
    print(f"elite count: {len(report.elite)} (tolerance {report.elite.tolerance})")
    print(f"pair distances: mean {stats['mean']:.2f}, variance {stats['variance']:.2f}, "
          f"skewness {stats['skewness']:.3f}")
    print(f"artifacts written to {out}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .service import ServiceConfig, run_service

    cfg = ServiceConfig(
        data_dir=args.data_dir,
        workers=args.workers,
        size_cap_bytes=args.size_cap_bytes,
        size_cap_variables=args.size_cap_variables,
        default_time_limit=args.default_time_limit,
        instances_dir=args.instances_dir,
    )
    run_service(args.host, args.port, cfg)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "solve": _cmd_solve,
        "bench": _cmd_bench,
        "analyze": _cmd_analyze,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except QreadyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
