"""Benchmark harness: repeated runs per instance, best-of-run selection,
timing capture, and report/plot emission.

Protocol: each instance is sampled ``repeats`` times with per-repeat seed
``seed XOR repeat_index``; the repeat with the lowest best energy is the
one reported and compared against the catalog's best-known value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .analytics import DiversityReport, diversity_report, relative_delta_energy
from .decompose import DEFAULT_SUBSIZE, TabuInnerSampler, solve_large
from .exceptions import QreadyError, UndefinedRatioError
from .io import CatalogEntry, catalog_lookup, load_catalog, normalize_format, parse_instance
from .model import QuboInstance, density
from .plots import plot_dendrogram, plot_diversity_panel, plot_relative_delta_energy, plot_time_markers
from .tabu import (
    DEFAULT_MAX_SAMPLES,
    DEFAULT_REPEATS,
    DEFAULT_TIME_LIMIT,
    SampleSet,
    SamplerParams,
    sample,
)

SCHEMA_VERSION = 1

SORT_KEYS = ("relative_delta_energy", "problem_size", "problem_density")


@dataclass
class BenchConfig:
    """One benchmark campaign over files and/or catalog names."""

    instances: list[str]
    instance_format: str = "qubo"
    time_limit: float = DEFAULT_TIME_LIMIT
    repeats: int = DEFAULT_REPEATS
    max_samples: int = DEFAULT_MAX_SAMPLES
    seed: int = 0
    num_starts: int | str = "auto"
    quality_bias: str = "quality"
    sort_key: str = "relative_delta_energy"
    output_dir: Path = Path("bench-out")
    catalog_path: Path | None = None
    instances_dir: Path | None = None
    decompose: bool = False
    subsize: int = DEFAULT_SUBSIZE
    elite_tolerance: float = 1e-6
    linkage: str = "average"

    def __post_init__(self):
        if self.repeats < 1:
            raise QreadyError(f"repeats must be >= 1, got {self.repeats}")
        if self.sort_key not in SORT_KEYS:
            raise QreadyError(f"sort_key must be one of {SORT_KEYS}, got {self.sort_key!r}")
        self.output_dir = Path(self.output_dir)


@dataclass
class RepeatResult:
    seed: int
    best_energy: float
    first_found_time: float
    end_time: float
    sample_set: SampleSet


@dataclass
class InstanceResult:
    name: str
    num_variables: int = 0
    num_nonzeros: int = 0
    density: float = 0.0
    sense: str = "minimize"
    repeats: list[RepeatResult] = field(default_factory=list)
    selected_repeat: int = -1
    best_known_energy: float | None = None
    relative_delta: float | None = None
    absolute_delta: float | None = None
    classification: str = "unknown"
    elite_count: int = 0
    diversity: DiversityReport | None = None
    error: str | None = None

    @property
    def selected(self) -> RepeatResult:
        return self.repeats[self.selected_repeat]

    def row(self) -> dict:
        ok = self.error is None and self.selected_repeat >= 0
        return {
            "name": self.name,
            "num_variables": self.num_variables,
            "num_nonzeros": self.num_nonzeros,
            "density": self.density,
            "sense": self.sense,
            "selected_repeat": self.selected_repeat if ok else None,
            "best_energy": self.selected.best_energy if ok else None,
            "first_found_time": self.selected.first_found_time if ok else None,
            "end_time": self.selected.end_time if ok else None,
            "best_known_energy": self.best_known_energy,
            "relative_delta_energy": self.relative_delta,
            "absolute_delta_energy": self.absolute_delta,
            "classification": self.classification,
            "elite_count": self.elite_count,
            "error": self.error,
        }


@dataclass
class BenchReport:
    config: BenchConfig
    results: list[InstanceResult]

    @property
    def has_failures(self) -> bool:
        return any(r.error is not None for r in self.results)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": {
                "time_limit": self.config.time_limit,
                "repeats": self.config.repeats,
                "max_samples": self.config.max_samples,
                "seed": self.config.seed,
                "sort_key": self.config.sort_key,
                "decompose": self.config.decompose,
                "elite_tolerance": self.config.elite_tolerance,
                "linkage": self.config.linkage,
            },
            "instances": [
                {
                    **r.row(),
                    "repeats": [
                        {
                            "seed": rep.seed,
                            "best_energy": rep.best_energy,
                            "first_found_time": rep.first_found_time,
                            "end_time": rep.end_time,
                        }
                        for rep in r.repeats
                    ],
                    "diversity": r.diversity.to_dict() if r.diversity else None,
                }
                for r in self.results
            ],
        }


def _resolve_instance(cfg: BenchConfig, spec: str, catalog: list[CatalogEntry]):
    """Map an instance argument to (name, QuboInstance, CatalogEntry | None)."""
    path = Path(spec)
    if path.exists():
        name = path.stem
        q = parse_instance(path.read_text(), normalize_format(cfg.instance_format))
        return name, q, catalog_lookup(catalog, name)
    entry = catalog_lookup(catalog, spec)
    if entry is None:
        raise QreadyError(f"instance {spec!r} is neither a file nor a catalog name")
    if cfg.instances_dir is None:
        raise QreadyError(f"catalog instance {spec!r} requires --instances-dir")
    for candidate in (cfg.instances_dir / spec, cfg.instances_dir / f"{spec}.txt"):
        if candidate.exists():
            q = parse_instance(candidate.read_text(), normalize_format(cfg.instance_format))
            return spec, q, entry
    raise QreadyError(f"no instance file for catalog name {spec!r} under {cfg.instances_dir}")


def run_benchmark(cfg: BenchConfig) -> BenchReport:
    """Execute the full protocol; per-instance failures are recorded, not fatal."""
    catalog = load_catalog(cfg.catalog_path)
    results = []
    for spec in cfg.instances:
        result = InstanceResult(name=Path(spec).stem if Path(spec).exists() else spec)
        try:
            name, q, entry = _resolve_instance(cfg, spec, catalog)
            result.name = name
            result.num_variables = q.num_variables
            result.num_nonzeros = q.num_entries
            result.density = (
                density(q.num_variables, q.num_entries) if q.num_variables >= 2 else 0.0
            )
            result.sense = q.sense_of_origin
            _run_instance(cfg, q, entry, result)
        except Exception as exc:
            result.error = str(exc)
        results.append(result)
    return BenchReport(config=cfg, results=results)


def _run_instance(
    cfg: BenchConfig, q: QuboInstance, entry: CatalogEntry | None, result: InstanceResult
) -> None:
    for idx in range(cfg.repeats):
        params = SamplerParams(
            time_limit=cfg.time_limit,
            max_samples=cfg.max_samples,
            seed=cfg.seed ^ idx,
            num_starts=cfg.num_starts,
            quality_bias=cfg.quality_bias,
        )
        if cfg.decompose:
            sset = solve_large(q, params, TabuInnerSampler(), subsize=cfg.subsize)
        else:
            sset = sample(q, params)
        result.repeats.append(
            RepeatResult(
                seed=params.seed,
                best_energy=sset.best.energy,
                first_found_time=sset.first_found_time,
                end_time=sset.end_time,
                sample_set=sset,
            )
        )
    result.selected_repeat = min(
        range(cfg.repeats), key=lambda i: result.repeats[i].best_energy
    )

    selected = result.repeats[result.selected_repeat]
    result.diversity = diversity_report(
        selected.sample_set, tolerance=cfg.elite_tolerance, linkage=cfg.linkage
    )
    result.elite_count = len(result.diversity.elite)

    if entry is not None and entry.best_known_energy is not None:
        result.best_known_energy = entry.best_known_energy
        reference = entry.best_known_min_energy()
        result.absolute_delta = reference - selected.best_energy
        try:
            result.relative_delta = relative_delta_energy(reference, selected.best_energy)
            gap = result.relative_delta
        except UndefinedRatioError:
            result.relative_delta = None
            gap = result.absolute_delta
        result.classification = "win" if gap > 0 else ("loss" if gap < 0 else "tie")


CSV_COLUMNS = [
    "name", "num_variables", "num_nonzeros", "density", "sense",
    "selected_repeat", "best_energy", "first_found_time", "end_time",
    "best_known_energy", "relative_delta_energy", "absolute_delta_energy",
    "classification", "elite_count", "error",
]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _sorted_rows(report: BenchReport, sort_key: str) -> list[dict]:
    rows = [r.row() for r in report.results]
    if sort_key == "problem_size":
        rows.sort(key=lambda r: (r["num_variables"], r["name"]))
    elif sort_key == "problem_density":
        rows.sort(key=lambda r: (r["density"], r["name"]))
    else:
        # None (no reference) sorts after real gaps.
        rows.sort(
            key=lambda r: (
                r["relative_delta_energy"] is None,
                r["relative_delta_energy"] if r["relative_delta_energy"] is not None else 0.0,
                r["name"],
            )
        )
    return rows


def emit_report(report: BenchReport, sort_key: str | None = None) -> list[Path]:
    """Write report.csv, report.json, the two figure files and per-instance
    diversity artifacts into the configured output directory."""
    cfg = report.config
    key = sort_key or cfg.sort_key
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    rows = _sorted_rows(report, key)
    csv_path = out / "report.csv"
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[col]) for col in CSV_COLUMNS) + "\n")
    written.append(csv_path)

    json_path = out / "report.json"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    written.append(json_path)

    plot_relative_delta_energy(rows, out / f"rde-by-{key}.svg", key)
    written.append(out / f"rde-by-{key}.svg")
    ok_rows = [r for r in rows if r["error"] is None and r["end_time"] is not None]
    plot_time_markers(ok_rows, out / "time-markers.svg", key, cfg.time_limit)
    written.append(out / "time-markers.svg")

    for result in report.results:
        if result.error is not None or result.diversity is None:
            continue
        written.extend(_emit_instance_artifacts(out, result))
    return written


def _emit_instance_artifacts(out: Path, result: InstanceResult) -> list[Path]:
    written = []
    name = result.name
    for idx, rep in enumerate(result.repeats):
        samples_path = out / f"{name}-samples-r{idx}.json"
        payload = {"schema_version": SCHEMA_VERSION, "instance": name, **rep.sample_set.to_dict()}
        samples_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        written.append(samples_path)

    div = result.diversity
    paths = {
        "distances": out / f"{name}-distances.csv",
        "histogram": out / f"{name}-pair-histogram.csv",
        "dendrogram_json": out / f"{name}-dendrogram.json",
        "dendrogram_svg": out / f"{name}-dendrogram.svg",
        "panel": out / f"{name}-diversity.svg",
    }
    paths["distances"].write_text(div.distances.to_csv(), encoding="utf-8")
    paths["histogram"].write_text(div.histogram.to_csv(), encoding="utf-8")
    paths["dendrogram_json"].write_text(
        json.dumps(div.dendrogram.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    plot_dendrogram(div.dendrogram, paths["dendrogram_svg"])
    plot_diversity_panel(div.distances, div.histogram, div.dendrogram, paths["panel"])
    written.extend(paths.values())
    return written
