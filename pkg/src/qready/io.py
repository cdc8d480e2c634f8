"""MQlib-style instance files and the shipped instance catalog.

File grammar (both formats): a header line ``n m`` followed by exactly m
data lines ``i j w`` with 1-based indices.  Lines starting with ``#`` and
blank lines are skipped and do not count toward m.

``qubo_triplets`` files require i <= j and map directly to QUBO entries.
``maxcut_triplets`` files require i != j and are converted to a
minimization QUBO via the Max-Cut reduction.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import IO, Iterable

from .exceptions import CatalogError, ParseError
from .model import MAXIMIZE, MINIMIZE, MaxCutGraph, QuboInstance, from_maxcut

QUBO_TRIPLETS = "qubo_triplets"
MAXCUT_TRIPLETS = "maxcut_triplets"

_FORMAT_ALIASES = {
    "qubo": QUBO_TRIPLETS,
    QUBO_TRIPLETS: QUBO_TRIPLETS,
    "maxcut": MAXCUT_TRIPLETS,
    MAXCUT_TRIPLETS: MAXCUT_TRIPLETS,
}


def normalize_format(fmt: str) -> str:
    try:
        return _FORMAT_ALIASES[fmt.lower()]
    except KeyError:
        raise ParseError(f"unknown instance format: {fmt!r}") from None


def _data_lines(source: Iterable[str]):
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def parse_instance(source: str | IO[str], fmt: str = QUBO_TRIPLETS) -> QuboInstance:
    """Parse an MQlib-style triplet file into a QuboInstance."""
    fmt = normalize_format(fmt)
    lines = source.splitlines() if isinstance(source, str) else source
    it = _data_lines(lines)

    try:
        header_lineno, header = next(it)
    except StopIteration:
        raise ParseError("empty instance file, expected header 'n m'") from None
    parts = header.split()
    if len(parts) != 2:
        raise ParseError(f"malformed header {header!r}, expected 'n m'", header_lineno)
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"malformed header {header!r}, expected integers", header_lineno) from None
    if n < 1:
        raise ParseError(f"declared variable count must be positive, got {n}", header_lineno)
    if m < 0:
        raise ParseError(f"declared entry count must be non-negative, got {m}", header_lineno)

    triplets: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, line in it:
        if len(triplets) == m:
            raise ParseError(f"declared {m} entries, found more", lineno)
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"malformed data line {line!r}, expected 'i j w'", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2])
        except ValueError:
            raise ParseError(f"malformed data line {line!r}", lineno) from None
        if not (1 <= i <= n) or not (1 <= j <= n):
            raise ParseError(f"index out of [1, {n}] in line {line!r}", lineno)
        if not math.isfinite(w):
            raise ParseError(f"non-finite weight in line {line!r}", lineno)
        if fmt == QUBO_TRIPLETS and i > j:
            raise ParseError(f"qubo entries require i <= j, got ({i}, {j})", lineno)
        if fmt == MAXCUT_TRIPLETS and i == j:
            raise ParseError(f"maxcut edges require i != j, got ({i}, {j})", lineno)
        key = (i, j) if i <= j else (j, i)
        if key in seen:
            raise ParseError(f"duplicate pair ({i}, {j})", lineno)
        seen.add(key)
        triplets.append((i - 1, j - 1, w))
    if len(triplets) != m:
        raise ParseError(f"declared {m} entries, found {len(triplets)}")

    if fmt == MAXCUT_TRIPLETS:
        return from_maxcut(MaxCutGraph(n, tuple(triplets)))
    return QuboInstance(n, triplets, sense_of_origin=MINIMIZE)


def write_instance(q: QuboInstance) -> str:
    """Serialize a QuboInstance so parse_instance(.., qubo_triplets) round-trips."""
    lines = [f"{q.num_variables} {q.num_entries}\n"]
    for (i, j), w in q.entries.items():
        lines.append(f"{i + 1} {j + 1} {w!r}\n")
    return "".join(lines)


@dataclass(frozen=True)
class CatalogEntry:
    """One benchmark instance: its size, density and best-known objective."""

    name: str
    num_variables: int
    num_nonzeros: int
    density: float
    best_known_energy: float | None
    sense: str
    meets_selection_criteria: bool = True

    def best_known_min_energy(self) -> float | None:
        """Best-known value converted to the internal minimization sense."""
        if self.best_known_energy is None:
            return None
        if self.sense == MAXIMIZE:
            return -self.best_known_energy
        return self.best_known_energy


_CORE_COLUMNS = ["name", "num_variables", "num_nonzeros", "density", "best_known_energy", "sense"]


def load_catalog(path: str | Path | None = None) -> list[CatalogEntry]:
    """Load the instance catalog CSV (the shipped 45-row catalog by default)."""
    if path is None:
        ref = resources.files("qready.data").joinpath("mqlib_catalog.csv")
        with ref.open("r", encoding="utf-8") as fh:
            return _read_catalog(fh)
    with open(path, "r", encoding="utf-8") as fh:
        return _read_catalog(fh)


def _read_catalog(fh: IO[str]) -> list[CatalogEntry]:
    reader = csv.DictReader(fh)
    header = reader.fieldnames or []
    missing = [c for c in _CORE_COLUMNS if c not in header]
    if missing:
        raise CatalogError(f"catalog is missing columns: {', '.join(missing)}")
    entries = []
    names = set()
    for row in reader:
        try:
            name = row["name"]
            best = row["best_known_energy"]
            sense = row["sense"]
            if sense not in (MINIMIZE, MAXIMIZE):
                raise CatalogError(f"unknown sense {sense!r} for {name}")
            entry = CatalogEntry(
                name=name,
                num_variables=int(row["num_variables"]),
                num_nonzeros=int(row["num_nonzeros"]),
                density=float(row["density"]),
                best_known_energy=float(best) if best not in (None, "") else None,
                sense=sense,
                meets_selection_criteria=row.get("meets_selection_criteria", "true").lower()
                != "false",
            )
        except (KeyError, ValueError) as exc:
            raise CatalogError(f"bad catalog row {row!r}: {exc}") from exc
        if entry.name in names:
            raise CatalogError(f"duplicate catalog name {entry.name!r}")
        names.add(entry.name)
        entries.append(entry)
    return entries


def catalog_lookup(entries: list[CatalogEntry], name: str) -> CatalogEntry | None:
    for entry in entries:
        if entry.name == name:
            return entry
    return None
