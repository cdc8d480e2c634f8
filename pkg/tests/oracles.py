"""Independent reference implementations used as test oracles.

Everything here is written directly from the definitions (enumeration,
positional counting, direct arithmetic) and never calls the library code
it is used to check.
"""

from __future__ import annotations

import itertools

import numpy as np


def oracle_energy(entries: dict[tuple[int, int], float], bits) -> float:
    """Direct sum over entries; no vectorization, no library calls."""
    total = 0.0
    for (i, j), w in entries.items():
        total += w * bits[i] * bits[j]
    return total


def enumerate_assignments(n: int) -> np.ndarray:
    """All 2^n assignments as a (2^n, n) uint8 matrix, row r = binary of r."""
    count = 1 << n
    return ((np.arange(count, dtype=np.int64)[:, None] >> np.arange(n)[None, :]) & 1).astype(
        np.uint8
    )


def all_energies(entries: dict[tuple[int, int], float], n: int) -> np.ndarray:
    """Energy of every assignment, computed from the definition."""
    assignments = enumerate_assignments(n).astype(np.float64)
    energies = np.zeros(assignments.shape[0], dtype=np.float64)
    for (i, j), w in entries.items():
        energies += w * assignments[:, i] * assignments[:, j]
    return energies


def brute_force_min(entries: dict[tuple[int, int], float], n: int) -> tuple[float, np.ndarray]:
    """Global minimum energy and one argmin assignment by full enumeration."""
    energies = all_energies(entries, n)
    idx = int(np.argmin(energies))
    return float(energies[idx]), enumerate_assignments(n)[idx]


def brute_force_max_cut(num_vertices: int, edges) -> float:
    """Best cut value over all bipartitions, from the cut definition."""
    best = 0.0
    for assignment in itertools.product((0, 1), repeat=num_vertices):
        cut = sum(w for u, v, w in edges if assignment[u] != assignment[v])
        best = max(best, cut)
    return best


def random_entries(
    rng: np.random.Generator, n: int, n_entries: int, integer: bool = False
) -> dict[tuple[int, int], float]:
    """Random upper-triangular entry map with the requested nonzero count."""
    entries: dict[tuple[int, int], float] = {}
    while len(entries) < n_entries:
        i = int(rng.integers(0, n))
        j = int(rng.integers(0, n))
        i, j = min(i, j), max(i, j)
        if integer:
            w = float(rng.integers(-10, 11))
        else:
            w = float(rng.normal())
        if w != 0.0:
            entries[(i, j)] = w
    return entries
