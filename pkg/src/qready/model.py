"""QUBO data model: instances, energy evaluation and Max-Cut conversion.

The internal convention is minimization.  Maximization sources (Max-Cut)
are negated on ingest and remember their original direction through
``sense_of_origin``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

from .exceptions import DimensionError, InvalidInstanceError

MINIMIZE = "minimize"
MAXIMIZE = "maximize"

BitVector = np.ndarray


def as_bits(x: Iterable[int] | np.ndarray, n: int | None = None) -> BitVector:
    """Coerce a 0/1 sequence to a uint8 vector, validating values and length."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise DimensionError(f"expected a 1-d bit vector, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("bit vector contains values outside {0, 1}")
        arr = arr.astype(np.uint8)
    elif arr.size and arr.max() > 1:
        raise ValueError("bit vector contains values outside {0, 1}")
    if n is not None and arr.size != n:
        raise DimensionError(f"bit vector has length {arr.size}, expected {n}")
    return np.ascontiguousarray(arr)


class QuboInstance:
    """A sparse upper-triangular QUBO over binary variables (minimization).

    Entries are stored canonically with ``i <= j``; inputs with ``i > j``
    are folded into ``(j, i)`` by summation, and exact zeros are dropped.
    A symmetric per-variable adjacency index is built once at construction
    so single-flip deltas cost O(deg) instead of O(nnz).

    Instances are immutable after construction and safe to share across
    threads.
    """

    def __init__(
        self,
        num_variables: int,
        entries: Mapping[tuple[int, int], float] | Iterable[tuple[int, int, float]] = (),
        sense_of_origin: str = MINIMIZE,
    ):
        if num_variables < 1:
            raise InvalidInstanceError(f"num_variables must be positive, got {num_variables}")
        if sense_of_origin not in (MINIMIZE, MAXIMIZE):
            raise InvalidInstanceError(f"unknown sense: {sense_of_origin!r}")
        self.num_variables = int(num_variables)
        self.sense_of_origin = sense_of_origin

        if isinstance(entries, Mapping):
            items = (((i, j), w) for (i, j), w in entries.items())
        else:
            items = (((i, j), w) for i, j, w in entries)

        folded: dict[tuple[int, int], float] = {}
        n = self.num_variables
        for (i, j), w in items:
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidInstanceError(f"index pair ({i}, {j}) out of range for n={n}")
            if not math.isfinite(w):
                raise InvalidInstanceError(f"non-finite coefficient at ({i}, {j}): {w!r}")
            key = (i, j) if i <= j else (j, i)
            folded[key] = folded.get(key, 0.0) + float(w)
        self._entries = {k: w for k, w in sorted(folded.items()) if w != 0.0}

        self._diag = np.zeros(n, dtype=np.float64)
        off_i, off_j, off_w = [], [], []
        for (i, j), w in self._entries.items():
            if i == j:
                self._diag[i] = w
            else:
                off_i.append(i)
                off_j.append(j)
                off_w.append(w)
        self._off_i = np.asarray(off_i, dtype=np.int64)
        self._off_j = np.asarray(off_j, dtype=np.int64)
        self._off_w = np.asarray(off_w, dtype=np.float64)

        # Symmetric CSR adjacency over off-diagonal couplings (each pair twice).
        rows = np.concatenate([self._off_i, self._off_j])
        cols = np.concatenate([self._off_j, self._off_i])
        vals = np.concatenate([self._off_w, self._off_w])
        adj = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
        adj.sort_indices()
        self._adj_indptr = adj.indptr.astype(np.int64)
        self._adj_indices = adj.indices.astype(np.int64)
        self._adj_data = adj.data.astype(np.float64)

        for arr in (self._diag, self._off_i, self._off_j, self._off_w,
                    self._adj_indptr, self._adj_indices, self._adj_data):
            arr.setflags(write=False)

    @property
    def entries(self) -> dict[tuple[int, int], float]:
        """Canonical upper-triangular entry map (a copy)."""
        return dict(self._entries)

    @property
    def num_entries(self) -> int:
        return len(self._entries)

    @property
    def diagonal(self) -> np.ndarray:
        return self._diag

    @property
    def off_diagonal(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Strict upper-triangular entries as (i, j, w) arrays, i < j."""
        return self._off_i, self._off_j, self._off_w

    @property
    def adjacency(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Symmetric CSR (indptr, indices, data) over off-diagonal couplings."""
        return self._adj_indptr, self._adj_indices, self._adj_data

    def energy(self, x: Iterable[int] | np.ndarray) -> float:
        """Evaluate sum of coefficient * x_i * x_j over stored entries."""
        bits = as_bits(x, self.num_variables)
        xf = bits.astype(np.float64)
        e = float(np.dot(self._diag, xf))
        if self._off_w.size:
            e += float(np.dot(self._off_w, xf[self._off_i] * xf[self._off_j]))
        return e

    def flip_delta(self, x: Iterable[int] | np.ndarray, i: int) -> float:
        """Energy change from flipping bit i, in O(deg(i))."""
        bits = as_bits(x, self.num_variables)
        if not 0 <= i < self.num_variables:
            raise DimensionError(f"variable index {i} out of range for n={self.num_variables}")
        lo, hi = self._adj_indptr[i], self._adj_indptr[i + 1]
        neigh = float(np.dot(self._adj_data[lo:hi],
                             bits[self._adj_indices[lo:hi]].astype(np.float64)))
        return (1.0 - 2.0 * bits[i]) * (self._diag[i] + neigh)

    def flip_deltas(self, x: Iterable[int] | np.ndarray) -> np.ndarray:
        """All single-flip deltas for x at once."""
        bits = as_bits(x, self.num_variables)
        xf = bits.astype(np.float64)
        n = self.num_variables
        adj = sp.csr_matrix((self._adj_data, self._adj_indices, self._adj_indptr), shape=(n, n))
        return (1.0 - 2.0 * xf) * (self._diag + adj.dot(xf))

    def __repr__(self) -> str:
        return (f"QuboInstance(n={self.num_variables}, nnz={self.num_entries}, "
                f"sense_of_origin={self.sense_of_origin!r})")

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuboInstance):
            return NotImplemented
        return (self.num_variables == other.num_variables
                and self._entries == other._entries
                and self.sense_of_origin == other.sense_of_origin)


def energy(q: QuboInstance, x: Iterable[int] | np.ndarray) -> float:
    return q.energy(x)


def flip_delta(q: QuboInstance, x: Iterable[int] | np.ndarray, i: int) -> float:
    return q.flip_delta(x, i)


def density(n: int, nnz: int) -> float:
    """Ratio of nonzeros to the n*(n-1)/2 possible off-diagonal pairs."""
    if n < 2:
        raise InvalidInstanceError(f"density requires n >= 2, got {n}")
    if nnz < 0:
        raise InvalidInstanceError(f"nnz must be non-negative, got {nnz}")
    return nnz / (n * (n - 1) / 2)


@dataclass(frozen=True)
class MaxCutGraph:
    """Weighted undirected graph with edges keyed (u, v), u < v."""

    num_vertices: int
    edges: tuple[tuple[int, int, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.num_vertices < 1:
            raise InvalidInstanceError(f"num_vertices must be positive, got {self.num_vertices}")
        seen = set()
        canonical = []
        for u, v, w in self.edges:
            if u == v:
                raise InvalidInstanceError(f"self-loop on vertex {u}")
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise InvalidInstanceError(f"edge ({u}, {v}) out of range")
            if not math.isfinite(w):
                raise InvalidInstanceError(f"non-finite weight on edge ({u}, {v})")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise InvalidInstanceError(f"duplicate edge ({key[0]}, {key[1]})")
            seen.add(key)
            canonical.append((key[0], key[1], float(w)))
        object.__setattr__(self, "edges", tuple(canonical))

    def cut_value(self, x: Iterable[int] | np.ndarray) -> float:
        """Total weight of edges crossing the bipartition x."""
        bits = as_bits(x, self.num_vertices)
        return float(sum(w for u, v, w in self.edges if bits[u] != bits[v]))


def from_maxcut(g: MaxCutGraph) -> QuboInstance:
    """Convert a Max-Cut graph to a minimization QUBO.

    For every bipartition x, cut_value(g, x) == -energy(result, x):
    the diagonal gets -sum of incident weights and each edge (u, v, w)
    contributes an off-diagonal coefficient of 2w.
    """
    entries: dict[tuple[int, int], float] = {}
    for u, v, w in g.edges:
        entries[(u, u)] = entries.get((u, u), 0.0) - w
        entries[(v, v)] = entries.get((v, v), 0.0) - w
        entries[(u, v)] = entries.get((u, v), 0.0) + 2.0 * w
    return QuboInstance(g.num_vertices, entries, sense_of_origin=MAXIMIZE)
