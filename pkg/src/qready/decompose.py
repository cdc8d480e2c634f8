"""qbsolv-style decomposition: clamp, solve subproblems, merge.

The inner sampler is an abstract seam: the shipped implementations run
tabu search or exhaustive enumeration, and a QPU-backed sampler can
implement the same interface without touching the outer loop.
"""

from __future__ import annotations

import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .exceptions import DimensionError, InnerSamplerError, QreadyError
from .model import QuboInstance, as_bits
from .tabu import Sample, SamplePool, SampleSet, SamplerParams, SPEED, sample

DEFAULT_SUBSIZE = 64


@dataclass(frozen=True)
class SubProblem:
    """A QUBO over a variable subset with the clamped remainder folded in.

    For every assignment y of the subset, ``sub_q.energy(y) + offset``
    equals the full energy of the incumbent overwritten with y.
    """

    variables: np.ndarray
    sub_q: QuboInstance
    offset: float

    def lift(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Overwrite positions ``variables`` of x with the sub-assignment y."""
        out = x.copy()
        out[self.variables] = y
        return out


def clamp_subproblem(q: QuboInstance, x: Iterable[int] | np.ndarray, s) -> SubProblem:
    """Extract the subQUBO over s with all other variables fixed at x."""
    bits = as_bits(x, q.num_variables)
    variables = np.unique(np.asarray(list(s) if not isinstance(s, np.ndarray) else s, dtype=np.int64))
    if variables.size == 0:
        raise QreadyError("cannot clamp an empty subset")
    if variables[0] < 0 or variables[-1] >= q.num_variables:
        raise DimensionError(f"subset indices out of range for n={q.num_variables}")

    n = q.num_variables
    k = variables.size
    in_s = np.zeros(n, dtype=bool)
    in_s[variables] = True
    posmap = np.full(n, -1, dtype=np.int64)
    posmap[variables] = np.arange(k)

    diag = q.diagonal
    oi, oj, ow = q.off_diagonal
    xf = bits.astype(np.float64)

    sub_diag = diag[variables].copy()
    offset = float(np.dot(diag[~in_s], xf[~in_s]))

    triplets: list[tuple[int, int, float]] = []
    if ow.size:
        i_in = in_s[oi]
        j_in = in_s[oj]
        both = i_in & j_in
        for a, b, w in zip(posmap[oi[both]], posmap[oj[both]], ow[both]):
            triplets.append((int(a), int(b), float(w)))
        cross_i = i_in & ~j_in
        np.add.at(sub_diag, posmap[oi[cross_i]], ow[cross_i] * xf[oj[cross_i]])
        cross_j = ~i_in & j_in
        np.add.at(sub_diag, posmap[oj[cross_j]], ow[cross_j] * xf[oi[cross_j]])
        neither = ~i_in & ~j_in
        offset += float(np.dot(ow[neither], xf[oi[neither]] * xf[oj[neither]]))

    for idx in range(k):
        if sub_diag[idx] != 0.0:
            triplets.append((idx, idx, float(sub_diag[idx])))
    return SubProblem(variables=variables, sub_q=QuboInstance(k, triplets), offset=offset)


def select_subset(
    q: QuboInstance, x: Iterable[int] | np.ndarray, k: int, rng: np.random.Generator
) -> np.ndarray:
    """Pick k variables: the most impactful half plus a uniform random half.

    Impact is |flip delta| at the incumbent; the random half keeps the
    outer loop from revisiting the same neighborhood forever.
    """
    n = q.num_variables
    if not 1 <= k <= n:
        raise QreadyError(f"subset size must be in [1, {n}], got {k}")
    bits = as_bits(x, n)
    impact = np.abs(q.flip_deltas(bits))
    order = np.argsort(-impact, kind="stable")
    n_top = (k + 1) // 2
    top = order[:n_top]
    rest = order[n_top:]
    randoms = rng.choice(rest, size=k - n_top, replace=False) if k - n_top else np.array([], dtype=np.int64)
    return np.sort(np.concatenate([top, randoms]).astype(np.int64))


class InnerSampler(ABC):
    """Solves subQUBOs up to ``capacity`` variables within a time budget."""

    capacity: int

    @abstractmethod
    def solve(self, sub_q: QuboInstance, time_limit: float, max_samples: int, seed: int) -> SampleSet:
        """Return an energy-ordered SampleSet for sub_q."""


class TabuInnerSampler(InnerSampler):
    """Default inner sampler: single-start deterministic tabu search."""

    def __init__(self, capacity: int = 1_000_000):
        self.capacity = capacity

    def solve(self, sub_q, time_limit, max_samples, seed):
        params = SamplerParams(
            time_limit=time_limit,
            max_samples=max_samples,
            seed=seed,
            num_starts=1,
            quality_bias=SPEED,
        )
        return sample(sub_q, params)


class ExhaustiveInnerSampler(InnerSampler):
    """Enumerates all assignments; for testing and tiny subproblems."""

    def __init__(self, capacity: int = 20):
        if capacity > 26:
            raise QreadyError("exhaustive enumeration beyond 26 variables is unreasonable")
        self.capacity = capacity

    def solve(self, sub_q, time_limit, max_samples, seed):
        n = sub_q.num_variables
        if n > self.capacity:
            raise InnerSamplerError(f"subproblem size {n} exceeds capacity {self.capacity}")
        t_start = time.monotonic()
        count = 1 << n
        assignments = ((np.arange(count, dtype=np.int64)[:, None] >> np.arange(n)[None, :]) & 1).astype(np.uint8)
        oi, oj, ow = sub_q.off_diagonal
        energies = np.empty(count, dtype=np.float64)
        # Chunked so the float copy of the assignment block stays small.
        chunk = 1 << 16
        for lo in range(0, count, chunk):
            xf = assignments[lo:lo + chunk].astype(np.float64)
            e = xf @ sub_q.diagonal
            for i, j, w in zip(oi, oj, ow):
                e += w * xf[:, i] * xf[:, j]
            energies[lo:lo + chunk] = e
        # Total order (energy, bits-lex); lexsort keys are least significant first.
        keys = [assignments[:, c] for c in range(n - 1, -1, -1)] + [energies]
        order = np.lexsort(keys)[:max_samples]
        elapsed = time.monotonic() - t_start
        samples = [
            Sample(bits=assignments[idx].copy(), energy=float(energies[idx]), found_at=elapsed)
            for idx in order
        ]
        return SampleSet(
            samples=samples,
            first_found_time=elapsed,
            end_time=elapsed,
            best_energy_trace=[(elapsed, samples[0].energy)],
            num_variables=n,
        )


def solve_large(
    q: QuboInstance,
    p: SamplerParams | None = None,
    inner: InnerSampler | None = None,
    subsize: int = DEFAULT_SUBSIZE,
    inner_time_limit: float | None = None,
) -> SampleSet:
    """Decompose-and-merge outer loop for instances beyond the inner capacity.

    The incumbent is only ever replaced by a lifted sub-solution that does
    not worsen the total energy, so the incumbent energy is monotone
    non-increasing across outer iterations.
    """
    if p is None:
        p = SamplerParams()
    if inner is None:
        inner = TabuInnerSampler()
    if subsize < 1:
        raise QreadyError(f"subsize must be positive, got {subsize}")
    n = q.num_variables
    if min(subsize, n) > inner.capacity:
        raise InnerSamplerError(
            f"subproblem size {min(subsize, n)} exceeds inner sampler capacity {inner.capacity}"
        )

    t0 = time.monotonic()
    seed_root = np.random.SeedSequence(p.seed)
    outer_seq, inner_seed_seq = seed_root.spawn(2)
    rng = np.random.default_rng(outer_seq)
    inner_seeds = np.random.default_rng(inner_seed_seq)
    pool = SamplePool(q, p.max_samples)

    def remaining(now: float) -> float:
        return p.time_limit - now

    def budget(now: float) -> float:
        if inner_time_limit is not None:
            return min(inner_time_limit, remaining(now))
        return min(max(p.time_limit / 20.0, 0.1), remaining(now))

    def run_inner(sub_q: QuboInstance, limit: float) -> SampleSet:
        seed = int(inner_seeds.integers(0, 2**63 - 1))
        try:
            return inner.solve(sub_q, time_limit=limit, max_samples=p.max_samples, seed=seed)
        except InnerSamplerError:
            raise
        except Exception as exc:
            raise InnerSamplerError(
                f"inner sampler failed on a {sub_q.num_variables}-variable subproblem: {exc}"
            ) from exc

    if n <= subsize:
        # Degenerate decomposition: one inner call over the full instance.
        inner_set = run_inner(q, remaining(time.monotonic() - t0))
        now = time.monotonic() - t0
        for smp in inner_set.samples:
            pool.insert(smp.bits, now)
        return _finish(pool, time.monotonic() - t0, n)

    x = rng.integers(0, 2, size=n, dtype=np.uint8)
    current = q.energy(x)
    pool.insert(x, time.monotonic() - t0)
    no_progress_window = p.no_progress_fraction * p.time_limit

    while True:
        now = time.monotonic() - t0
        if remaining(now) <= 0:
            break
        if p.quality_bias == SPEED and now - pool.last_improvement >= no_progress_window:
            break
        subset = select_subset(q, x, min(subsize, n), rng)
        sub = clamp_subproblem(q, x, subset)
        sub_set = run_inner(sub.sub_q, max(budget(now), 1e-3))
        if not sub_set.samples:
            continue
        now = time.monotonic() - t0
        for smp in sub_set.samples:
            pool.insert(sub.lift(x, smp.bits), now)
        candidate = sub.lift(x, sub_set.best.bits)
        cand_energy = q.energy(candidate)
        if cand_energy < current or (cand_energy == current and not np.array_equal(candidate, x)):
            x = candidate
            current = cand_energy
    return _finish(pool, time.monotonic() - t0, n)


def _finish(pool: SamplePool, end_time: float, num_variables: int) -> SampleSet:
    samples = pool.sorted_samples()
    trace = list(pool.trace)
    return SampleSet(
        samples=samples,
        first_found_time=trace[-1][0] if trace else 0.0,
        end_time=end_time,
        best_energy_trace=trace,
        num_variables=num_variables,
    )
