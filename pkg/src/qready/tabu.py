"""Multi-start tabu search sampler.

Several workers run independent tabu walks over the single-bit-flip
neighborhood and feed one synchronized pool that keeps the best
``max_samples`` distinct answers.  With a single start and a fixed seed
the returned pool is bit-for-bit reproducible (timing fields aside).
"""

from __future__ import annotations

import heapq
import os
import threading
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .exceptions import InvalidInstanceError, QreadyError
from .model import QuboInstance, as_bits

DEFAULT_TIME_LIMIT = 1200.0
DEFAULT_MAX_SAMPLES = 700
DEFAULT_REPEATS = 5

QUALITY = "quality"
SPEED = "speed"

# Workers re-read the global incumbent for aspiration once per block.
MOVES_PER_BLOCK = 64


@dataclass
class SamplerParams:
    """Knobs for one sampling run.

    ``"auto"`` resolves tenure to max(10, n/20), stagnation to
    max(5000, 10n) moves and num_starts to one per available core.
    """

    time_limit: float = DEFAULT_TIME_LIMIT
    max_samples: int = DEFAULT_MAX_SAMPLES
    seed: int = 0
    num_starts: int | str = "auto"
    tabu_tenure: int | str = "auto"
    stagnation_restart: int | str = "auto"
    no_progress_fraction: float = 0.25
    quality_bias: str = QUALITY
    # Optional per-start move budget; makes runs load-independent, which
    # wall-clock budgets alone cannot guarantee.
    max_total_moves: int | None = None

    def __post_init__(self):
        if self.time_limit <= 0:
            raise QreadyError(f"time_limit must be positive, got {self.time_limit}")
        if self.max_total_moves is not None and self.max_total_moves < 1:
            raise QreadyError("max_total_moves must be positive when set")
        if self.max_samples < 1:
            raise QreadyError(f"max_samples must be >= 1, got {self.max_samples}")
        if self.num_starts != "auto" and int(self.num_starts) < 1:
            raise QreadyError(f"num_starts must be positive or 'auto', got {self.num_starts}")
        if self.tabu_tenure != "auto" and int(self.tabu_tenure) < 1:
            raise QreadyError(f"tabu_tenure must be positive or 'auto', got {self.tabu_tenure}")
        if self.stagnation_restart != "auto" and int(self.stagnation_restart) < 1:
            raise QreadyError("stagnation_restart must be positive or 'auto'")
        if not 0.0 < self.no_progress_fraction <= 1.0:
            raise QreadyError(
                f"no_progress_fraction must be in (0, 1], got {self.no_progress_fraction}"
            )
        if self.quality_bias not in (QUALITY, SPEED):
            raise QreadyError(f"quality_bias must be 'quality' or 'speed', got {self.quality_bias}")

    def resolved_num_starts(self) -> int:
        if self.num_starts == "auto":
            return os.cpu_count() or 1
        return int(self.num_starts)

    def resolved_tenure(self, n: int) -> int:
        if self.tabu_tenure == "auto":
            return max(10, n // 20)
        return int(self.tabu_tenure)

    def resolved_stagnation(self, n: int) -> int:
        if self.stagnation_restart == "auto":
            return max(5000, 10 * n)
        return int(self.stagnation_restart)


@dataclass
class Sample:
    """One binary assignment with its recomputed energy."""

    bits: np.ndarray
    energy: float
    found_at: float

    def bit_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)


@dataclass
class SampleSet:
    """Energy-ordered, deduplicated pool of samples plus timing metadata."""

    samples: list[Sample]
    first_found_time: float
    end_time: float
    best_energy_trace: list[tuple[float, float]]
    num_variables: int

    @property
    def best(self) -> Sample:
        return self.samples[0]

    def energies(self) -> np.ndarray:
        return np.array([s.energy for s in self.samples], dtype=np.float64)

    def __len__(self) -> int:
        return len(self.samples)

    def to_dict(self) -> dict:
        return {
            "num_variables": self.num_variables,
            "first_found_time": self.first_found_time,
            "end_time": self.end_time,
            "best_energy_trace": [[t, e] for t, e in self.best_energy_trace],
            "samples": [
                {"bits": s.bit_string(), "energy": s.energy, "found_at": s.found_at}
                for s in self.samples
            ],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "SampleSet":
        samples = [
            Sample(
                bits=(np.frombuffer(s["bits"].encode("ascii"), dtype=np.uint8) - ord("0")).astype(np.uint8),
                energy=float(s["energy"]),
                found_at=float(s.get("found_at", 0.0)),
            )
            for s in payload["samples"]
        ]
        return cls(
            samples=samples,
            first_found_time=float(payload.get("first_found_time", 0.0)),
            end_time=float(payload.get("end_time", 0.0)),
            best_energy_trace=[(float(t), float(e)) for t, e in payload.get("best_energy_trace", [])],
            num_variables=int(payload["num_variables"]),
        )


class SamplePool:
    """Synchronized, capacity-bounded pool with set semantics.

    Candidates are ranked by (energy, bits) total order, so the final
    contents do not depend on merge order.  Energies are recomputed from
    scratch at insertion; duplicates (exact bit equality) are dropped.
    """

    def __init__(self, q: QuboInstance, max_samples: int):
        self._q = q
        self._cap = max_samples
        self._lock = threading.Lock()
        self._by_bits: dict[bytes, Sample] = {}
        # Min-heap keyed so the root is the worst sample by (energy, bits):
        # bit-inverting the key reverses lexicographic order.
        self._heap: list[tuple[float, bytes, bytes]] = []
        self.best_energy: float = float("inf")
        self.last_improvement: float = 0.0
        self.trace: list[tuple[float, float]] = []

    def insert(self, bits: np.ndarray, now: float) -> bool:
        key = bits.tobytes()
        with self._lock:
            if key in self._by_bits:
                return False
            energy = self._q.energy(bits)
            if len(self._by_bits) >= self._cap:
                worst_neg_e, _, worst_key = self._heap[0]
                if (energy, key) >= (-worst_neg_e, worst_key):
                    return False
                heapq.heappop(self._heap)
                del self._by_bits[worst_key]
            self._by_bits[key] = Sample(bits.copy(), energy, now)
            heapq.heappush(self._heap, (-energy, (bits ^ 1).tobytes(), key))
            if energy < self.best_energy:
                self.best_energy = energy
                self.trace.append((now, energy))
                self.last_improvement = now
            return True

    def sorted_samples(self) -> list[Sample]:
        with self._lock:
            return [s for _, s in sorted(self._by_bits.items(), key=lambda kv: (kv[1].energy, kv[0]))]

    def __len__(self) -> int:
        return len(self._by_bits)


def sample(q: QuboInstance, p: SamplerParams | None = None) -> SampleSet:
    """Run multi-start tabu search under a wall-clock budget.

    Terminates at ``p.time_limit``, or earlier under ``quality_bias="speed"``
    once no global improvement has occurred for
    ``no_progress_fraction * time_limit`` seconds.
    """
    if p is None:
        p = SamplerParams()
    if q.num_variables < 1:
        raise InvalidInstanceError("cannot sample an empty instance")

    t0 = time.monotonic()
    pool = SamplePool(q, p.max_samples)
    num_starts = p.resolved_num_starts()
    seed_seqs = np.random.SeedSequence(p.seed).spawn(num_starts)
    stop = threading.Event()
    no_progress_window = p.no_progress_fraction * p.time_limit

    def should_stop(now: float) -> bool:
        if stop.is_set() or now >= p.time_limit:
            return True
        if p.quality_bias == SPEED and now - pool.last_improvement >= no_progress_window:
            stop.set()
            return True
        return False

    exit_times = [0.0] * num_starts
    if num_starts == 1:
        exit_times[0] = _run_single_start(q, p, seed_seqs[0], pool, t0, should_stop)
    else:
        threads = []
        for w, seq in enumerate(seed_seqs):
            def runner(w=w, seq=seq):
                exit_times[w] = _run_single_start(q, p, seq, pool, t0, should_stop)

            th = threading.Thread(target=runner, name=f"tabu-start-{w}", daemon=True)
            th.start()
            threads.append(th)
        for th in threads:
            th.join()

    samples = pool.sorted_samples()
    trace = list(pool.trace)
    return SampleSet(
        samples=samples,
        first_found_time=trace[-1][0] if trace else 0.0,
        end_time=max(exit_times),
        best_energy_trace=trace,
        num_variables=q.num_variables,
    )


def _run_single_start(
    q: QuboInstance,
    p: SamplerParams,
    seed_seq: np.random.SeedSequence,
    pool: SamplePool,
    t0: float,
    should_stop: Callable[[float], bool],
) -> float:
    """One tabu walk with stagnation restarts; returns its loop-exit time."""
    rng = np.random.default_rng(seed_seq)
    n = q.num_variables
    diag = q.diagonal
    indptr, indices, data = q.adjacency
    tenure = p.resolved_tenure(n)
    stagnation = p.resolved_stagnation(n)

    x = rng.integers(0, 2, size=n, dtype=np.uint8)
    delta = np.empty(n, dtype=np.float64)
    tabu_until = np.zeros(n, dtype=np.int64)
    fstate = np.empty(2, dtype=np.float64)
    istate = np.zeros(2, dtype=np.int64)
    event_energy = np.empty(MOVES_PER_BLOCK, dtype=np.float64)
    event_move = np.empty(MOVES_PER_BLOCK, dtype=np.int64)
    event_bits = np.empty((MOVES_PER_BLOCK, n), dtype=np.uint8)

    energy0 = _kernels.recompute_state(diag, indptr, indices, data, x, delta)
    fstate[0] = fstate[1] = energy0
    pool.insert(x, time.monotonic() - t0)

    while True:
        now = time.monotonic() - t0
        if should_stop(now):
            break
        block = MOVES_PER_BLOCK
        if p.max_total_moves is not None:
            block = min(block, p.max_total_moves - int(istate[0]))
            if block <= 0:
                break
        rands = rng.random(block)
        _, n_events, stalled = _kernels.sweep(
            indptr, indices, data, x, delta, tabu_until, fstate, istate, rands,
            tenure, stagnation, pool.best_energy,
            event_energy, event_move, event_bits,
        )
        now = time.monotonic() - t0
        for k in range(n_events):
            pool.insert(event_bits[k], now)
        if stalled:
            x = rng.integers(0, 2, size=n, dtype=np.uint8)
            tabu_until[:] = 0
            energy0 = _kernels.recompute_state(diag, indptr, indices, data, x, delta)
            fstate[0] = fstate[1] = energy0
            istate[1] = 0
            pool.insert(x, time.monotonic() - t0)
    return time.monotonic() - t0


def validate_sample_set(q: QuboInstance, s: SampleSet, rel_tol: float = 1e-9) -> None:
    """Re-check every SampleSet invariant; raises QreadyError on violation."""
    prev_key: tuple[float, bytes] | None = None
    for smp in s.samples:
        bits = as_bits(smp.bits, q.num_variables)
        ref = q.energy(bits)
        if abs(smp.energy - ref) > rel_tol * max(1.0, abs(ref)):
            raise QreadyError(f"stored energy {smp.energy} != recomputed {ref}")
        key = (smp.energy, bits.tobytes())
        if prev_key is not None and key <= prev_key:
            raise QreadyError("samples not strictly sorted by (energy, bits)")
        prev_key = key
    energies = [e for _, e in s.best_energy_trace]
    if any(b > a for a, b in zip(energies, energies[1:])):
        raise QreadyError("best-energy trace is not non-increasing")
    times = [t for t, _ in s.best_energy_trace]
    if any(b < a for a, b in zip(times, times[1:])):
        raise QreadyError("best-energy trace times are not non-decreasing")
    if s.samples and s.best_energy_trace:
        if s.first_found_time != s.best_energy_trace[-1][0]:
            raise QreadyError("first_found_time does not match the trace")
