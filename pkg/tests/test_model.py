"""qubo-core: energy evaluation, flip deltas, density, Max-Cut conversion."""

import numpy as np
import pytest

from qready import (
    DimensionError,
    InvalidInstanceError,
    MaxCutGraph,
    QuboInstance,
    density,
    from_maxcut,
)

from .oracles import all_energies, brute_force_max_cut, oracle_energy, random_entries


class TestQuboInstance:
    def test_rejects_bad_indices(self):
        with pytest.raises(InvalidInstanceError):
            QuboInstance(2, {(0, 2): 1.0})
        with pytest.raises(InvalidInstanceError):
            QuboInstance(2, {(-1, 0): 1.0})

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInstanceError):
            QuboInstance(2, {(0, 1): float("nan")})
        with pytest.raises(InvalidInstanceError):
            QuboInstance(2, {(0, 1): float("inf")})

    def test_rejects_empty(self):
        with pytest.raises(InvalidInstanceError):
            QuboInstance(0)

    def test_symmetric_inputs_folded(self):
        q = QuboInstance(2, [(0, 1, 1.5), (1, 0, 0.5)])
        assert q.entries == {(0, 1): 2.0}

    def test_zero_coefficients_dropped(self):
        q = QuboInstance(3, {(0, 1): 0.0, (1, 2): 1.0})
        assert q.entries == {(1, 2): 1.0}
        # Folding to zero also drops the entry.
        q = QuboInstance(2, [(0, 1, 1.0), (1, 0, -1.0)])
        assert q.entries == {}

    def test_upper_triangular_invariant(self, rng):
        entries = random_entries(rng, 12, 30)
        q = QuboInstance(12, entries)
        assert all(i <= j for i, j in q.entries)
        assert all(w != 0.0 for w in q.entries.values())


class TestEnergy:
    def test_empty_instance_energy_zero(self):
        q = QuboInstance(3)
        assert q.energy([1, 0, 1]) == 0.0

    def test_toy_energies(self, toy_q):
        # Expected values from enumerating all 4 assignments directly.
        assert toy_q.energy([1, 1]) == 0.0
        assert toy_q.energy([1, 0]) == 1.0
        assert toy_q.energy([0, 1]) == 1.0
        assert toy_q.energy([0, 0]) == 0.0

    def test_toy_global_minima(self, toy_q):
        energies = all_energies(toy_q.entries, 2)
        assert energies.min() == 0.0
        assert sorted(np.flatnonzero(energies == 0.0).tolist()) == [0, 3]  # (0,0) and (1,1)

    def test_length_mismatch(self, toy_q):
        with pytest.raises(DimensionError):
            toy_q.energy([1, 0, 1])

    def test_matches_oracle_on_random_instances(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 20))
            entries = random_entries(rng, n, int(rng.integers(1, n * 2)))
            q = QuboInstance(n, entries)
            x = rng.integers(0, 2, n, dtype=np.uint8)
            expected = oracle_energy(entries, x)
            assert q.energy(x) == pytest.approx(expected, rel=1e-9, abs=1e-12)

    def test_entry_order_invariance(self, rng):
        entries = random_entries(rng, 16, 40)
        q1 = QuboInstance(16, entries)
        q2 = QuboInstance(16, list(reversed([(i, j, w) for (i, j), w in entries.items()])))
        x = rng.integers(0, 2, 16, dtype=np.uint8)
        e1, e2 = q1.energy(x), q2.energy(x)
        assert e1 == pytest.approx(e2, rel=1e-9)


class TestFlipDelta:
    def test_toy_values(self, toy_q):
        assert toy_q.flip_delta([0, 0], 0) == 1.0
        assert toy_q.flip_delta([0, 1], 0) == -1.0  # energy(1,1) - energy(0,1)

    def test_index_out_of_range(self, toy_q):
        with pytest.raises(DimensionError):
            toy_q.flip_delta([0, 0], 2)
        with pytest.raises(DimensionError):
            toy_q.flip_delta([0, 0], -1)

    def test_involution(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 32))
            q = QuboInstance(n, random_entries(rng, n, n))
            x = rng.integers(0, 2, n, dtype=np.uint8)
            i = int(rng.integers(0, n))
            flipped = x.copy()
            flipped[i] ^= 1
            assert q.flip_delta(flipped, i) == pytest.approx(-q.flip_delta(x, i), rel=1e-9)

    def test_delta_consistency_against_full_recompute(self, rng):
        """flip_delta == energy(flip(x, i)) - energy(x) on random triples."""
        for _ in range(200):
            n = int(rng.integers(1, 64))
            n_entries = int(rng.integers(0, max(1, n * (n + 1) // 4)))
            q = QuboInstance(n, random_entries(rng, n, n_entries) if n_entries else {})
            x = rng.integers(0, 2, n, dtype=np.uint8)
            i = int(rng.integers(0, n))
            flipped = x.copy()
            flipped[i] ^= 1
            expected = q.energy(flipped) - q.energy(x)
            got = q.flip_delta(x, i)
            assert abs(got - expected) <= 1e-9 * max(1.0, abs(expected))

    def test_flip_deltas_vector_matches_scalar(self, rng):
        n = 24
        q = QuboInstance(n, random_entries(rng, n, 60))
        x = rng.integers(0, 2, n, dtype=np.uint8)
        vec = q.flip_deltas(x)
        for i in range(n):
            assert vec[i] == pytest.approx(q.flip_delta(x, i), rel=1e-12)


class TestDensity:
    def test_paper_rows(self):
        assert density(3364, 406237) == pytest.approx(0.0718, abs=0.00005)
        assert density(3398, 3966) == pytest.approx(0.0007, abs=0.00005)

    def test_empty(self):
        assert density(2, 0) == 0.0

    def test_rejects_small_n(self):
        with pytest.raises(InvalidInstanceError):
            density(1, 0)


class TestMaxCut:
    def test_triangle(self):
        g = MaxCutGraph(3, ((0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)))
        q = from_maxcut(g)
        assert q.entries == {
            (0, 0): -2.0, (1, 1): -2.0, (2, 2): -2.0,
            (0, 1): 2.0, (0, 2): 2.0, (1, 2): 2.0,
        }
        assert q.sense_of_origin == "maximize"
        energies = all_energies(q.entries, 3)
        assert energies.min() == -2.0
        assert q.energy([1, 0, 0]) == -2.0

    def test_single_edge(self):
        g = MaxCutGraph(2, ((0, 1, 5.0),))
        q = from_maxcut(g)
        assert q.entries == {(0, 0): -5.0, (1, 1): -5.0, (0, 1): 10.0}
        assert q.energy([1, 0]) == -5.0

    def test_empty_graph(self):
        q = from_maxcut(MaxCutGraph(3))
        assert q.entries == {}
        assert q.energy([1, 1, 0]) == 0.0

    def test_rejects_self_loops_and_duplicates(self):
        with pytest.raises(InvalidInstanceError):
            MaxCutGraph(3, ((0, 0, 1.0),))
        with pytest.raises(InvalidInstanceError):
            MaxCutGraph(3, ((0, 1, 1.0), (1, 0, 2.0)))

    def test_cut_identity_exhaustive(self, rng):
        """cut_value(g, x) == -energy(converted, x) for every bipartition."""
        for _ in range(25):
            nv = int(rng.integers(2, 13))
            possible = [(u, v) for u in range(nv) for v in range(u + 1, nv)]
            count = int(rng.integers(0, len(possible) + 1))
            chosen = rng.choice(len(possible), size=count, replace=False)
            edges = tuple(
                (possible[k][0], possible[k][1], float(rng.integers(-5, 6)))
                for k in chosen
            )
            g = MaxCutGraph(nv, edges)
            q = from_maxcut(g)
            for r in range(1 << nv):
                x = [(r >> b) & 1 for b in range(nv)]
                assert g.cut_value(x) == -q.energy(x)

    def test_optimum_matches_brute_force(self, rng):
        for _ in range(10):
            nv = int(rng.integers(2, 10))
            possible = [(u, v) for u in range(nv) for v in range(u + 1, nv)]
            count = int(rng.integers(1, len(possible) + 1))
            chosen = rng.choice(len(possible), size=count, replace=False)
            edges = tuple((possible[k][0], possible[k][1], float(rng.integers(1, 7))) for k in chosen)
            q = from_maxcut(MaxCutGraph(nv, edges))
            best_cut = brute_force_max_cut(nv, edges)
            assert all_energies(q.entries, nv).min() == -best_cut
