# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled tabu-sweep kernel.

Semantically identical to ``_tabu_py``; on integer instances the two
produce bit-identical walks.  The move loop releases the GIL so
multi-start workers can run in parallel threads.
"""

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.float64_t f64
ctypedef cnp.int64_t i64
ctypedef cnp.uint8_t u8


def recompute_state(
    const f64[::1] diag,
    const i64[::1] indptr,
    const i64[::1] indices,
    const f64[::1] data,
    u8[::1] x,
    f64[::1] delta,
):
    """Fill ``delta`` with all single-flip deltas for ``x``; return its energy."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, p
    cdef f64 neigh, energy = 0.0
    with nogil:
        for i in range(n):
            neigh = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                if x[indices[p]]:
                    neigh += data[p]
            delta[i] = (1.0 - 2.0 * x[i]) * (diag[i] + neigh)
            if x[i]:
                energy += diag[i] + 0.5 * neigh
    return energy


def sweep(
    const i64[::1] indptr,
    const i64[::1] indices,
    const f64[::1] data,
    u8[::1] x,
    f64[::1] delta,
    i64[::1] tabu_until,
    f64[::1] fstate,
    i64[::1] istate,
    f64[::1] rands,
    long long tenure_base,
    long long stagnation_limit,
    double global_best,
    f64[::1] event_energy,
    i64[::1] event_move,
    u8[:, ::1] event_bits,
):
    """Run up to ``len(rands)`` tabu moves; record pool-push events.

    Returns ``(moves_done, n_events, stalled)``; see ``_tabu_py.sweep``.
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t max_moves = rands.shape[0]
    cdef f64 cur = fstate[0]
    cdef f64 inc = fstate[1]
    cdef i64 mc = istate[0]
    cdef i64 non_improving = istate[1]
    cdef Py_ssize_t n_events = 0
    cdef Py_ssize_t moves_done = 0
    cdef bint stalled = False

    cdef Py_ssize_t t, i, best, p, j
    cdef f64 best_delta, d, sign
    cdef i64 oldest, tenure

    with nogil:
        for t in range(max_moves):
            best = -1
            best_delta = 0.0
            for i in range(n):
                if tabu_until[i] <= mc or cur + delta[i] < global_best:
                    if best < 0 or delta[i] < best_delta:
                        best = i
                        best_delta = delta[i]
            if best < 0:
                # Everything is tabu and nothing aspirates: take the move
                # whose tabu expires soonest, ties by delta then index.
                oldest = tabu_until[0]
                for i in range(1, n):
                    if tabu_until[i] < oldest:
                        oldest = tabu_until[i]
                for i in range(n):
                    if tabu_until[i] == oldest and (best < 0 or delta[i] < best_delta):
                        best = i
                        best_delta = delta[i]

            d = delta[best]
            sign = 1.0 - 2.0 * x[best]
            x[best] ^= 1
            cur += d
            delta[best] = -d
            for p in range(indptr[best], indptr[best + 1]):
                j = indices[p]
                delta[j] += (1.0 - 2.0 * x[j]) * data[p] * sign

            tenure = <i64>(tenure_base * (0.75 + 0.5 * rands[t]) + 0.5)
            if tenure < 1:
                tenure = 1
            tabu_until[best] = mc + 1 + tenure
            mc += 1
            moves_done = t + 1

            if cur <= inc:
                event_energy[n_events] = cur
                event_move[n_events] = mc
                for j in range(n):
                    event_bits[n_events, j] = x[j]
                n_events += 1
            if cur < inc:
                inc = cur
                non_improving = 0
            else:
                non_improving += 1
            if non_improving >= stagnation_limit:
                stalled = True
                break

    fstate[0] = cur
    fstate[1] = inc
    istate[0] = mc
    istate[1] = non_improving
    return moves_done, n_events, stalled
