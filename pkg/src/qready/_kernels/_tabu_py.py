"""Pure-Python (numpy) tabu-sweep kernel, the fallback implementation.

Move semantics must stay in lockstep with ``_tabu_cy.pyx``: on integer
instances the two produce bit-identical walks.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp


def recompute_state(diag, indptr, indices, data, x, delta):
    """Fill ``delta`` with all single-flip deltas for ``x``; return its energy.

    ``indptr/indices/data`` is the symmetric CSR adjacency over off-diagonal
    couplings (each pair stored in both rows).
    """
    xf = x.astype(np.float64)
    n = x.shape[0]
    adj = sp.csr_matrix((data, indices, indptr), shape=(n, n))
    neigh = adj.dot(xf)
    delta[:] = (1.0 - 2.0 * xf) * (diag + neigh)
    return float(np.dot(diag, xf) + 0.5 * np.dot(neigh, xf))


def sweep(
    indptr,
    indices,
    data,
    x,
    delta,
    tabu_until,
    fstate,
    istate,
    rands,
    tenure_base,
    stagnation_limit,
    global_best,
    event_energy,
    event_move,
    event_bits,
):
    """Run up to ``len(rands)`` tabu moves; record pool-push events.

    State vectors: ``fstate = [current_energy, walk_incumbent_energy]`` and
    ``istate = [move_counter, non_improving_moves]``, both updated in place.
    An event is recorded whenever the post-move energy ties or beats the
    walk incumbent.  Returns ``(moves_done, n_events, stalled)`` where
    ``stalled`` signals the caller to restart from a fresh assignment.
    """
    max_moves = rands.shape[0]
    cur = float(fstate[0])
    inc = float(fstate[1])
    mc = int(istate[0])
    non_improving = int(istate[1])
    n_events = 0
    stalled = False
    moves_done = 0

    for t in range(max_moves):
        admissible = np.where(
            (tabu_until <= mc) | (cur + delta < global_best), delta, np.inf
        )
        best = int(np.argmin(admissible))
        if not np.isfinite(admissible[best]):
            # Everything is tabu and nothing aspirates: take the move whose
            # tabu expires soonest, breaking ties by delta then index.
            oldest = tabu_until == tabu_until.min()
            best = int(np.argmin(np.where(oldest, delta, np.inf)))

        d = float(delta[best])
        sign = 1.0 - 2.0 * float(x[best])
        x[best] ^= 1
        cur += d
        delta[best] = -d
        lo, hi = int(indptr[best]), int(indptr[best + 1])
        if hi > lo:
            cols = indices[lo:hi]
            delta[cols] += (1.0 - 2.0 * x[cols].astype(np.float64)) * data[lo:hi] * sign

        tenure = int(tenure_base * (0.75 + 0.5 * float(rands[t])) + 0.5)
        if tenure < 1:
            tenure = 1
        tabu_until[best] = mc + 1 + tenure
        mc += 1
        moves_done = t + 1

        if cur <= inc:
            event_energy[n_events] = cur
            event_move[n_events] = mc
            event_bits[n_events, :] = x
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
