"""Tabu-sweep kernels: compiled extension with a pure-Python fallback.

Both implementations expose the same two functions and identical move
semantics, so a run is reproducible regardless of which one is active:

- ``recompute_state(diag, indptr, indices, data, x, delta) -> energy``
- ``sweep(...) -> (moves_done, n_events, stalled)``

Selection happens at import: the Cython extension is used when built,
unless ``QREADY_PURE_PYTHON=1`` forces the fallback (useful for debugging
and for the kernel benchmark).
"""

import os

from . import _tabu_py

if os.environ.get("QREADY_PURE_PYTHON", "") == "1":
    _impl = _tabu_py
else:
    try:
        from . import _tabu_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _tabu_py

recompute_state = _impl.recompute_state
sweep = _impl.sweep

KERNEL_NAME = "cython" if _impl.__name__.endswith("_tabu_cy") else "python"


def available_kernels() -> dict[str, object]:
    """Map of importable kernel implementations, for tests and benchmarks."""
    impls: dict[str, object] = {"python": _tabu_py}
    try:
        from . import _tabu_cy

        impls["cython"] = _tabu_cy
    except ImportError:
        pass
    return impls
