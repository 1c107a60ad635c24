"""Numeric kernels behind the geodesic graph builders.

Two interchangeable backends: a numba-jitted one and a pure-numpy one.
Selection happens once at import time through the PL4_KERNELS environment
variable: "numba", "numpy", or "auto" (default; numba when importable).
"""

import os

_requested = os.environ.get("PL4_KERNELS", "auto").lower()
if _requested not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"PL4_KERNELS must be 'auto', 'numba' or 'numpy', got {_requested!r}"
    )

if _requested in ("auto", "numba"):
    try:
        from . import _numba_impl as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from . import _numpy_impl as _impl

        BACKEND = "numpy"
else:
    from . import _numpy_impl as _impl

    BACKEND = "numpy"

complete_edges = _impl.complete_edges
gate_chain_edges = _impl.gate_chain_edges


def backend_name():
    return BACKEND
