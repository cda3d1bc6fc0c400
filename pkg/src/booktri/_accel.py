"""Backend selection for the counting kernels.

The hot loops live in ``_kernels_nb`` (numba, compiled on first use) and
``_kernels_np`` (plain numpy).  Numba is used when it imports and the
environment variable ``BOOKTRI_NO_NUMBA`` is unset or falsy.
"""
from __future__ import annotations

import os
import warnings

# numba probes an old system TBB and warns; the workqueue/omp layers are fine
warnings.filterwarnings("ignore", message="The TBB threading layer")

_FALSY = {"", "0", "false", "no", "off"}

DISABLED = os.environ.get("BOOKTRI_NO_NUMBA", "").strip().lower() not in _FALSY

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not DISABLED

BACKEND = "numba" if USE_NUMBA else "numpy"


def default_workers() -> int:
    """Worker count from ``BOOKTRI_WORKERS``, else 1."""
    raw = os.environ.get("BOOKTRI_WORKERS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
