"""Kernel backend selection.

Imports the compiled extension when present, falling back to the pure-numpy
implementation otherwise.  ``CDSIM_PURE_PYTHON=1`` forces the fallback (used
by the parity tests and the benchmark).  Both backends are bit-identical for
the same seed, so the choice never affects results, only speed.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("CDSIM_PURE_PYTHON", "") == "1":
    kernels = _kernels_py
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _kernels_py


def backend_name() -> str:
    return kernels.BACKEND


def trend_step(*args, **kwargs):
    return kernels.trend_step(*args, **kwargs)
