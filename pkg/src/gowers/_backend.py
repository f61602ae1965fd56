"""Kernel selection.

The compiled extension is used when it imports; setting the environment
variable ``GOWERS_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_compiled = None

if os.environ.get("GOWERS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _compiled = None


def cubic_convolution(fs, add, shifts, backend=None):
    backend = backend or BACKEND
    fs = np.ascontiguousarray(fs)
    if backend == "compiled" and _compiled is not None and not np.iscomplexobj(fs):
        return _compiled.cubic_convolution(
            np.ascontiguousarray(fs, dtype=np.float64),
            np.ascontiguousarray(add, dtype=np.int32),
            np.ascontiguousarray(shifts, dtype=np.int32),
        )
    return _kernels_py.cubic_convolution(fs, add, shifts)


def available_backends():
    return ["python"] + (["compiled"] if _compiled is not None else [])
