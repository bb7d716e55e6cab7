"""Kernel backend selection.

``PECFDTD_BACKEND=numpy`` forces the pure-numpy kernels; the default uses
numba when it can be imported.
"""

import os

_requested = os.environ.get("PECFDTD_BACKEND", "numba").strip().lower()

if _requested not in ("numba", "numpy"):
    raise ImportError(f"PECFDTD_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

kernels = None
if _requested == "numba":
    try:
        from . import _numba_kernels as kernels
    except ImportError:  # numba missing
        kernels = None
if kernels is None:
    from . import _numpy_kernels as kernels

NAME = "numba" if kernels.__name__.endswith("_numba_kernels") else "numpy"
