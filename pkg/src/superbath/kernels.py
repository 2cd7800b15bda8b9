"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the numpy
implementation is used.  Set ``SUPERBATH_BACKEND=numpy`` to force the
fallback.
"""

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and os.environ.get("SUPERBATH_BACKEND", "").lower() != "numpy":
    _active = _compiled
else:
    _active = _kernels_py

BACKEND = _active.BACKEND
lattice_sum = _active.lattice_sum

__all__ = ["BACKEND", "lattice_sum", "available_backends"]


def available_backends():
    """Mapping backend name -> lattice_sum implementation."""
    out = {"numpy": _kernels_py.lattice_sum}
    if _compiled is not None:
        out["cython"] = _compiled.lattice_sum
    return out
