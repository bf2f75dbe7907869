"""Hot kernels with two interchangeable backends.

The numba backend is used by default. Set ``DESDEC_NUMBA=0`` to force the
pure numpy one (also used automatically when numba cannot be imported).
Both produce identical outputs.
"""

import os

from . import _numpy

numpy_backend = _numpy
numba_backend = None

_want_numba = os.environ.get("DESDEC_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

try:
    from . import _numba as numba_backend  # noqa: F811
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_backend = None

if _want_numba and numba_backend is not None:
    active = numba_backend
    BACKEND = "numba"
else:
    active = _numpy
    BACKEND = "numpy"

canonical_blocks = active.canonical_blocks
refine_partition = active.refine_partition
greatest_simulation = active.greatest_simulation
dc3_search = active.dc3_search

__all__ = [
    "BACKEND",
    "active",
    "numpy_backend",
    "numba_backend",
    "canonical_blocks",
    "refine_partition",
    "greatest_simulation",
    "dc3_search",
]
