"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``BSTUNNEL_DISABLE_NUMBA`` is unset (or ``0``/``false``).  Both
paths expose identical signatures, so callers only import from here.
"""

import importlib
import os

from . import numpy_impl

_flag = os.environ.get("BSTUNNEL_DISABLE_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

numba_impl = None
if not _disabled:
    try:
        numba_impl = importlib.import_module(".numba_impl", __name__)
    except ImportError:  # pragma: no cover - numba missing
        numba_impl = None

BACKEND = "numba" if numba_impl is not None else "numpy"
_impl = numba_impl if numba_impl is not None else numpy_impl

e1 = _impl.e1
e1_scaled = _impl.e1_scaled
laplace_product = _impl.laplace_product
count_hits = _impl.count_hits

__all__ = [
    "BACKEND",
    "count_hits",
    "e1",
    "e1_scaled",
    "laplace_product",
    "numba_impl",
    "numpy_impl",
]
