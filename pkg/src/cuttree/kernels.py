"""Backend selection for the hot loops.

The compiled extension is used when it imports; setting ``CUTTREE_PURE=1``
forces the pure-Python fallback.  Both backends produce identical output.
"""
import os

from . import _pykernels as python

compiled = None
if not os.environ.get("CUTTREE_PURE"):
    try:
        from . import _kernels as compiled
    except ImportError:
        compiled = None

_impl = compiled if compiled is not None else python
BACKEND = "cython" if compiled is not None else "python"

ab_walk = _impl.ab_walk
cut_one = _impl.cut_one
