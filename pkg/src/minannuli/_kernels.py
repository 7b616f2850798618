"""Select the compiled kernels when available, else the numpy fallbacks.

Set ``MINANNULI_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("MINANNULI_PURE_PYTHON") != "1":
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels
    else:
        BACKEND = "cython"
else:
    _impl = _pykernels

sturm_count = _impl.sturm_count
graph_assemble = _impl.graph_assemble
area_assemble = _impl.area_assemble

__all__ = ["BACKEND", "sturm_count", "graph_assemble", "area_assemble"]
