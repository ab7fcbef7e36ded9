"""Selects the compiled force kernels when available.

Set ``STCUBE_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

from . import _kernels_py

if os.environ.get("STCUBE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "numpy"
repulsion = _impl.repulsion
attraction = _impl.attraction
simplify_mask = _impl.simplify_mask
