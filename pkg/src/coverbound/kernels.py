"""Backend selection for the search kernels.

The compiled extension is used when it imports; setting
``COVERBOUND_PURE_PYTHON=1`` forces the pure-Python fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

FOUND, INFEASIBLE, BUDGET = _kernels_py.FOUND, _kernels_py.INFEASIBLE, _kernels_py.BUDGET

_compiled = None
if not os.environ.get("COVERBOUND_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled  # type: ignore[no-redef]
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _kernels_py

cover_search = _impl.cover_search
max_n_independent = _impl.max_n_independent
