"""Propagation kernel selection: compiled extension with python fallback.

``propagate`` is re-exported from the Cython extension when it built
successfully, otherwise from the numpy reference implementation.  Set the
environment variable ``CCAQED_FORCE_PY_KERNEL=1`` to force the fallback
(useful for benchmarking and cross-checking).
"""

from __future__ import annotations

import os

if os.environ.get("CCAQED_FORCE_PY_KERNEL"):
    from . import _kernel_py as _impl
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as _impl

propagate = _impl.propagate
BACKEND = _impl.BACKEND

__all__ = ["propagate", "BACKEND"]
