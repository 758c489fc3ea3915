"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it was built; otherwise the
numpy versions in ``_pykernels`` are used. Set ``IXFOOTPRINT_PURE=1`` to force
the numpy path.
"""
import os

from . import _pykernels

if os.environ.get("IXFOOTPRINT_PURE", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND
project_batch = _impl.project_batch
hull_coverage = _impl.hull_coverage
