"""Kernel backend selection.

Prefers the compiled extension when it was built, falling back to the numpy
implementation.  Set GEOFORGE_PURE=1 to force the fallback (the bench-kernels
command uses this to compare the two).
"""

import os

from . import _match_core_py

if os.environ.get("GEOFORGE_PURE"):
    _backend = _match_core_py
else:
    try:
        from . import _match_core as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = _match_core_py

BACKEND = _backend.NAME
angle_table = _backend.angle_table
dist_table = _backend.dist_table
eqangle_mask = _backend.eqangle_mask
eqratio_mask = _backend.eqratio_mask


def backends():
    """All importable backends, name -> module (for parity tests/benches)."""
    out = {"python": _match_core_py}
    try:
        from . import _match_core
        out["cython"] = _match_core
    except ImportError:
        pass
    return out
