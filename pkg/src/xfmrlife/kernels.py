"""Backend selection for the hot loops.

The compiled ``_kernels`` extension is used when it imports; otherwise, or
when ``XFMRLIFE_PURE_PYTHON=1`` is set, the numpy fallback is used. Both
expose ``thermal_path``, ``aging_factors``, ``repair_and_score`` and ``run_ga``.
"""

import os

from . import _kernels_py

if os.environ.get("XFMRLIFE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

thermal_path = _impl.thermal_path
aging_factors = _impl.aging_factors
repair_and_score = _impl.repair_and_score
run_ga = _impl.run_ga


def backends():
    """All importable backends as ``{name: module}``."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        found["cython"] = _kernels
    return found
