"""Pick the simulation kernel at import time.

The compiled extension is preferred; setting ``INFOBATTERY_PURE_PYTHON=1``
or a missing build falls back to the pure-Python kernel.
"""

from __future__ import annotations

import os

from . import _kernel_py

try:
    from . import _kernel as _compiled
except ImportError:  # extension not built
    _compiled = None

KERNELS = {"python": _kernel_py.run_kernel}
if _compiled is not None:
    KERNELS["cython"] = _compiled.run_kernel

if os.environ.get("INFOBATTERY_PURE_PYTHON") or _compiled is None:
    BACKEND = "python"
else:
    BACKEND = "cython"


def get_kernel(name: str | None = None):
    name = name or BACKEND
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(f"kernel {name!r} unavailable; have {sorted(KERNELS)}") from None
