"""Kernel backend selection.

The compiled extension (`neuropop._core`) is preferred; the pure-numpy
module (`neuropop._kernels_np`) is the fallback. Set NEUROPOP_BACKEND to
"numpy" or "cython" to force a choice.
"""

import os


def load_backend(name=None):
    """Return the kernel module for `name` ("cython", "numpy" or None=auto)."""
    if name is None:
        name = os.environ.get("NEUROPOP_BACKEND", "auto")
    if name == "numpy":
        from neuropop import _kernels_np
        return _kernels_np
    if name == "cython":
        from neuropop import _core
        return _core
    if name == "auto":
        try:
            from neuropop import _core
            return _core
        except ImportError:
            from neuropop import _kernels_np
            return _kernels_np
    raise ValueError(f"unknown backend {name!r} (expected cython, numpy or auto)")


kernels = load_backend()
BACKEND_NAME = kernels.BACKEND_NAME
