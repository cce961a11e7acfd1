"""Kernel backend selection.

The compiled Cython core is used when importable; otherwise the pure-numpy
fallback takes over.  Set POLARFB_PURE_KERNELS=1 to force the fallback.
"""

import os

from . import pure


def load_compiled():
    """Return the compiled kernel module, or None if it is not built."""
    try:
        from . import _core
        return _core
    except ImportError:
        return None


if os.environ.get("POLARFB_PURE_KERNELS") == "1":
    impl = pure
else:
    impl = load_compiled() or pure

BACKEND = "compiled" if impl.IS_COMPILED else "pure"
