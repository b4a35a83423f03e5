"""Pick the loop implementation at import time.

The compiled kernels are used when they were built; ``PARAMCTL_BACKEND=python``
forces the pure-Python twin (useful for debugging and for the equivalence
tests), ``PARAMCTL_BACKEND=cython`` makes a missing extension an error.
"""
import os

from . import _pykernels

_choice = os.environ.get("PARAMCTL_BACKEND", "").strip().lower()

kernels = _pykernels
NAME = "python"
if _choice != "python":
    try:
        from . import _ckernels as kernels
        NAME = "cython"
    except ImportError:
        if _choice == "cython":
            raise
        kernels = _pykernels


def compiled():
    """The compiled kernel module, or None when it is unavailable."""
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels
