"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``DTQUIVER_PURE_PYTHON=1`` to force the fallback.
"""
import os

if os.environ.get("DTQUIVER_PURE_PYTHON"):
    from . import _kernels as kernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:
        from . import _kernels as kernels

BACKEND = kernels.BACKEND
