"""Select the kernel implementation at import time.

The compiled extension is used when it imports; ``CWNET_BACKEND=python``
forces the fallback and ``CWNET_BACKEND=compiled`` makes a missing extension
an error.
"""
import os

from . import _fallback

_choice = os.environ.get("CWNET_BACKEND", "").strip().lower()

if _choice == "python":
    kernels = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        kernels = _fallback
        BACKEND = "python"

householder_tridiagonal = kernels.householder_tridiagonal
tql_implicit = kernels.tql_implicit
cycle_flags = kernels.cycle_flags
lloyd = kernels.lloyd
