"""Select the compiled kernels when available, else the numpy fallback.

Set ``GBM_EXFUN_BACKEND=python`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("GBM_EXFUN_BACKEND", "").lower() == "python":
    kernels = _kernels_py
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        kernels = _kernels_py

BACKEND = kernels.BACKEND_NAME


def thread_count():
    """Thread cap from ``GBM_EXFUN_THREADS`` (0 or unset means all cores)."""
    raw = os.environ.get("GBM_EXFUN_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"GBM_EXFUN_THREADS must be a nonnegative integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"GBM_EXFUN_THREADS must be >= 0, got {raw!r}")
    return n if n > 0 else (os.cpu_count() or 1)
