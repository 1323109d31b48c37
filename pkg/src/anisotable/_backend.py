"""Backend selection: numba kernels by default, pure numpy on request.

ANISOTABLE_NUMBA=0 (or numba being unimportable) selects the vectorized
numpy path engine; any other value, or unset, selects the @njit kernels.
The choice is made once at import; both engines implement identical
semantics and are cross-checked statistically in the test suite.
"""

from __future__ import annotations

import os

_flag = os.environ.get("ANISOTABLE_NUMBA", "").strip().lower()

if _flag in ("0", "false", "off", "no"):
    HAVE_NUMBA = False
else:
    try:
        import numba  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        HAVE_NUMBA = False


def backend_name() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
