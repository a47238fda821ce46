"""Numerical inner-loop kernels with a compiled fast path.

The Cython extension (`_fast`) is optional: if it was not built, or if the
``AFFECTPIPE_PURE`` environment variable is set to a non-empty value, the
pure-numpy implementation (`_pure`) is used instead. Both backends implement
the same operations with the same floating-point expression order, so results
agree bit-for-bit (integer outputs) or to the last few ulps (float outputs).
"""

import os

if os.environ.get("AFFECTPIPE_PURE"):
    from . import _pure as _impl

    USING_COMPILED = False
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]

        USING_COMPILED = True
    except ImportError:
        from . import _pure as _impl

        USING_COMPILED = False

moving_average = _impl.moving_average
joint_hist = _impl.joint_hist
local_maxima = _impl.local_maxima
bilinear_resize = _impl.bilinear_resize


def backend_name() -> str:
    return "compiled" if USING_COMPILED else "pure"
