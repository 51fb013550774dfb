"""Backend selection for the hot right-hand-side kernels.

The environment variable SKYRME_BLOWUP_BACKEND picks the implementation:
"numba" (default; falls back to numpy if numba is unavailable) or
"numpy".  Both expose the same four functions with identical semantics.
"""

import os
import warnings

_requested = os.environ.get("SKYRME_BLOWUP_BACKEND", "numba").lower()

if _requested == "numba":
    try:
        from . import _numba as _impl

        backend = "numba"
    except ImportError:
        warnings.warn("numba unavailable; falling back to the numpy backend")
        from . import _numpy as _impl

        backend = "numpy"
elif _requested == "numpy":
    from . import _numpy as _impl

    backend = "numpy"
else:
    raise ValueError(
        f"SKYRME_BLOWUP_BACKEND={_requested!r} not recognized; "
        "use 'numba' or 'numpy'"
    )

strong_field_psi = _impl.strong_field_psi
full_psi = _impl.full_psi
semilinear_u = _impl.semilinear_u
similarity = _impl.similarity
