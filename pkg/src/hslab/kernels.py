"""Backend selection for the hot Riccati kernel.

The compiled extension ``hslab._ckernels`` is used when it imports; otherwise
the numpy implementation in ``hslab._kernels_py`` takes over.  Setting
``HSLAB_PURE_PYTHON=1`` forces the fallback.  The compiled kernel uses plain
loops for matrix products, so above ``COMPILED_MAX_DIM`` the numpy path
(BLAS) wins and is used instead.
"""

import os

from . import _kernels_py

OK = _kernels_py.OK
BLOWUP = _kernels_py.BLOWUP
UNDERFLOW = _kernels_py.UNDERFLOW

BACKENDS = {"python": _kernels_py.riccati_integrate}

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
else:
    BACKENDS["cython"] = _ckernels.riccati_integrate

if _ckernels is not None and os.environ.get("HSLAB_PURE_PYTHON", "") in ("", "0"):
    BACKEND = "cython"
else:
    BACKEND = "python"

COMPILED_MAX_DIM = 24


def riccati_integrate(A0, K, t0, t1, h, rtol, blowup, hmin):
    """Integrate A' = A^2 + K from t0 towards t1 with the preferred backend.

    Returns (A, t, h_next, status, nsteps); status is OK, BLOWUP or UNDERFLOW.
    """
    name = BACKEND if A0.shape[0] <= COMPILED_MAX_DIM else "python"
    return BACKENDS[name](A0, K, t0, t1, h, rtol, blowup, hmin)
