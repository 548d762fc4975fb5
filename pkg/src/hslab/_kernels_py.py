"""Pure-Python (numpy) twin of the compiled Riccati kernel in _ckernels.pyx.

Both expose ``riccati_integrate`` with the same signature and status codes;
``hslab.kernels`` picks one at import time.
"""

import numpy as np

OK = 0
BLOWUP = 1
UNDERFLOW = 2


def _rk4(A, K, h):
    k1 = A @ A + K
    B = A + 0.5 * h * k1
    k2 = B @ B + K
    B = A + 0.5 * h * k2
    k3 = B @ B + K
    B = A + h * k3
    k4 = B @ B + K
    return A + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def riccati_integrate(A0, K, t0, t1, h, rtol, blowup, hmin):
    """Integrate A' = A^2 + K from t0 towards t1 (t1 > t0).

    Step doubling: one step of size h is compared against two of size h/2;
    the step is accepted when the max-norm difference, relative to
    max(1, |A|), is at most rtol, and halved otherwise.

    Returns
    -------
    (A, t, h_next, status, nsteps)
        ``status`` is OK when t1 was reached, BLOWUP when max|A| exceeded
        ``blowup`` (A, t are then the first offending state), UNDERFLOW when
        the step size fell below ``hmin``.
    """
    A = np.array(A0, dtype=float)
    K = np.asarray(K, dtype=float)
    t = float(t0)
    nsteps = 0
    while t < t1:
        hs = min(h, t1 - t)
        big = _rk4(A, K, hs)
        half = _rk4(_rk4(A, K, 0.5 * hs), K, 0.5 * hs)
        scale = max(1.0, float(np.max(np.abs(half))))
        err = float(np.max(np.abs(half - big))) / scale
        if not np.isfinite(err) or err > rtol:
            h = 0.5 * hs
            if h < hmin:
                return A, t, h, UNDERFLOW, nsteps
            continue
        A = 0.5 * (half + half.T)
        t = t1 if hs == t1 - t else t + hs
        nsteps += 1
        if err == 0.0:
            grow = 2.0
        else:
            grow = min(2.0, max(1.0, 0.9 * (rtol / err) ** 0.2))
        h = hs * grow if hs == h else max(h, hs)
        if np.max(np.abs(A)) > blowup:
            return A, t, h, BLOWUP, nsteps
    return A, t, h, OK, nsteps
