import numpy as np
import pytest

from hslab import kernels
from hslab.riccati import flow_closed_form, flow_numeric_trace

needs_cython = pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="extension not built")


def _pair(rng, d=5):
    Q = np.linalg.qr(rng.standard_normal((d, d)))[0]
    lams = rng.uniform(-2, 2, d)
    kaps = np.array([-1.0] * (d - 1) + [-4.0])
    return Q @ np.diag(lams) @ Q.T, Q @ np.diag(kaps) @ Q.T, lams, kaps, Q


@pytest.mark.parametrize("backend", sorted(kernels.BACKENDS))
def test_backend_matches_closed_form(backend, rng):
    A0, K, lams, kaps, Q = _pair(rng)
    times = [0.05, 0.1, 0.2]
    for t, A in zip(times, flow_numeric_trace(A0, K, times, backend=backend)):
        exact = Q @ np.diag([flow_closed_form(l, k, t) for l, k in zip(lams, kaps)]) @ Q.T
        assert np.max(np.abs(A - exact)) < 1e-9


@needs_cython
def test_backends_agree(rng):
    for _ in range(10):
        A0, K, *_ = _pair(rng)
        a = kernels.BACKENDS["python"](A0, K, 0.0, 0.2, 1e-2, 1e-12, 1e6, 1e-14)
        b = kernels.BACKENDS["cython"](A0, K, 0.0, 0.2, 1e-2, 1e-12, 1e6, 1e-14)
        assert a[3] == b[3] == kernels.OK
        assert np.max(np.abs(a[0] - b[0])) < 1e-12


@pytest.mark.parametrize("backend", sorted(kernels.BACKENDS))
def test_backend_reports_blowup(backend):
    A0 = np.array([[5.0 / 3.0]])
    K = np.array([[-1.0]])
    A, t, _, status, _ = kernels.BACKENDS[backend](A0, K, 0.0, 1.0, 1e-2, 1e-12, 1e6, 1e-14)
    assert status == kernels.BLOWUP
    assert 0.69 < t < np.log(2)


def test_env_selects_fallback(monkeypatch):
    import importlib

    monkeypatch.setenv("HSLAB_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("HSLAB_PURE_PYTHON")
        importlib.reload(kernels)


def test_dispatch_above_compiled_limit(rng):
    d = kernels.COMPILED_MAX_DIM + 5
    A0, K, lams, kaps, Q = _pair(rng, d)
    A = flow_numeric_trace(A0, K, [0.1])[0]
    exact = Q @ np.diag([flow_closed_form(l, k, 0.1) for l, k in zip(lams, kaps)]) @ Q.T
    assert np.max(np.abs(A - exact)) < 1e-9
