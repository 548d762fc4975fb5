"""Riccati evolution of shape operators along normal geodesics.

Along a unit-speed geodesic in the normal direction, with the Jacobi
operator K held fixed in a parallel frame, the shape operator obeys

    A'(t) = A(t)^2 + K.

On a common eigenline of A and K each principal curvature follows the
scalar equation lambda' = lambda^2 + kappa, solved here in closed form.
The matrix equation is integrated numerically by ``hslab.kernels``.

Orientation: the normal points towards the focal submanifold, so
focalizing curvatures are positive and blow up as c coth(c (theta - t)).
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import FocalPointEncountered, IntegrationError, InvalidArgumentError, InvalidRadiusError
from .spectral import SpectralData

BLOWUP_NORM = 1e6
STATIONARY_RTOL = 1e-14


class Branch(enum.Enum):
    COTH = "CothLike"
    TANH = "TanhLike"
    STATIONARY = "Stationary"
    COT = "CotLike"


def _rate(kappa: float) -> float:
    if kappa == 0:
        raise InvalidArgumentError("kappa must be nonzero")
    return math.sqrt(abs(kappa))


def _is_stationary(lambda0: float, c: float) -> bool:
    return math.isfinite(lambda0) and math.isclose(abs(lambda0), c, rel_tol=STATIONARY_RTOL)


def branch_of(lambda0: float, kappa: float) -> Branch:
    c = _rate(kappa)
    if kappa > 0:
        return Branch.COT
    if _is_stationary(lambda0, c):
        return Branch.STATIONARY
    return Branch.COTH if abs(lambda0) > c else Branch.TANH


def _cot_theta(lambda0: float, c: float) -> float:
    """First forward blow-up of c cot(c (theta - t)), in (0, pi/c]."""
    theta = (math.pi / 2 - math.atan(lambda0 / c)) / c if math.isfinite(lambda0) else math.pi / c
    return theta if theta > 0 else math.pi / c


def flow_closed_form(lambda0: float, kappa: float, t: float) -> float:
    """Solution of lambda' = lambda^2 + kappa with lambda(0) = lambda0.

    lambda0 may be +/-inf (the branch emanating from a focal point); the
    result is +inf exactly at a focal time.
    """
    c = _rate(kappa)
    lambda0 = float(lambda0)
    if t == 0:
        return lambda0
    if kappa > 0:
        if math.isinf(lambda0):
            s = -c * t
        else:
            s = c * (_cot_theta(lambda0, c) - t)
        sn = math.sin(s)
        if s == 0 or sn == 0:
            return math.inf
        return c * math.cos(s) / sn
    if math.isinf(lambda0):
        return -c / math.tanh(c * t)
    if _is_stationary(lambda0, c):
        return lambda0
    if abs(lambda0) > c:
        s = c * (math.atanh(c / lambda0) / c - t)
        if s == 0:
            return math.inf
        return c / math.tanh(s)
    return c * math.tanh(c * (math.atanh(lambda0 / c) / c - t))


def focal_time(lambda0: float, kappa: float):
    """First t > 0 at which the branch through lambda0 blows up, or None."""
    c = _rate(kappa)
    if kappa > 0:
        return _cot_theta(float(lambda0), c)
    if math.isfinite(lambda0) and lambda0 > c and not _is_stationary(lambda0, c):
        return math.atanh(c / lambda0) / c
    return None


@dataclass(frozen=True)
class RiccatiPath:
    """One principal-curvature trajectory lambda(t) with its Jacobi eigenvalue.

    ``theta`` is the focal time for branches that blow up forward.  For
    lambda0 = +/-inf on a hyperbolic kind it is 0: the path starts on the
    focal set.
    """

    kappa: float
    lambda0: float
    branch: Branch
    theta: float | None

    @classmethod
    def from_initial(cls, lambda0: float, kappa: float) -> "RiccatiPath":
        lambda0 = float(lambda0)
        branch = branch_of(lambda0, kappa)
        if math.isinf(lambda0) and kappa < 0:
            theta = 0.0
        else:
            theta = focal_time(lambda0, kappa)
        return cls(float(kappa), lambda0, branch, theta)

    def value(self, t: float) -> float:
        return flow_closed_form(self.lambda0, self.kappa, t)

    def to_json(self) -> dict:
        return {"kappa": self.kappa, "lambda0": _json_float(self.lambda0),
                "branch": self.branch.value, "theta": self.theta}

    @classmethod
    def from_json(cls, obj: dict) -> "RiccatiPath":
        return cls(float(obj["kappa"]), float(obj["lambda0"]), Branch(obj["branch"]), obj["theta"])


def _json_float(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def jacobi_magnitude(path: RiccatiPath, t: float) -> float:
    """|E(t)| / |E(0)| = exp(-int_0^t lambda) for an eigenline Jacobi field.

    For lambda0 = +/-inf the field vanishes at t = 0 and is normalized to
    unit initial speed instead.
    """
    c = _rate(path.kappa)
    lam0 = path.lambda0
    if t == 0:
        return 0.0 if math.isinf(lam0) else 1.0
    if path.branch is Branch.COT:
        if math.isinf(lam0):
            return abs(math.sin(c * t)) / c
        th = path.theta
        return abs(math.sin(c * (th - t)) / math.sin(c * th))
    if math.isinf(lam0):
        return math.sinh(c * t) / c
    if path.branch is Branch.STATIONARY:
        return math.exp(-lam0 * t)
    if path.branch is Branch.COTH:
        th = math.atanh(c / lam0) / c
        return abs(math.sinh(c * (th - t)) / math.sinh(c * th))
    th = math.atanh(lam0 / c) / c
    return math.cosh(c * (th - t)) / math.cosh(c * th)


# ---------------------------------------------------------------------------
# numeric matrix flow


def _check_pair(A0, K):
    A0 = np.array(A0, dtype=float)
    K = np.array(K, dtype=float)
    if A0.ndim != 2 or A0.shape[0] != A0.shape[1] or A0.shape != K.shape:
        raise InvalidArgumentError("A0 and K must be square matrices of equal size")
    if not np.all(np.isfinite(A0)):
        raise InvalidArgumentError("numeric flow does not accept infinite curvatures")
    return 0.5 * (A0 + A0.T), 0.5 * (K + K.T)


def _refine_focal_time(t: float, A: np.ndarray, K: np.ndarray) -> float:
    """Locate the zero of 1/lambda for the blowing-up eigenline by bisection.

    The top eigenpair (mu, v) of A and kappa = <Kv, v> define the scalar
    branch b(s) = 1/lambda(s), smooth through the focal point.
    """
    w, V = np.linalg.eigh(A)
    mu, v = w[-1], V[:, -1]
    kappa = float(v @ K @ v)

    def b(s):
        # b' = -1 - kappa b^2, integrated in closed form via the eigenline branch
        lam = flow_closed_form(mu, kappa, s) if kappa != 0 else mu / (1.0 - mu * s)
        return 0.0 if math.isinf(lam) else 1.0 / lam

    lo, hi = 0.0, 4.0 / mu
    while b(hi) > 0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if b(mid) > 0:
            lo = mid
        else:
            hi = mid
    return t + 0.5 * (lo + hi)


def flow_numeric_trace(
    A0,
    K,
    times: Sequence[float],
    rtol: float = 1e-12,
    blowup: float = BLOWUP_NORM,
    backend: str | None = None,
) -> list[np.ndarray]:
    """A(t) for each t in increasing ``times`` (all >= 0).

    Raises
    ------
    FocalPointEncountered
        When max|A| exceeds ``blowup``; carries the estimated focal time.
    """
    A, K = _check_pair(A0, K)
    integrate = kernels.BACKENDS[backend] if backend else kernels.riccati_integrate
    times = [float(t) for t in times]
    if any(t < 0 for t in times) or any(b < a for a, b in zip(times, times[1:])):
        raise InvalidArgumentError("times must be nonnegative and nondecreasing")
    t = 0.0
    h = 1e-2
    out = []
    for target in times:
        if target > t:
            A, t_new, h, status, _ = integrate(A, K, t, target, h, rtol, blowup, 1e-14)
            if status == kernels.BLOWUP:
                raise FocalPointEncountered(_refine_focal_time(t_new, A, K), t_new, A)
            if status == kernels.UNDERFLOW:
                raise IntegrationError(f"step size underflow at t = {t_new!r}")
            t = target
        out.append(A.copy())
    return out


def flow_numeric(A0, K, t: float, rtol: float = 1e-12, blowup: float = BLOWUP_NORM, backend=None) -> np.ndarray:
    """Numeric solution of A' = A^2 + K at time t (symmetric)."""
    if t == 0:
        return _check_pair(A0, K)[0]
    return flow_numeric_trace(A0, K, [t], rtol, blowup, backend)[0]


# ---------------------------------------------------------------------------
# tubes


def tube_spectrum_from_focal(
    focal_tangent_spectrum: Iterable[tuple[float, int, float]],
    normal_multiplicities: Iterable[tuple[float, int]],
    t: float,
    totally_real: bool = False,
) -> SpectralData:
    """Principal curvatures of the tube of radius t around a focal submanifold.

    Parameters
    ----------
    focal_tangent_spectrum : iterable of (lambda, multiplicity, kappa)
        Shape operator eigenvalues of the focal submanifold P in the outward
        direction, with the Jacobi eigenvalue of each eigenline.
    normal_multiplicities : iterable of (kappa, multiplicity)
        Normal directions of P other than the geodesic direction; each
        starts at lambda = -inf.
    t : float
        Tube radius.
    totally_real : bool
        J exchanges the tangent and normal D-directions of P (e.g. RH^n in
        CH^n); otherwise J preserves both and eigenspaces are self-paired.

    The outward flows are negated so the tube normal points towards P.
    """
    tangent = [(float(l), int(m), float(k)) for l, m, k in focal_tangent_spectrum]
    normal = [(float(k), int(m)) for k, m in normal_multiplicities]
    if t <= 0:
        raise InvalidRadiusError(f"tube radius must be positive, got {t!r}")
    branches = [(lam, m, k, "t") for lam, m, k in tangent] + [(-math.inf, m, k, "n") for k, m in normal]
    kappas = {k for _, m, k, _ in branches if m > 0}
    signs = {math.copysign(1.0, k) for k in kappas}
    if len(signs) != 1:
        raise InvalidArgumentError("Jacobi eigenvalues must share one sign")
    eps = int(signs.pop())
    for lam, m, k, _ in branches:
        th = focal_time(lam, k)
        if m > 0 and th is not None and th <= t:
            raise InvalidRadiusError(f"radius {t!r} reaches a focal point at {th!r}")
    alphas, d_entries, d_origin = [], [], []
    for lam, m, k, where in branches:
        if m == 0:
            continue
        v = -flow_closed_form(lam, k, t)
        if abs(k) == 4.0:
            alphas.extend([v] * m)
        else:
            d_entries.append((v, m))
            d_origin.append(where)
    hdim = len(alphas)
    if hdim not in (1, 3):
        raise InvalidArgumentError(f"expected 1 or 3 Hopf directions, found {hdim}")
    total = sum(m for _, m in d_entries) + hdim + 1
    n = total // 4 if hdim == 3 else total // 2
    rows = []
    if totally_real:
        tan_idx = [i for i, w in enumerate(d_origin) if w == "t"]
        nor_idx = [i for i, w in enumerate(d_origin) if w == "n"]
        if len(tan_idx) != len(nor_idx) or any(d_entries[i][1] != d_entries[j][1] for i, j in zip(tan_idx, nor_idx)):
            raise InvalidArgumentError("totally real focal set needs matching tangent/normal multiplicities")
        for i, j in zip(tan_idx, nor_idx):
            rows.extend([(i, j)] * d_entries[i][1])
    else:
        for i, (_, m) in enumerate(d_entries):
            if m % 2:
                raise InvalidArgumentError("J-invariant eigenspaces have even multiplicity")
            rows.extend([(i, i)] * (m // 2))
    pairings = tuple(tuple(rows) for _ in range(hdim))
    return SpectralData(tuple(alphas), tuple(d_entries), pairings, n, eps, hdim == 3)


def flow_spectral_data(data: SpectralData, t: float) -> SpectralData:
    """Flow every principal curvature of Hopf data by t (closed form)."""
    eps = data.epsilon
    theta = min(_data_focal_times(data))
    if t >= theta:
        raise FocalPointEncountered(theta, t, None)
    alphas = tuple(flow_closed_form(a, 4.0 * eps, t) for a in data.alphas)
    d = tuple((flow_closed_form(lam, 1.0 * eps, t), m) for lam, m in data.d_spectrum)
    return SpectralData(alphas, d, data.pairings, data.n, eps, data.quaternionic)


def _data_focal_times(data: SpectralData) -> list[float]:
    eps = data.epsilon
    ts = [focal_time(a, 4.0 * eps) for a in data.alphas]
    ts += [focal_time(lam, 1.0 * eps) for lam, _ in data.d_spectrum]
    return [x for x in ts if x is not None] or [math.inf]


def first_focal_time(data: SpectralData):
    th = min(_data_focal_times(data))
    return None if math.isinf(th) else th


def write_trace_csv(path_or_file, times: Sequence[float], rows: Sequence[Sequence[float]], extra=None):
    """CSV with columns t, lambda_1..lambda_d (and optional extra columns)."""
    extra = extra or {}
    d = len(rows[0]) if rows else 0
    header = ["t"] + [f"lambda_{i + 1}" for i in range(d)] + list(extra)
    own = isinstance(path_or_file, str)
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for k, (t, row) in enumerate(zip(times, rows)):
            w.writerow([format(t, ".17g")] + [format(x, ".17g") for x in row]
                       + [format(extra[c][k], ".17g") for c in extra])
    finally:
        if own:
            fh.close()
