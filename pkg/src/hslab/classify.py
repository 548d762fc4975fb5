"""Decision procedures for the classification results on Hopf hypersurfaces.

Inputs are ``SpectralData`` (exact or extracted) and, for foliations,
radius-parameterized families of them.  Identification against the model
catalog recovers the radius from the Hopf curvature and then compares the
whole spectrum with ``models.spectrum_at``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import (
    AmbiguousFocalStructureError,
    FocalPointEncountered,
    InvalidArgumentError,
    NotApplicableError,
    NotHopfError,
    OutOfScopeError,
    UnsupportedClassificationError,
)
from .models import FocalKind, ModelFamily, catalog, mean_curvature, spectrum_at
from .riccati import flow_closed_form, flow_spectral_data, focal_time
from .spectral import (
    DEGENERATE_TOL,
    HopfClass,
    HypersurfacePoint,
    SpectralData,
    _space_of,
    extract_spectral_data,
    hopf_class_of,
    is_curvature_adapted,
    is_hopf,
    isclose_data,
    to_point,
)

MATCH_TOL = 1e-9
PE_TOL = 1e-9


class FoliationType(enum.Enum):
    REAL_HYPERBOLIC_TUBES = "RealHyperbolicTubes"
    COMPLEX_TUBES = "ComplexTubes"
    HOROSPHERICAL = "Horospherical"
    UNRECOGNIZED = "Unrecognized"


# ---------------------------------------------------------------------------
# Ricci tensor


def ricci_operator(A, U, n: int) -> np.ndarray:
    """Ricci operator of a real hypersurface of CH^n from its shape operator.

    S = -(2n+1) Id + 3 U (x) U + tr(A) A - A^2.
    """
    A = np.asarray(A, dtype=float)
    U = np.asarray(U, dtype=float)
    m = 2 * n - 1
    if A.shape != (m, m) or U.shape != (m,):
        raise InvalidArgumentError(f"expected a {m}x{m} shape operator and a length-{m} vector")
    S = -(2 * n + 1) * np.eye(m) + 3.0 * np.outer(U, U) + np.trace(A) * A - A @ A
    return 0.5 * (S + S.T)


def pseudo_einstein_check(S, U, tol: float = PE_TOL):
    """(rho, sigma) with S = rho Id + sigma U (x) U, or None."""
    S = np.asarray(S, dtype=float)
    U = np.asarray(U, dtype=float)
    Q, _ = np.linalg.qr(U[:, None], mode="complete")
    D = Q[:, 1:]
    rho = float(np.mean(np.linalg.eigvalsh(D.T @ S @ D)))
    sigma = float(U @ S @ U) - rho
    resid = np.linalg.norm(S - rho * np.eye(len(U)) - sigma * np.outer(U, U))
    if resid <= tol * (1.0 + np.linalg.norm(S)):
        return rho, sigma
    return None


def quadratic_constraint_residual(data: SpectralData, rho: float) -> float:
    """max over D-eigenvalues of |lambda^2 - m lambda + (2n + 1 + rho)|."""
    m = mean_curvature(data)
    c = 2 * data.n + 1 + rho
    return max(abs(lam * lam - m * lam + c) for lam, _ in data.d_spectrum)


def min_quadratic_constraint_residual(data: SpectralData) -> float:
    """Smallest residual over all rho (attained by centering the range)."""
    m = mean_curvature(data)
    vals = [lam * lam - m * lam for lam, _ in data.d_spectrum]
    return 0.5 * (max(vals) - min(vals))


# ---------------------------------------------------------------------------
# catalog identification


def recover_radius(alpha: float, epsilon: int):
    """Tube radius whose Hopf curvature is alpha; None for alpha = 2 (eps = -1)."""
    if epsilon > 0:
        return (math.pi / 2 - math.atan(alpha / 2.0)) / 2.0
    if abs(alpha - 2.0) <= DEGENERATE_TOL:
        return None
    if alpha > 2.0:
        return math.atanh(2.0 / alpha) / 2.0
    if alpha > 0.0:
        return math.atanh(alpha / 2.0) / 2.0
    return math.nan


def match_catalog(data: SpectralData, families: Sequence[ModelFamily] | None = None, tol: float = MATCH_TOL):
    """(family, radius) of the catalog entry reproducing ``data``, or None.

    The horosphere is reported with radius None.
    """
    space = _space_of(data)
    if families is None:
        families = catalog(space)
    r = recover_radius(data.alpha, data.epsilon)
    for fam in families:
        if fam.ambient != space:
            continue
        if not fam.is_tube:
            if r is None and isclose_data(spectrum_at(fam), data, tol):
                return fam, None
            continue
        if r is None or math.isnan(r) or r not in fam.radius_domain:
            continue
        if isclose_data(spectrum_at(fam, r), data, tol):
            return fam, r
    return None


# ---------------------------------------------------------------------------
# pseudo-Einstein


@dataclass(frozen=True)
class PseudoEinsteinResult:
    accepted: bool
    rho_sigma: tuple | None
    family: ModelFamily | None
    radius: float | None
    degenerate_candidate: float | None = None
    reason: str = ""


def _require_ch(data: SpectralData):
    if data.quaternionic or data.epsilon != -1:
        raise NotApplicableError("only defined for hypersurfaces of CH^n")


def degenerate_trace_candidate(n: int, k: int):
    """Principal curvature forced by trace and root-sum identities.

    For degenerate spectra {2, 1, lambda} with dim T_lambda = k, equating
    tr A = 2 + k lambda + (2n - 2 - k) with lambda + 1 gives
    (k - 1) lambda = k + 1 - 2n.
    """
    if k <= 1:
        return None
    return (k + 1 - 2 * n) / (k - 1)


def classify_pseudo_einstein(data: SpectralData, tol: float = MATCH_TOL) -> PseudoEinsteinResult:
    """Accept exactly the pseudo-Einstein catalog members of CH^n, n >= 3."""
    _require_ch(data)
    n = data.n
    if n < 3:
        raise OutOfScopeError("n = 2 is covered by separate classifications; need n >= 3")
    point = to_point(data)
    S = ricci_operator(point.A, point.U[0], n)
    pe = pseudo_einstein_check(S, point.U[0], PE_TOL)
    space = _space_of(data)
    allowed = [ModelFamily(space, FocalKind.POINT), ModelFamily(space, FocalKind.COMPLEX_SUB, n - 1),
               ModelFamily(space, FocalKind.HOROSPHERE)]
    cand = None
    if hopf_class_of(data) is HopfClass.DEGENERATE and len(data.d_spectrum) == 2:
        lams = [lam for lam, _ in data.d_spectrum]
        ones = [i for i, lam in enumerate(lams) if abs(lam - 1.0) <= tol]
        if len(ones) == 1:
            k = data.d_spectrum[1 - ones[0]][1]
            cand = degenerate_trace_candidate(n, k)
            if cand is not None and abs(cand) >= 1.0:
                return PseudoEinsteinResult(False, pe, None, None, cand,
                                            f"trace identity forces lambda = {cand:.6g}, |lambda| >= 1")
    match = match_catalog(data, allowed, tol)
    if match is None:
        why = "not pseudo-Einstein" if pe is None else "pseudo-Einstein spectrum outside the catalog"
        return PseudoEinsteinResult(False, pe, None, None, cand, why)
    if pe is None:
        return PseudoEinsteinResult(False, None, match[0], match[1], cand, "Ricci operator check failed")
    return PseudoEinsteinResult(True, pe, match[0], match[1], cand, "catalog match")


# ---------------------------------------------------------------------------
# commuting almost-contact structure


@dataclass(frozen=True)
class CommutingResult:
    commuting: bool
    family: ModelFamily | None
    radius: float | None


def classify_commuting_structure(data: SpectralData, tol: float = MATCH_TOL) -> CommutingResult:
    """A commutes with P (every P_i for HH^n) iff every eigenspace is self-paired."""
    eps = data.epsilon
    ok = data.is_self_paired()
    if ok:
        for alpha in data.alphas:
            target = alpha * alpha + 4.0 * eps
            for lam, _ in data.d_spectrum:
                if abs((2.0 * lam - alpha) ** 2 - target) > tol * max(1.0, alpha * alpha):
                    ok = False
    if not ok:
        return CommutingResult(False, None, None)
    match = match_catalog(data)
    if match is None:
        return CommutingResult(True, None, None)
    return CommutingResult(True, match[0], match[1])


# ---------------------------------------------------------------------------
# foliations


@dataclass(frozen=True)
class FoliationResult:
    foliation_type: FoliationType
    flow_coherent: bool
    max_flow_residual: float
    hopf_classes: tuple
    family: ModelFamily | None = None
    classes_preserved: bool = True


def _member(obj) -> SpectralData:
    if isinstance(obj, SpectralData):
        return obj
    if isinstance(obj, HypersurfacePoint):
        if is_hopf(obj) is None:
            raise NotApplicableError("family member is not Hopf")
        try:
            return extract_spectral_data(obj)
        except NotHopfError as exc:
            raise NotApplicableError(str(exc)) from exc
    raise InvalidArgumentError(f"cannot interpret family member {type(obj).__name__}")


def _spectral_distance(x: SpectralData, y: SpectralData) -> float:
    if x.pairings != y.pairings or [m for _, m in x.d_spectrum] != [m for _, m in y.d_spectrum]:
        return math.inf
    vx = list(x.alphas) + [lam for lam, _ in x.d_spectrum]
    vy = list(y.alphas) + [lam for lam, _ in y.d_spectrum]
    return max(abs(a - b) / max(1.0, abs(b)) for a, b in zip(vx, vy))


def flow_coherence(near: SpectralData, far: SpectralData, delta: float) -> tuple[float, bool]:
    """Residual between ``near`` and ``far`` flowed by delta towards the focal set.

    Also reports whether the Hopf class of ``far`` survives the flow.
    """
    try:
        flowed = flow_spectral_data(far, delta)
    except FocalPointEncountered:
        return math.inf, False
    same = True
    if far.epsilon < 0:
        same = hopf_class_of(flowed) is hopf_class_of(far)
    return _spectral_distance(flowed, near), same


def classify_foliation(
    family: Callable[[float], object] | Mapping[float, object],
    radii: Sequence[float] | None = None,
    epsilon: int = -1,
    flow_tol: float = 1e-8,
) -> FoliationResult:
    """Identify a radius-parameterized family of Hopf leaves.

    ``family`` maps a parameter to SpectralData or HypersurfacePoint; pass
    ``radii`` to sample a callable.  Consecutive leaves must be related by
    the Riccati flow (distance measured by recovered tube radius when the
    leaf matches the catalog, by the raw parameter otherwise).
    """
    if epsilon != -1:
        raise UnsupportedClassificationError("foliation classification is for hyperbolic spaces")
    if isinstance(family, Mapping):
        params = sorted(family)
        members = [_member(family[p]) for p in params]
    else:
        if radii is None:
            raise InvalidArgumentError("radii are required for a callable family")
        params = sorted(float(r) for r in radii)
        members = [_member(family(p)) for p in params]
    if not members:
        raise InvalidArgumentError("empty family")
    classes = tuple(hopf_class_of(d) for d in members)
    matches = [match_catalog(d) for d in members]

    positions = []
    for p, m in zip(params, matches):
        positions.append(m[1] if m is not None and m[1] is not None else p)
    worst, preserved = 0.0, True
    for i in range(len(members) - 1):
        delta = positions[i + 1] - positions[i]
        res, same = flow_coherence(members[i], members[i + 1], delta)
        worst = max(worst, res)
        preserved &= same
    coherent = worst <= flow_tol and preserved

    kinds = {m[0] if m is not None else None for m in matches}
    fam = next(iter(kinds)) if len(kinds) == 1 else None
    ftype = FoliationType.UNRECOGNIZED
    if coherent and len(set(classes)) == 1 and fam is not None:
        cls = classes[0]
        if cls is HopfClass.SMALL and fam.focal_kind is FocalKind.REAL_HYPERBOLIC:
            ftype = FoliationType.REAL_HYPERBOLIC_TUBES
        elif cls is HopfClass.DEGENERATE and fam.focal_kind is FocalKind.HOROSPHERE:
            ftype = FoliationType.HOROSPHERICAL
        elif cls is HopfClass.LARGE and fam.focal_kind in (
            FocalKind.POINT, FocalKind.COMPLEX_SUB, FocalKind.QUATERNIONIC_SUB
        ):
            ftype = FoliationType.COMPLEX_TUBES
    return FoliationResult(ftype, coherent, worst, classes, fam, preserved)


def family_callable(fam: ModelFamily) -> Callable[[float], SpectralData]:
    """Leaf map of a catalog foliation; parallel horospheres are congruent."""
    if fam.is_tube:
        return lambda r: spectrum_at(fam, r)
    return lambda r: spectrum_at(fam)


# ---------------------------------------------------------------------------
# degenerate focal structure


def degenerate_spectrum(n: int, focal: float, others: Sequence[float] = ()) -> SpectralData:
    """Synthetic degenerate CH^n data: alpha = 2, J T_lambda inside T_1.

    ``focal`` (> 1) and each of ``others`` get multiplicity one, each paired
    with a unit-curvature direction; the rest of D is a J-invariant part of
    T_1.
    """
    m = len(others)
    s = n - 2 - m
    if s < 0:
        raise InvalidArgumentError(f"at most {n - 2} non-focal curvatures fit in CH^{n}")
    lams = [focal] + list(others)
    entries = [(lam, 1) for lam in lams] + [(1.0, 1 + m + 2 * s)]
    one = len(lams)
    rows = [(i, one) for i in range(len(lams))] + [(one, one)] * s
    return SpectralData((2.0,), entries, (tuple(rows),), n, -1)


def focal_leaf_shape_trace(data: SpectralData, tol: float = 1e-9) -> tuple[float, bool]:
    """Trace of the focal leaf's shape operator for degenerate data.

    Flows every non-focalizing branch (Hopf direction included) to the
    focal time of the single focalizing curvature and sums the limits.
    Returns (trace, minimal).
    """
    _require_ch(data)
    if hopf_class_of(data) is not HopfClass.DEGENERATE:
        raise NotApplicableError("input is not degenerate")
    lams = [lam for lam, _ in data.d_spectrum]
    focal = [i for i, lam in enumerate(lams) if lam > 1.0 + DEGENERATE_TOL]
    if not focal:
        raise NotApplicableError("no focalizing principal curvature")
    if len(focal) > 1:
        raise AmbiguousFocalStructureError(f"{len(focal)} focalizing curvature families")
    i1 = focal[0]
    for i, lam in enumerate(lams):
        if i != i1 and abs(lam - 1.0) > DEGENERATE_TOL and abs(lam) >= 1.0:
            raise NotApplicableError(f"curvature {lam:.6g} violates |lambda| < 1")
    ones = {i for i, lam in enumerate(lams) if abs(lam - 1.0) <= DEGENERATE_TOL}
    if not data.partners(i1) <= ones:
        raise NotApplicableError("focalizing curvature is not paired with 1")
    theta = focal_time(lams[i1], -1.0)
    trace = flow_closed_form(data.alpha, -4.0, theta)
    for i, (lam, m) in enumerate(data.d_spectrum):
        if i != i1:
            trace += m * flow_closed_form(lam, -1.0, theta)
    return trace, abs(trace) <= tol


# ---------------------------------------------------------------------------
# aggregate report


@dataclass(frozen=True)
class ClassificationReport:
    hopf: tuple | None
    hopf_class: HopfClass | None
    curvature_adapted: bool
    pseudo_einstein: tuple | None
    commuting_structure: bool
    foliation_type: FoliationType | None = None
    focal_trace: float | None = None
    family: str | None = None
    radius: float | None = None

    def __post_init__(self):
        if self.pseudo_einstein is not None and self.hopf is None:
            raise InvalidArgumentError("pseudo-Einstein data requires a Hopf point")

    def to_json(self) -> dict:
        return {
            "hopf": list(self.hopf) if self.hopf is not None else None,
            "hopf_class": self.hopf_class.value if self.hopf_class else None,
            "curvature_adapted": self.curvature_adapted,
            "pseudo_einstein": list(self.pseudo_einstein) if self.pseudo_einstein else None,
            "commuting_structure": self.commuting_structure,
            "foliation_type": self.foliation_type.value if self.foliation_type else None,
            "focal_trace": self.focal_trace,
            "family": self.family,
            "radius": self.radius,
        }

    def rows(self) -> list[tuple[str, str]]:
        def fmt(v):
            if v is None:
                return "-"
            if isinstance(v, float):
                return format(v, ".17g")
            if isinstance(v, (list, tuple)):
                return ", ".join(fmt(x) for x in v)
            return str(v)

        return [(k, fmt(v)) for k, v in self.to_json().items()]

    def render(self) -> str:
        rows = self.rows()
        w = max(len(k) for k, _ in rows)
        return "\n".join(f"{k.ljust(w)}  {v}" for k, v in rows) + "\n"


def build_report(data: SpectralData, foliation: FoliationResult | None = None,
                 adapted_tol: float = 1e-12) -> ClassificationReport:
    """Run every pointwise check on ``data``."""
    point = to_point(data)
    adapted = is_curvature_adapted(point, adapted_tol)
    cls = hopf_class_of(data) if data.epsilon < 0 else None
    pe = None
    if not data.quaternionic and data.epsilon < 0:
        pe = pseudo_einstein_check(ricci_operator(point.A, point.U[0], data.n), point.U[0])
    commuting = classify_commuting_structure(data)
    trace = None
    if cls is HopfClass.DEGENERATE and not data.quaternionic:
        try:
            trace = focal_leaf_shape_trace(data)[0]
        except NotApplicableError:
            trace = None
    match = match_catalog(data)
    return ClassificationReport(
        hopf=data.alphas,
        hopf_class=cls,
        curvature_adapted=adapted,
        pseudo_einstein=pe,
        commuting_structure=commuting.commuting,
        foliation_type=foliation.foliation_type if foliation else None,
        focal_trace=trace,
        family=match[0].id if match else None,
        radius=match[1] if match else None,
    )
