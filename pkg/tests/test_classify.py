import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hslab.ambient import AmbientSpace, curvature_tensor
from hslab.classify import (
    FoliationType,
    build_report,
    classify_commuting_structure,
    classify_foliation,
    classify_pseudo_einstein,
    degenerate_spectrum,
    degenerate_trace_candidate,
    family_callable,
    focal_leaf_shape_trace,
    match_catalog,
    pseudo_einstein_check,
    recover_radius,
    ricci_operator,
)
from hslab.errors import (
    AmbiguousFocalStructureError,
    NotApplicableError,
    OutOfScopeError,
    UnsupportedClassificationError,
)
from hslab.models import FocalKind, ModelFamily, catalog, spectrum_at
from hslab.spectral import HopfClass, SpectralData, to_point

CH3 = AmbientSpace.CH(3)


def gauss_ricci(point):
    """Ricci operator from the ambient curvature tensor and the Gauss equation."""
    B = point.basis
    m = B.shape[1]
    S = np.zeros((m, m))
    for a in range(m):
        for b in range(m):
            S[a, b] = sum(curvature_tensor(point.space, B[:, i], B[:, a], B[:, i]) @ B[:, b] for i in range(m))
    A = point.A
    return S + np.trace(A) * A - A @ A


@pytest.mark.parametrize("n", [3, 4])
def test_ricci_operator_matches_gauss_equation(n, rng):
    for fam in catalog(AmbientSpace.CH(n)):
        d = spectrum_at(fam, 0.7) if fam.is_tube else spectrum_at(fam)
        p = to_point(d, rng)
        assert np.allclose(ricci_operator(p.A, p.U[0], n), gauss_ricci(p), atol=1e-10)


def test_rho_sigma_rational_oracles():
    # S|D = -(2n+1) + h lambda - lambda^2, S U = -(2n+1) + 3 + h alpha - alpha^2
    def rho_sigma(alpha, lam, mult, n=3):
        h = alpha + mult * lam
        rho = -(2 * n + 1) + h * lam - lam * lam
        return rho, -(2 * n + 1) + 3 + h * alpha - alpha * alpha - rho

    assert rho_sigma(Fraction(2), Fraction(1), 4) == (-2, 6)
    assert rho_sigma(Fraction(34, 15), Fraction(5, 3), 4) == (Fraction(46, 9), 6)
    horo = classify_pseudo_einstein(spectrum_at(ModelFamily(CH3, FocalKind.HOROSPHERE)))
    assert horo.accepted
    assert horo.rho_sigma == pytest.approx((-2, 6), abs=1e-10)
    sph = classify_pseudo_einstein(spectrum_at(ModelFamily(CH3, FocalKind.POINT), math.log(2)))
    assert sph.rho_sigma == pytest.approx((46 / 9, 6), abs=1e-10)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_pseudo_einstein_sigma_is_2n(n):
    space = AmbientSpace.CH(n)
    for fam in catalog(space):
        d = spectrum_at(fam, 0.8) if fam.is_tube else spectrum_at(fam)
        res = classify_pseudo_einstein(d)
        assert res.accepted == ("pseudo-einstein" in fam.roles)
        if res.accepted:
            assert res.rho_sigma[1] == pytest.approx(2 * n, abs=1e-10)
            assert res.family == fam


def test_pseudo_einstein_scope():
    with pytest.raises(OutOfScopeError):
        classify_pseudo_einstein(spectrum_at(ModelFamily(AmbientSpace.CH(2), FocalKind.POINT), 0.5))
    with pytest.raises(NotApplicableError):
        classify_pseudo_einstein(spectrum_at(ModelFamily(AmbientSpace.CP(3), FocalKind.POINT), 0.5))


def test_pseudo_einstein_rejects_degenerate_with_forced_curvature():
    # alpha = 2 with spectrum {1, lambda}: the trace identity forces |lambda| >= 1
    d = SpectralData(2.0, [(0.5, 2), (1.0, 2)], [(0, 0), (1, 1)], 3, -1)
    res = classify_pseudo_einstein(d)
    assert not res.accepted
    assert res.degenerate_candidate == pytest.approx(degenerate_trace_candidate(3, 2))
    assert degenerate_trace_candidate(3, 2) == -3.0
    assert degenerate_trace_candidate(4, 1) is None


def test_pseudo_einstein_check_generic():
    U = np.eye(5)[4]
    S = 2.0 * np.eye(5) + 3.0 * np.outer(U, U)
    assert pseudo_einstein_check(S, U) == pytest.approx((2.0, 3.0))
    S[0, 0] += 0.1
    assert pseudo_einstein_check(S, U) is None


def test_commuting_structure():
    for space in (AmbientSpace.CH(3), AmbientSpace.CP(3), AmbientSpace.HH(2)):
        for fam in catalog(space):
            d = spectrum_at(fam, 0.5) if fam.is_tube else spectrum_at(fam)
            res = classify_commuting_structure(d)
            assert res.commuting == (fam.focal_kind is not FocalKind.REAL_HYPERBOLIC)
            if res.commuting:
                assert res.family == fam
    # self-paired but off the constraint curve
    bad = SpectralData(3.0, [(0.1, 4)], [(0, 0), (0, 0)], 3, -1)
    assert not classify_commuting_structure(bad).commuting


def test_recover_radius_and_match():
    for r in (0.2, 1.0, 2.5):
        assert recover_radius(2 / math.tanh(2 * r), -1) == pytest.approx(r)
        assert recover_radius(2 * math.tanh(2 * r), -1) == pytest.approx(r)
    assert recover_radius(2 / math.tan(1.0), 1) == pytest.approx(0.5)
    assert recover_radius(2.0, -1) is None
    fam = ModelFamily(CH3, FocalKind.COMPLEX_SUB, 1)
    assert match_catalog(spectrum_at(fam, 0.9))[0] == fam
    off = SpectralData(2.5, [(0.3, 4)], [(0, 0), (0, 0)], 3, -1)
    assert match_catalog(off) is None


@pytest.mark.parametrize("n", [3, 4])
def test_foliation_types(n):
    radii = np.linspace(0.2, 2.0, 12)
    expected = {FocalKind.REAL_HYPERBOLIC: FoliationType.REAL_HYPERBOLIC_TUBES,
                FocalKind.HOROSPHERE: FoliationType.HOROSPHERICAL}
    for fam in catalog(AmbientSpace.CH(n)):
        res = classify_foliation(family_callable(fam), radii)
        assert res.foliation_type is expected.get(fam.focal_kind, FoliationType.COMPLEX_TUBES)
        assert res.flow_coherent and res.classes_preserved
        assert len(set(res.hopf_classes)) == 1


def test_foliation_mapping_and_incoherent_family():
    fam = ModelFamily(CH3, FocalKind.REAL_HYPERBOLIC)
    leaves = {r: to_point(spectrum_at(fam, r), np.random.default_rng(3)) for r in (0.5, 0.7, 0.9)}
    assert classify_foliation(leaves).foliation_type is FoliationType.REAL_HYPERBOLIC_TUBES
    sphere = ModelFamily(CH3, FocalKind.POINT)
    mixed = {0.5: spectrum_at(fam, 0.5), 0.7: spectrum_at(sphere, 0.7)}
    res = classify_foliation(mixed)
    assert res.foliation_type is FoliationType.UNRECOGNIZED
    assert not res.flow_coherent
    with pytest.raises(UnsupportedClassificationError):
        classify_foliation(mixed, epsilon=1)


def test_focal_leaf_trace_exact():
    # lambda = 3 focalizes at atanh(1/3); alpha = 2 and lambda = 1 are stationary
    trace, minimal = focal_leaf_shape_trace(degenerate_spectrum(3, 3.0))
    assert trace == pytest.approx(5.0, abs=1e-12)
    assert not minimal


@settings(max_examples=200, deadline=None)
@given(n=st.integers(3, 6), focal=st.floats(1.001, 50), data=st.data())
def test_focal_leaf_trace_positive(n, focal, data):
    m = data.draw(st.integers(0, n - 2))
    others = data.draw(st.lists(st.floats(-0.999, 0.999), min_size=m, max_size=m))
    d = degenerate_spectrum(n, focal, others)
    assert focal_leaf_shape_trace(d)[0] > 0


def test_focal_leaf_trace_errors():
    with pytest.raises(NotApplicableError):
        focal_leaf_shape_trace(spectrum_at(ModelFamily(CH3, FocalKind.POINT), 0.5))
    two = SpectralData(2.0, [(3.0, 1), (4.0, 1), (1.0, 2)], [(0, 2), (1, 2)], 3, -1)
    with pytest.raises(AmbiguousFocalStructureError):
        focal_leaf_shape_trace(two)


def test_report_json_and_table():
    d = spectrum_at(ModelFamily(CH3, FocalKind.HOROSPHERE))
    rep = build_report(d)
    obj = rep.to_json()
    assert obj["hopf_class"] == HopfClass.DEGENERATE.value
    assert obj["curvature_adapted"] and obj["commuting_structure"]
    assert obj["pseudo_einstein"] == pytest.approx([-2, 6])
    assert obj["family"] == "horosphere"
    table = rep.render()
    assert table.splitlines()[0].startswith("hopf ")
    assert build_report(d).render() == table
