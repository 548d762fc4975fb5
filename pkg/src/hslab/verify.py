"""Verification suites run by ``hslab verify`` and the acceptance tests.

Every suite is deterministic (fixed seeds, fixed grids) and returns a list
of ``Check`` records; ``format_report`` renders them with 17 significant
digits so repeated runs are byte-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .ambient import AmbientSpace
from .classify import (
    FoliationType,
    classify_commuting_structure,
    classify_foliation,
    classify_pseudo_einstein,
    degenerate_spectrum,
    family_callable,
    focal_leaf_shape_trace,
)
from .errors import FocalPointEncountered
from .models import FocalKind, ModelFamily, catalog, spectrum_at
from .riccati import flow_closed_form, flow_numeric, flow_numeric_trace, focal_time
from .spectral import (
    commutes_with_structure,
    is_curvature_adapted,
    lambda_star,
    max_pairing_residual,
    to_point,
)

SEED = 20121104


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    residual: float | None = None
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        res = "" if self.residual is None else f" residual={format(self.residual, '.17g')}"
        det = f" {self.detail}" if self.detail else ""
        return f"{status} {self.suite} {self.name}{res}{det}"


def _member(fam: ModelFamily, r: float):
    return spectrum_at(fam, r) if fam.is_tube else spectrum_at(fam)


# ---------------------------------------------------------------------------


def suite_pairing(ns=(3, 4)) -> list[Check]:
    out = []
    # exact rational oracle at r = ln 2: tanh = 3/5, coth = 5/3, 2 tanh 2r = 30/17
    a, l, ls = Fraction(30, 17), Fraction(3, 5), Fraction(5, 3)
    exact = (2 * l - a) * (2 * ls - a) - (a * a - 4)
    out.append(Check("pairing", "rational-RH3-ln2", exact == 0, float(exact)))
    fam = ModelFamily(AmbientSpace.CH(3), FocalKind.REAL_HYPERBOLIC)
    d = spectrum_at(fam, math.log(2))
    r = max_pairing_residual(d)
    out.append(Check("pairing", "float-RH3-ln2", r < 1e-12, r))
    radii = np.linspace(0.1, 3.0, 50)
    for n in ns:
        space = AmbientSpace.CH(n)
        worst = max(max_pairing_residual(spectrum_at(ModelFamily(space, FocalKind.REAL_HYPERBOLIC), r))
                    for r in radii)
        out.append(Check("pairing", f"RH{n}-tubes-50-radii", worst < 1e-12, worst))
        worst = 0.0
        for fam in catalog(space):
            if fam.focal_kind in (FocalKind.POINT, FocalKind.COMPLEX_SUB):
                worst = max(worst, max(max_pairing_residual(spectrum_at(fam, r)) for r in radii))
        out.append(Check("pairing", f"CH{n}-complex-tubes-self-pairing", worst < 1e-12, worst))
    return out


def suite_foliation(ns=(3, 4)) -> list[Check]:
    out = []
    radii = np.linspace(0.2, 2.0, 25)
    for n in ns:
        for fam in catalog(AmbientSpace.CH(n)):
            res = classify_foliation(family_callable(fam), radii)
            want_rh = fam.focal_kind is FocalKind.REAL_HYPERBOLIC
            got_rh = res.foliation_type is FoliationType.REAL_HYPERBOLIC_TUBES
            expected = {
                FocalKind.REAL_HYPERBOLIC: FoliationType.REAL_HYPERBOLIC_TUBES,
                FocalKind.HOROSPHERE: FoliationType.HOROSPHERICAL,
            }.get(fam.focal_kind, FoliationType.COMPLEX_TUBES)
            ok = want_rh == got_rh and res.foliation_type is expected and res.classes_preserved
            out.append(Check("foliation", f"CH{n}-{fam.id}", ok, res.max_flow_residual, res.foliation_type.value))
    return out


def suite_pseudo_einstein(ns=(3, 4, 5)) -> list[Check]:
    out = []
    radii = np.linspace(0.1, 3.0, 25)
    for n in ns:
        space = AmbientSpace.CH(n)
        for fam in catalog(space):
            should = fam.focal_kind in (FocalKind.POINT, FocalKind.HOROSPHERE) or (
                fam.focal_kind is FocalKind.COMPLEX_SUB and fam.k == n - 1
            )
            grid = radii if fam.is_tube else [None]
            verdicts = [classify_pseudo_einstein(_member(fam, r)).accepted for r in grid]
            ok = all(v == should for v in verdicts)
            out.append(Check("pseudo-einstein", f"CH{n}-{fam.id}", ok, None,
                             f"{'accept' if should else 'reject'} {sum(verdicts)}/{len(verdicts)}"))
        # sigma = 2n on every accepted model
        worst = 0.0
        for fam in catalog(space):
            if "pseudo-einstein" in fam.roles:
                for r in (radii if fam.is_tube else [None]):
                    rho_sigma = classify_pseudo_einstein(_member(fam, r)).rho_sigma
                    worst = max(worst, abs(rho_sigma[1] - 2 * n))
        out.append(Check("pseudo-einstein", f"CH{n}-sigma-equals-2n", worst < 1e-10, worst))
    if 3 in ns:
        space = AmbientSpace.CH(3)
        rs = classify_pseudo_einstein(spectrum_at(ModelFamily(space, FocalKind.HOROSPHERE))).rho_sigma
        res = max(abs(rs[0] + 2.0), abs(rs[1] - 6.0))
        out.append(Check("pseudo-einstein", "CH3-horosphere-rho-sigma", res < 1e-10, res))
        rs = classify_pseudo_einstein(spectrum_at(ModelFamily(space, FocalKind.POINT), math.log(2))).rho_sigma
        res = max(abs(rs[0] - 46.0 / 9.0), abs(rs[1] - 6.0))
        out.append(Check("pseudo-einstein", "CH3-sphere-ln2-rho-sigma", res < 1e-10, res))
    return out


def degenerate_grid(ns=(3, 4, 5), size: int = 1000):
    """Deterministic admissible degenerate spectra for the focal-trace check."""
    cases = []
    per_n = size // len(ns) + 1
    for n in ns:
        rng = np.random.default_rng(SEED + n)
        for j in range(per_n):
            lam1 = 1.0 + 9.0 * (j + 1) / per_n
            m = j % (n - 1)
            others = tuple(float(x) for x in rng.uniform(-0.999, 0.999, size=m))
            cases.append(degenerate_spectrum(n, lam1, others))
    return cases[:size]


def suite_focal_trace(size: int = 1000) -> list[Check]:
    traces = [focal_leaf_shape_trace(d)[0] for d in degenerate_grid(size=size)]
    lo = min(traces)
    return [Check("focal-trace", f"focal-trace-positive-{len(traces)}", lo > 0, lo, "min trace")]


def _commuting_families(ns):
    for n in ns:
        for space in (AmbientSpace.CH(n), AmbientSpace.CP(n), AmbientSpace.HH(n)):
            for fam in catalog(space):
                yield fam


def suite_commuting(ns=(3, 4, 5)) -> list[Check]:
    out = []
    for fam in _commuting_families(ns):
        if fam.ambient.epsilon > 0:
            radii = np.linspace(0.05, 1.5, 25)
        else:
            radii = np.linspace(0.1, 3.0, 25)
        grid = radii if fam.is_tube else [None]
        should = fam.focal_kind is not FocalKind.REAL_HYPERBOLIC
        agree, verdict_ok, worst = True, True, 0.0
        for r in grid:
            d = _member(fam, r)
            res = classify_commuting_structure(d)
            verdict_ok &= res.commuting == should and (not should or res.family == fam)
            p = to_point(d)
            agree &= commutes_with_structure(p.A, p.P, 1e-10) == res.commuting
            if should:
                worst = max(worst, max(np.linalg.norm(p.A @ Pi - Pi @ p.A) for Pi in p.P))
        out.append(Check("commuting", f"{fam.ambient}-{fam.id}", verdict_ok and agree,
                         worst if should else None, "commuting" if should else "non-commuting"))
    return out


# ---------------------------------------------------------------------------
# numeric-flow and data-level suites


def random_commuting_pair(rng: np.random.Generator, n: int = 3):
    """(A0, K, eigenvalues, kappas) with A0 and K diagonal in a random frame."""
    d = 2 * n - 1
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    Q = Q * np.sign(np.diag(R))
    kappas = np.array([-1.0] * (d - 1) + [-4.0])
    lams = rng.uniform(-5.0, 5.0, size=d)
    return Q @ np.diag(lams) @ Q.T, Q @ np.diag(kappas) @ Q.T, lams, kappas, Q


def _horizon(lams, kappas, cap=2.0):
    ts = [focal_time(l, k) for l, k in zip(lams, kappas)]
    ts = [t for t in ts if t is not None]
    return min([0.9 * t for t in ts] + [cap])


def suite_riccati(pairs: int = 200, samples: int = 20) -> list[Check]:
    rng = np.random.default_rng(SEED)
    worst_oracle = worst_semi = 0.0
    for _ in range(pairs):
        A0, K, lams, kappas, Q = random_commuting_pair(rng)
        T = _horizon(lams, kappas)
        times = [T * (i + 1) / samples for i in range(samples)]
        trace = flow_numeric_trace(A0, K, times)
        for t, A in zip(times, trace):
            exact = np.array([flow_closed_form(l, k, t) for l, k in zip(lams, kappas)])
            ref = Q @ np.diag(exact) @ Q.T
            worst_oracle = max(worst_oracle, np.max(np.abs(A - ref)) / max(1.0, np.max(np.abs(exact))))
        s = 0.5 * T
        A_s = flow_numeric(A0, K, s)
        two = flow_numeric(A_s, K, T - s)
        scale = max(1.0, np.max(np.abs(trace[-1])))
        worst_semi = max(worst_semi, np.max(np.abs(two - trace[-1])) / scale)
    return [
        Check("riccati", f"oracle-{pairs}-pairs", worst_oracle < 1e-8, worst_oracle),
        Check("riccati", "semigroup", worst_semi < 1e-8, worst_semi),
    ]


def suite_focal() -> list[Check]:
    thetas = [round(0.1 * i, 10) for i in range(1, 31)]
    worst = max(abs(focal_time(1.0 / math.tanh(th), -1.0) - th) for th in thetas)
    out = [Check("focal", "closed-form-theta", worst < 1e-10, worst)]
    worst = 0.0
    ok = True
    for n in (3, 4):
        fam = ModelFamily(AmbientSpace.CH(n), FocalKind.POINT)
        for r in (0.3, 0.7, 1.0, 1.5, 2.5):
            p = to_point(spectrum_at(fam, r), np.random.default_rng(SEED))
            try:
                flow_numeric(p.A, p.K, r + 0.5)
                ok = False
            except FocalPointEncountered as exc:
                worst = max(worst, abs(exc.theta - r))
    out.append(Check("focal", "sphere-blowup-theta", ok and worst < 1e-6, worst))
    return out


def suite_degenerate(count: int = 1000) -> list[Check]:
    lams = [-5.0 + 10.0 * (i + 0.5) / count for i in range(count)]
    lams = [l for l in lams if l != 1.0]
    worst = max(abs(lambda_star(2.0, l, -1) - 1.0) for l in lams)
    out = [Check("degenerate", f"lambda-star-collapse-{len(lams)}", worst == 0.0 or worst < 1e-15, worst)]
    for n in (2, 3, 4, 5):
        d = spectrum_at(ModelFamily(AmbientSpace.CH(n), FocalKind.HOROSPHERE))
        ok = d.d_spectrum == ((1.0, 2 * n - 2),)
        out.append(Check("degenerate", f"CH{n}-horosphere-unit-eigenvalue", ok))
    return out


def suite_adapted(ns=(2, 3, 4), radii_count: int = 25) -> list[Check]:
    # _commuting_families already contains the RH^n tubes of each CH^n
    rng = np.random.default_rng(SEED)
    worst = 0.0
    count = 0
    ok = True
    for fam in _commuting_families(ns):
        hi = 1.5 if fam.ambient.epsilon > 0 else 3.0
        grid = np.linspace(0.05, hi, radii_count) if fam.is_tube else [None]
        for r in grid:
            for p in (to_point(_member(fam, r)), to_point(_member(fam, r), rng)):
                worst = max(worst, np.linalg.norm(p.A @ p.K - p.K @ p.A))
                ok &= is_curvature_adapted(p, 1e-12)
                count += 1
    return [Check("adapted", f"catalog-commutator-{count}-frames", ok and worst < 1e-12, worst)]


SUITES = {
    "pairing": suite_pairing,
    "foliation": suite_foliation,
    "pseudo-einstein": suite_pseudo_einstein,
    "focal-trace": suite_focal_trace,
    "commuting": suite_commuting,
    "riccati": suite_riccati,
    "focal": suite_focal,
    "degenerate": suite_degenerate,
    "adapted": suite_adapted,
}


ALIASES = {
    "eq2-pairing": "pairing",
    "thm1.4": "foliation",
    "thm1.5": "pseudo-einstein",
    "sec4-prop": "focal-trace",
    "sec5-commute": "commuting",
}


def run(name: str, n: int | None = None) -> list[Check]:
    """Run one suite (or ``all``); ``n`` restricts dimension-swept suites."""
    name = ALIASES.get(name, name)
    if name == "all":
        out = []
        for key in SUITES:
            out.extend(run(key, n))
        return out
    if name not in SUITES:
        raise KeyError(name)
    fn = SUITES[name]
    if n is not None and name in ("pairing", "foliation", "pseudo-einstein", "commuting"):
        return fn(ns=(n,))
    return fn()


def format_report(checks) -> str:
    lines = [c.line() for c in checks]
    failed = sum(not c.passed for c in checks)
    lines.append(f"SUMMARY {len(checks) - failed}/{len(checks)} passed")
    return "\n".join(lines) + "\n"
