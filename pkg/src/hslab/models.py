"""Catalog of homogeneous Hopf hypersurfaces with exact spectral data.

Each family is a tube around a totally geodesic focal submanifold (or a
horosphere), parameterized by its radius.  ``spectrum_at`` evaluates the
closed-form principal curvatures; ``focal_data`` gives the focal
submanifold's initial conditions so the same spectra can be regenerated
with ``riccati.tube_spectrum_from_focal``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .ambient import AmbientSpace, SpaceKind
from .errors import InvalidArgumentError, InvalidRadiusError
from .riccati import first_focal_time, tube_spectrum_from_focal
from .spectral import SpectralData


class FocalKind(enum.Enum):
    POINT = "point"
    COMPLEX_SUB = "complex"
    REAL_HYPERBOLIC = "real"
    QUATERNIONIC_SUB = "quaternionic"
    HOROSPHERE = "horosphere"


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    closed: bool = False

    def __contains__(self, r) -> bool:
        if self.closed:
            return self.lo <= r <= self.hi
        return self.lo < r < self.hi

    def __str__(self):
        if self.closed and self.lo == self.hi:
            return f"{{{self.lo:g}}}"
        lb, rb = ("[", "]") if self.closed else ("(", ")")
        hi = "inf" if math.isinf(self.hi) else ("pi/2" if self.hi == math.pi / 2 else f"{self.hi:g}")
        return f"{lb}{self.lo:g}, {hi}{rb}"


@dataclass(frozen=True)
class ModelFamily:
    """A radius-parameterized catalog entry.

    ``k`` is the dimension of the totally geodesic CP^k, CH^k or HH^k
    (0 for geodesic spheres, unused otherwise).
    """

    ambient: AmbientSpace
    focal_kind: FocalKind
    k: int = 0

    def __post_init__(self):
        kind = FocalKind(self.focal_kind)
        object.__setattr__(self, "focal_kind", kind)
        space, n = self.ambient.kind, self.ambient.n
        allowed = {
            SpaceKind.COMPLEX_PROJECTIVE: {FocalKind.POINT, FocalKind.COMPLEX_SUB},
            SpaceKind.COMPLEX_HYPERBOLIC: {FocalKind.POINT, FocalKind.COMPLEX_SUB,
                                           FocalKind.REAL_HYPERBOLIC, FocalKind.HOROSPHERE},
            SpaceKind.QUATERNIONIC_HYPERBOLIC: {FocalKind.POINT, FocalKind.QUATERNIONIC_SUB,
                                                FocalKind.HOROSPHERE},
        }[space]
        if kind not in allowed:
            raise InvalidArgumentError(f"no {kind.value} family in {self.ambient}")
        if kind in (FocalKind.COMPLEX_SUB, FocalKind.QUATERNIONIC_SUB):
            if not 1 <= self.k <= n - 1:
                raise InvalidArgumentError(f"k must lie in 1..{n - 1}, got {self.k}")
        elif self.k != 0:
            raise InvalidArgumentError(f"{kind.value} family takes no k")

    @property
    def is_tube(self) -> bool:
        return self.focal_kind is not FocalKind.HOROSPHERE

    @property
    def radius_domain(self) -> Interval:
        if not self.is_tube:
            return Interval(0.0, 0.0, closed=True)
        if self.ambient.epsilon > 0:
            return Interval(0.0, math.pi / 2)
        return Interval(0.0, math.inf)

    @property
    def id(self) -> str:
        if self.focal_kind in (FocalKind.COMPLEX_SUB, FocalKind.QUATERNIONIC_SUB):
            return f"{self.focal_kind.value}:{self.k}"
        return self.focal_kind.value

    @property
    def focal_set(self) -> str:
        letter = {SpaceKind.COMPLEX_PROJECTIVE: "CP", SpaceKind.COMPLEX_HYPERBOLIC: "CH",
                  SpaceKind.QUATERNIONIC_HYPERBOLIC: "HH"}[self.ambient.kind]
        if self.focal_kind is FocalKind.POINT:
            return "point (geodesic spheres)"
        if self.focal_kind is FocalKind.REAL_HYPERBOLIC:
            return f"totally geodesic RH^{self.ambient.n}"
        if self.focal_kind is FocalKind.HOROSPHERE:
            return "none (horosphere)"
        return f"totally geodesic {letter}^{self.k}"

    @property
    def roles(self) -> tuple[str, ...]:
        """Characterizations this family takes part in."""
        out = ["hopf-constant-principal-curvatures"]
        n = self.ambient.n
        if self.focal_kind is FocalKind.REAL_HYPERBOLIC:
            out.append("small-hopf-foliation")
        else:
            out.append("commuting-structure")
        if self.ambient.kind is SpaceKind.COMPLEX_HYPERBOLIC and (
            self.focal_kind in (FocalKind.POINT, FocalKind.HOROSPHERE)
            or (self.focal_kind is FocalKind.COMPLEX_SUB and self.k == n - 1)
        ):
            out.append("pseudo-einstein")
        return tuple(out)

    def to_json(self) -> dict:
        dom = self.radius_domain
        return {
            "ambient": self.ambient.to_json(),
            "family": self.id,
            "focal_set": self.focal_set,
            "radius_domain": [dom.lo, "inf" if math.isinf(dom.hi) else dom.hi, dom.closed],
            "roles": list(self.roles),
        }


def parse_family(space: AmbientSpace, name: str, k: int | None = None) -> ModelFamily:
    """Family from a catalog id such as ``point``, ``complex:2`` or ``real``."""
    if ":" in name:
        name, ks = name.split(":", 1)
        k = int(ks)
    try:
        kind = FocalKind(name)
    except ValueError:
        raise InvalidArgumentError(f"unknown family {name!r}") from None
    return ModelFamily(space, kind, k or 0)


def catalog(space: AmbientSpace) -> list[ModelFamily]:
    n = space.n
    out = [ModelFamily(space, FocalKind.POINT)]
    if space.kind is SpaceKind.QUATERNIONIC_HYPERBOLIC:
        out += [ModelFamily(space, FocalKind.QUATERNIONIC_SUB, k) for k in range(1, n)]
        out.append(ModelFamily(space, FocalKind.HOROSPHERE))
    else:
        out += [ModelFamily(space, FocalKind.COMPLEX_SUB, k) for k in range(1, n)]
        if space.kind is SpaceKind.COMPLEX_HYPERBOLIC:
            out.append(ModelFamily(space, FocalKind.REAL_HYPERBOLIC))
            out.append(ModelFamily(space, FocalKind.HOROSPHERE))
    return out


def _check_radius(family: ModelFamily, r: float) -> float:
    r = float(r)
    if r not in family.radius_domain:
        raise InvalidRadiusError(f"radius {r!r} outside {family.radius_domain} for {family.id}")
    return r


def spectrum_at(family: ModelFamily, r: float = 0.0) -> SpectralData:
    """Exact spectral data of the family member of radius r."""
    r = _check_radius(family, r)
    space, n, k = family.ambient, family.ambient.n, family.k
    kind = family.focal_kind
    eps = space.epsilon
    if kind is FocalKind.HOROSPHERE:
        if space.quaternionic:
            rows = ((0, 0),) * (2 * n - 2)
            return SpectralData((2.0, 2.0, 2.0), ((1.0, 4 * n - 4),), (rows,) * 3, n, eps, True)
        return SpectralData((2.0,), ((1.0, 2 * n - 2),), (((0, 0),) * (n - 1),), n, eps)
    if kind is FocalKind.REAL_HYPERBOLIC:
        alpha = 2.0 * math.tanh(2.0 * r)
        entries = ((math.tanh(r), n - 1), (1.0 / math.tanh(r), n - 1))
        return SpectralData((alpha,), entries, (((0, 1),) * (n - 1),), n, eps)
    if eps > 0:
        alpha = 2.0 / math.tan(2.0 * r)
        big, small = 1.0 / math.tan(r), -math.tan(r)
    else:
        alpha = 2.0 / math.tanh(2.0 * r)
        big, small = 1.0 / math.tanh(r), math.tanh(r)
    q = 4 if space.quaternionic else 2
    entries = [(big, q * (n - 1 - k)), (small, q * k)]
    rows = []
    for i, (_, m) in enumerate(entries):
        rows.extend([(i, i)] * (m // 2))
    hdim = space.hopf_dim
    return SpectralData((alpha,) * hdim, tuple(entries), (tuple(rows),) * hdim, n, eps, space.quaternionic)


def focal_data(family: ModelFamily):
    """(tangent spectrum, normal multiplicities, totally_real) of the focal set.

    Tangent entries are (lambda, multiplicity, kappa); all focal sets here
    are totally geodesic, so every lambda is 0.  None for the horosphere.
    """
    space, n, k = family.ambient, family.ambient.n, family.k
    e = float(space.epsilon)
    kind = family.focal_kind
    if kind is FocalKind.HOROSPHERE:
        return None
    if kind is FocalKind.REAL_HYPERBOLIC:
        return [(0.0, 1, 4 * e), (0.0, n - 1, e)], [(e, n - 1)], True
    q = 4 if space.quaternionic else 2
    tangent = [(0.0, q * k, e)] if k else []
    normal = [(4 * e, space.hopf_dim), (e, q * (n - 1 - k))]
    return tangent, normal, False


def spectrum_from_focal(family: ModelFamily, r: float) -> SpectralData:
    """Same as ``spectrum_at`` but generated by flowing the focal data."""
    _check_radius(family, r)
    fd = focal_data(family)
    if fd is None:
        return spectrum_at(family, r)
    tangent, normal, totally_real = fd
    return tube_spectrum_from_focal(tangent, normal, r, totally_real=totally_real)


def mean_curvature(data: SpectralData) -> float:
    return sum(data.alphas) + sum(lam * m for lam, m in data.d_spectrum)


def focal_distance(family: ModelFamily, r: float = 0.0):
    """Distance to the focal set along the normal, None for horospheres."""
    if not family.is_tube:
        return None
    return first_focal_time(spectrum_at(family, r))
