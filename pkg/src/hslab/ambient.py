"""Rank-one symmetric ambient spaces at a point.

Everything is expressed in a fixed orthonormal frame of R^d, d = real_dim.
The complex structure acts on consecutive coordinate pairs,
``J e_{2i} = e_{2i+1}`` (0-based), and the quaternionic structure is left
multiplication by i, j, k on consecutive blocks of four coordinates
``(1, i, j, k)``.  The default unit normal is the last basis vector, so the
tangent space of a hypersurface is spanned by the first d - 1 basis vectors.

Curvature sign convention: ``R(X, Y)X`` has inner product with ``Y`` equal
to the sectional curvature of span(X, Y), and the normal Jacobi operator
``X -> R(xi, X)xi`` has spectrum {-1, -4} on the hyperbolic kinds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError

UNIT_TOL = 1e-12


class SpaceKind(enum.Enum):
    COMPLEX_PROJECTIVE = "CPn"
    COMPLEX_HYPERBOLIC = "CHn"
    QUATERNIONIC_HYPERBOLIC = "HHn"

    @property
    def quaternionic(self) -> bool:
        return self is SpaceKind.QUATERNIONIC_HYPERBOLIC


def complex_structure(real_dim: int) -> np.ndarray:
    """Standard block form of J on R^real_dim."""
    J = np.zeros((real_dim, real_dim))
    for a in range(0, real_dim, 2):
        J[a + 1, a] = 1.0
        J[a, a + 1] = -1.0
    return J


# left multiplication by i, j, k on (1, i, j, k)
_QUAT_LEFT = {
    "i": np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float),
    "j": np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float),
    "k": np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], dtype=float),
}


def quaternionic_structure(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """J1, J2, J3 on R^{4n}, with J1 J2 = J3."""
    eye = np.eye(n)
    return tuple(np.kron(eye, _QUAT_LEFT[q]) for q in "ijk")


@dataclass(frozen=True)
class AmbientSpace:
    """CP^n, CH^n or HH^n at a point, in the standard frame.

    Parameters
    ----------
    kind : SpaceKind
    n : int
        Complex or quaternionic dimension, at least 2.
    """

    kind: SpaceKind
    n: int
    J: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        kind = SpaceKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if int(self.n) != self.n or self.n < 2:
            raise InvalidArgumentError(f"n must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if kind.quaternionic:
            Js = quaternionic_structure(self.n)
        else:
            Js = (complex_structure(2 * self.n),)
        for Ji in Js:
            Ji.setflags(write=False)
        object.__setattr__(self, "J", Js)

    @classmethod
    def CP(cls, n: int) -> "AmbientSpace":
        return cls(SpaceKind.COMPLEX_PROJECTIVE, n)

    @classmethod
    def CH(cls, n: int) -> "AmbientSpace":
        return cls(SpaceKind.COMPLEX_HYPERBOLIC, n)

    @classmethod
    def HH(cls, n: int) -> "AmbientSpace":
        return cls(SpaceKind.QUATERNIONIC_HYPERBOLIC, n)

    @property
    def real_dim(self) -> int:
        return 4 * self.n if self.kind.quaternionic else 2 * self.n

    @property
    def epsilon(self) -> int:
        return 1 if self.kind is SpaceKind.COMPLEX_PROJECTIVE else -1

    @property
    def quaternionic(self) -> bool:
        return self.kind.quaternionic

    @property
    def hopf_dim(self) -> int:
        """Number of structure directions J_i xi (1 or 3)."""
        return len(self.J)

    def standard_normal(self) -> "NormalVector":
        xi = np.zeros(self.real_dim)
        xi[-1] = 1.0
        return NormalVector(xi)

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "n": self.n}

    @classmethod
    def from_json(cls, obj: dict) -> "AmbientSpace":
        return cls(SpaceKind(obj["kind"]), obj["n"])

    def __str__(self):
        return f"{self.kind.value[:2]}^{self.n}"


class NormalVector:
    """A unit vector of R^real_dim used as hypersurface normal."""

    __slots__ = ("xi",)

    def __init__(self, xi):
        xi = np.array(xi, dtype=float)
        if xi.ndim != 1:
            raise InvalidArgumentError("normal vector must be one-dimensional")
        if abs(np.linalg.norm(xi) - 1.0) > UNIT_TOL:
            raise InvalidArgumentError(f"normal vector is not unit: |xi| = {np.linalg.norm(xi)!r}")
        xi.setflags(write=False)
        self.xi = xi

    def __array__(self, dtype=None, copy=None):
        return self.xi if dtype is None else self.xi.astype(dtype)

    def __len__(self):
        return len(self.xi)

    def __repr__(self):
        return f"NormalVector({self.xi.tolist()!r})"


def _as_normal(space: AmbientSpace, xi) -> np.ndarray:
    if xi is None:
        return space.standard_normal().xi
    if not isinstance(xi, NormalVector):
        xi = NormalVector(xi)
    if len(xi) != space.real_dim:
        raise InvalidArgumentError(f"normal has length {len(xi)}, expected {space.real_dim}")
    return xi.xi


def _check_vec(space: AmbientSpace, *vecs) -> list[np.ndarray]:
    out = []
    for v in vecs:
        v = np.asarray(v, dtype=float)
        if v.shape != (space.real_dim,):
            raise InvalidArgumentError(f"vector of shape {v.shape}, expected ({space.real_dim},)")
        out.append(v)
    return out


def curvature_tensor(space: AmbientSpace, X, Y, Z) -> np.ndarray:
    """R(X, Y)Z of the ambient space (holomorphic/quaternionic curvature 4 eps)."""
    X, Y, Z = _check_vec(space, X, Y, Z)
    out = (Y @ Z) * X - (X @ Z) * Y
    for Ji in space.J:
        JX, JY, JZ = Ji @ X, Ji @ Y, Ji @ Z
        out += (JY @ Z) * JX - (JX @ Z) * JY - 2.0 * (JX @ Y) * JZ
    return -space.epsilon * out


def sectional_curvature(space: AmbientSpace, X, Y) -> float:
    X, Y = _check_vec(space, X, Y)
    area = (X @ X) * (Y @ Y) - (X @ Y) ** 2
    if area <= 0:
        raise InvalidArgumentError("X and Y span a degenerate plane")
    return float(curvature_tensor(space, X, Y, X) @ Y / area)


def tangent_basis(space: AmbientSpace, xi=None) -> np.ndarray:
    """Orthonormal basis of xi-perp as the columns of a (d, d-1) matrix.

    For the standard normal this is the first d - 1 basis vectors; otherwise
    the Householder reflection exchanging e_last and xi carries the standard
    basis over.
    """
    x = _as_normal(space, xi)
    d = space.real_dim
    e = np.zeros(d)
    e[-1] = 1.0
    v = e - x
    nv = np.linalg.norm(v)
    if nv < UNIT_TOL:
        return np.eye(d)[:, :-1]
    v /= nv
    H = np.eye(d) - 2.0 * np.outer(v, v)
    return H[:, :-1]


def normal_jacobi(space: AmbientSpace, xi=None, basis=None) -> np.ndarray:
    """Matrix of X -> R(xi, X)xi on xi-perp, in ``tangent_basis(space, xi)``."""
    x = _as_normal(space, xi)
    B = tangent_basis(space, x) if basis is None else np.asarray(basis, dtype=float)
    # R(xi, X)xi = eps (X - <X,xi>xi + 3 sum_i <J_i xi, X> J_i xi)
    d = space.real_dim
    Kfull = np.eye(d) - np.outer(x, x)
    for Ji in space.J:
        Jx = Ji @ x
        Kfull += 3.0 * np.outer(Jx, Jx)
    Kfull *= space.epsilon
    K = B.T @ Kfull @ B
    return 0.5 * (K + K.T)


@dataclass(frozen=True)
class JacobiEigenspace:
    kappa: float
    multiplicity: int
    basis: np.ndarray  # ambient vectors as columns


def jacobi_spectrum(space: AmbientSpace, xi=None) -> list[JacobiEigenspace]:
    """Eigendecomposition of the normal Jacobi operator, ascending in kappa."""
    x = _as_normal(space, xi)
    B = tangent_basis(space, x)
    w, V = np.linalg.eigh(normal_jacobi(space, x, B))
    out = []
    for kappa in sorted((space.epsilon * 4.0, space.epsilon * 1.0)):
        sel = np.abs(w - kappa) < 1e-8
        out.append(JacobiEigenspace(kappa, int(sel.sum()), B @ V[:, sel]))
    return out
