"""Pointwise spectral data of real hypersurfaces.

A ``HypersurfacePoint`` carries the shape operator ``A`` and normal Jacobi
operator ``K`` as matrices on the tangent space xi-perp (coordinates with
respect to ``ambient.tangent_basis``).  ``SpectralData`` is the compressed
form of a Hopf point: the Hopf curvature(s), the spectrum of A on the
maximal complex (quaternionic) subbundle D, and how the structure maps
J_i carry eigenspaces of A|D onto each other.

Pairings are stored one row per J-invariant plane: a row ``(a, b)`` says
that some unit vector Y with A Y = lambda_a Y has J Y in the lambda_b
eigenspace.  Self-paired entries contribute ``mult / 2`` rows ``(a, a)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .ambient import AmbientSpace, NormalVector, _as_normal, normal_jacobi, tangent_basis
from .errors import (
    AmbiguousPairingError,
    InvalidArgumentError,
    NotHopfError,
    PairingInconsistentError,
    UnsupportedClassificationError,
)

SYM_TOL = 1e-12
DEGENERATE_TOL = 1e-10
CLUSTER_TOL = 1e-7
PAIRING_THRESHOLD = 0.9


class HopfClass(enum.Enum):
    SMALL = "Small"
    LARGE = "Large"
    DEGENERATE = "Degenerate"
    OUTSIDE = "Outside"


# ---------------------------------------------------------------------------
# structure operators


def structure_vector(space: AmbientSpace, xi=None):
    """U = -J xi as an ambient vector; a triple (-J_i xi) for HH^n."""
    x = _as_normal(space, xi)
    Us = tuple(-(Ji @ x) for Ji in space.J)
    return Us if space.quaternionic else Us[0]


def almost_contact(space: AmbientSpace, xi=None, basis=None):
    """Tangential part P of J on xi-perp, in tangent coordinates.

    ``JX = PX + <X, U> xi`` for tangent X.  Returns a triple (P_1, P_2, P_3)
    for the quaternionic kind.
    """
    x = _as_normal(space, xi)
    B = tangent_basis(space, x) if basis is None else basis
    Ps = tuple(B.T @ Ji @ B for Ji in space.J)
    return Ps if space.quaternionic else Ps[0]


def _as_tuple(v):
    return v if isinstance(v, tuple) else (v,)


# ---------------------------------------------------------------------------
# points


class HypersurfacePoint:
    """Shape operator and normal Jacobi operator at a point of a hypersurface.

    Parameters
    ----------
    space : AmbientSpace
    A : array_like, shape (d-1, d-1)
        Symmetric shape operator in tangent coordinates.
    xi : array_like or NormalVector, optional
        Unit normal; defaults to the last basis vector.
    K : array_like, optional
        Normal Jacobi operator; computed from ``space`` when omitted.
    """

    def __init__(self, space: AmbientSpace, A, xi=None, K=None):
        self.space = space
        self.xi = NormalVector(_as_normal(space, xi))
        self.basis = tangent_basis(space, self.xi)
        m = space.real_dim - 1
        A = np.array(A, dtype=float)
        if A.shape != (m, m):
            raise InvalidArgumentError(f"shape operator has shape {A.shape}, expected {(m, m)}")
        if np.max(np.abs(A - A.T), initial=0.0) > SYM_TOL * max(1.0, np.max(np.abs(A))):
            raise InvalidArgumentError("shape operator is not symmetric")
        self.A = A
        if K is None:
            K = normal_jacobi(space, self.xi, self.basis)
        else:
            K = np.array(K, dtype=float)
            if K.shape != (m, m) or np.max(np.abs(K - K.T)) > SYM_TOL:
                raise InvalidArgumentError("Jacobi operator must be symmetric of the tangent size")
        self.K = K

    @property
    def U(self) -> tuple[np.ndarray, ...]:
        """Structure vector(s) in tangent coordinates."""
        return tuple(self.basis.T @ u for u in _as_tuple(structure_vector(self.space, self.xi)))

    @property
    def P(self) -> tuple[np.ndarray, ...]:
        return _as_tuple(almost_contact(self.space, self.xi, self.basis))


def is_curvature_adapted(point: HypersurfacePoint, tol: float = 1e-10) -> bool:
    A, K = point.A, point.K
    comm = np.linalg.norm(K @ A - A @ K)
    return bool(comm <= tol * (1.0 + np.linalg.norm(A) * np.linalg.norm(K)))


def is_hopf(point: HypersurfacePoint, tol: float = 1e-8):
    """Hopf curvature alpha = <AU, U> if U is principal, else None.

    For HH^n all three structure vectors must be principal and a triple of
    Hopf curvatures is returned.
    """
    alphas = []
    for u in point.U:
        Au = point.A @ u
        a = float(Au @ u)
        if np.linalg.norm(Au - a * u) > tol:
            return None
        alphas.append(a)
    return tuple(alphas) if point.space.quaternionic else alphas[0]


def hopf_class(alpha: float, epsilon: int, tol: float = DEGENERATE_TOL) -> HopfClass:
    if epsilon != -1:
        raise UnsupportedClassificationError("Hopf classes are defined for hyperbolic ambient spaces only")
    if abs(alpha - 2.0) <= tol:
        return HopfClass.DEGENERATE
    if alpha <= 0.0:
        return HopfClass.OUTSIDE
    return HopfClass.SMALL if alpha < 2.0 else HopfClass.LARGE


def lambda_star(alpha: float, lam: float, epsilon: int = -1):
    """J-partner of a principal curvature on D, or None if it is infinite.

    Solves (2 lambda* - alpha)(2 lambda - alpha) = alpha^2 + 4 epsilon.
    """
    num = alpha * alpha + 4.0 * epsilon
    den = 2.0 * lam - alpha
    if abs(den) <= 1e-14 * max(1.0, abs(alpha)):
        return lam if abs(num) <= 1e-14 * max(1.0, alpha * alpha) else None
    return alpha / 2.0 + num / (2.0 * den)


def pairing_residual(alpha: float, lam: float, lam_star: float, epsilon: int = -1) -> float:
    return (2.0 * lam - alpha) * (2.0 * lam_star - alpha) - (alpha * alpha + 4.0 * epsilon)


def commutes_with_structure(A, P, tol: float = 1e-10) -> bool:
    A = np.asarray(A, dtype=float)
    bound = tol * (1.0 + np.linalg.norm(A))
    return all(np.linalg.norm(A @ Pi - Pi @ A) <= bound for Pi in _as_tuple(P))


def covariant_derivative_U(A, P, X) -> np.ndarray:
    """nabla_X U = P A X."""
    return np.asarray(P) @ (np.asarray(A) @ np.asarray(X))


# ---------------------------------------------------------------------------
# spectral data


def _canonical(alphas, d_spectrum, pairings):
    entries = [(float(lam), int(m)) for lam, m in d_spectrum]
    order = sorted((i for i, (_, m) in enumerate(entries) if m > 0), key=lambda i: entries[i][0])
    merged: list[list] = []
    remap = {}
    for i in order:
        lam, m = entries[i]
        if merged and merged[-1][0] == lam:
            merged[-1][1] += m
        else:
            merged.append([lam, m])
        remap[i] = len(merged) - 1
    new_pairings = []
    for rows in pairings:
        rows2 = []
        for a, b in rows:
            a, b = remap[a], remap[b]
            rows2.append((min(a, b), max(a, b)))
        new_pairings.append(tuple(sorted(rows2)))
    return (
        tuple(float(a) for a in alphas),
        tuple((lam, m) for lam, m in merged),
        tuple(new_pairings),
    )


@dataclass(frozen=True)
class SpectralData:
    """Spectral data of a Hopf point.

    Attributes
    ----------
    alphas : tuple of float
        Hopf principal curvature(s): one value, or three for HH^n.
    d_spectrum : tuple of (lambda, multiplicity)
        Spectrum of A restricted to D, ascending.
    pairings : tuple of row tuples
        One pairing per structure map J_i, rows as described in the module
        docstring, indices into ``d_spectrum``.
    n, epsilon : int
    """

    alphas: tuple
    d_spectrum: tuple
    pairings: tuple
    n: int
    epsilon: int
    quaternionic: bool = field(default=False)

    def __post_init__(self):
        alphas = self.alphas if isinstance(self.alphas, (tuple, list)) else (self.alphas,)
        pairings = self.pairings
        if pairings and pairings[0] and not isinstance(pairings[0][0], (tuple, list)):
            pairings = (pairings,)
        a, d, p = _canonical(alphas, self.d_spectrum, pairings)
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "d_spectrum", d)
        object.__setattr__(self, "pairings", p)
        hdim = 3 if self.quaternionic else 1
        if len(a) != hdim or len(p) != hdim:
            raise InvalidArgumentError(f"expected {hdim} Hopf curvature(s) and pairing(s)")
        total = sum(m for _, m in d)
        expected = (4 * self.n - 4) if self.quaternionic else (2 * self.n - 2)
        if total != expected:
            raise InvalidArgumentError(f"D-multiplicities sum to {total}, expected {expected}")
        for rows in p:
            count = [0] * len(d)
            for i, j in rows:
                count[i] += 1
                count[j] += 1
            if count != [m for _, m in d]:
                raise InvalidArgumentError("pairing rows do not cover the D-spectrum multiplicities")

    @property
    def alpha(self) -> float:
        return self.alphas[0]

    @property
    def pairing(self) -> tuple:
        return self.pairings[0]

    @property
    def real_dim(self) -> int:
        return 4 * self.n if self.quaternionic else 2 * self.n

    @property
    def eigenvalues(self) -> np.ndarray:
        """All d - 1 principal curvatures, Hopf first."""
        vals = list(self.alphas)
        for lam, m in self.d_spectrum:
            vals.extend([lam] * m)
        return np.array(vals)

    def partners(self, i: int, which: int = 0) -> set[int]:
        out = set()
        for a, b in self.pairings[which]:
            if a == i:
                out.add(b)
            if b == i:
                out.add(a)
        return out

    def is_self_paired(self) -> bool:
        return all(a == b for rows in self.pairings for a, b in rows)

    def to_json(self) -> dict:
        q = self.quaternionic
        return {
            "alpha": list(self.alphas) if q else self.alpha,
            "d_spectrum": [[lam, m] for lam, m in self.d_spectrum],
            "pairing": [[list(r) for r in rows] for rows in self.pairings] if q else [list(r) for r in self.pairing],
            "n": self.n,
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SpectralData":
        q = isinstance(obj["alpha"], list)
        alphas = tuple(obj["alpha"]) if q else (obj["alpha"],)
        pairing = obj["pairing"]
        pairings = tuple(tuple(tuple(r) for r in rows) for rows in pairing) if q else (tuple(tuple(r) for r in pairing),)
        return cls(alphas, tuple(tuple(e) for e in obj["d_spectrum"]), pairings, obj["n"], obj["epsilon"], q)


def _space_of(data: SpectralData) -> AmbientSpace:
    if data.quaternionic:
        return AmbientSpace.HH(data.n)
    return AmbientSpace.CP(data.n) if data.epsilon > 0 else AmbientSpace.CH(data.n)


def _realify(W: np.ndarray) -> np.ndarray:
    """Real form of a complex matrix in the interleaved (Re, Im) coordinates."""
    m = W.shape[0]
    R = np.zeros((2 * m, 2 * m))
    R[0::2, 0::2] = W.real
    R[1::2, 1::2] = W.real
    R[0::2, 1::2] = -W.imag
    R[1::2, 0::2] = W.imag
    return R


def _quat_right(q: np.ndarray) -> np.ndarray:
    """Right multiplication by the quaternion q = (a, b, c, d) on (1, i, j, k)."""
    a, b, c, d = q
    return np.array([
        [a, -b, -c, -d],
        [b, a, d, -c],
        [c, -d, a, b],
        [d, c, -b, a],
    ])


def structure_isometry(space: AmbientSpace, rng: np.random.Generator) -> np.ndarray:
    """Random orthogonal map of the tangent space fixing xi, U and every J_i.

    Acts on D only (identity on the structure directions).
    """
    n = space.n
    m = space.real_dim - 1
    R = np.eye(m)
    if space.quaternionic:
        O, _ = np.linalg.qr(rng.standard_normal((n - 1, n - 1)))
        blocks = np.zeros((4 * (n - 1), 4 * (n - 1)))
        for j in range(n - 1):
            q = rng.standard_normal(4)
            blocks[4 * j:4 * j + 4, 4 * j:4 * j + 4] = _quat_right(q / np.linalg.norm(q))
        R[: 4 * (n - 1), : 4 * (n - 1)] = np.kron(O, np.eye(4)) @ blocks
    else:
        Z = rng.standard_normal((n - 1, n - 1)) + 1j * rng.standard_normal((n - 1, n - 1))
        W, _ = np.linalg.qr(Z)
        R[: 2 * (n - 1), : 2 * (n - 1)] = _realify(W)
    return R


def to_point(data: SpectralData, rng: np.random.Generator | None = None) -> HypersurfacePoint:
    """Build a shape operator realizing ``data`` at the standard normal.

    With ``rng`` the operator is conjugated by a random structure-preserving
    isometry so that it is no longer diagonal.
    """
    space = _space_of(data)
    m = space.real_dim - 1
    diag = np.zeros(m)
    if data.quaternionic:
        if not data.is_self_paired() or any(p != data.pairings[0] for p in data.pairings):
            raise InvalidArgumentError("quaternionic reconstruction needs self-paired, J-invariant eigenspaces")
        pos = 0
        for lam, mult in data.d_spectrum:
            if mult % 4:
                raise InvalidArgumentError("quaternionic multiplicities must be divisible by 4")
            diag[pos:pos + mult] = lam
            pos += mult
        # U_3, U_2, U_1 sit at block positions 0, 1, 2 of the last block
        diag[pos + 2], diag[pos + 1], diag[pos] = data.alphas
    else:
        lams = [lam for lam, _ in data.d_spectrum]
        for i, (a, b) in enumerate(data.pairing):
            diag[2 * i] = lams[a]
            diag[2 * i + 1] = lams[b]
        diag[m - 1] = data.alpha
    A = np.diag(diag)
    if rng is not None:
        R = structure_isometry(space, rng)
        A = R @ A @ R.T
        A = 0.5 * (A + A.T)
    return HypersurfacePoint(space, A)


def _d_basis(point: HypersurfacePoint) -> np.ndarray:
    Us = np.column_stack(point.U)
    Q, _ = np.linalg.qr(Us, mode="complete")
    return Q[:, Us.shape[1]:]


def _cluster(w: np.ndarray, tol: float) -> list[list[int]]:
    groups = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def extract_spectral_data(
    point: HypersurfacePoint,
    cluster_tol: float = CLUSTER_TOL,
    hopf_tol: float = 1e-8,
    threshold: float = PAIRING_THRESHOLD,
    check_pairing: bool = True,
) -> SpectralData:
    """Cluster the D-spectrum of a Hopf point and recover its J-pairing.

    For each pair of eigenspaces (T_a, T_b) the singular values of the block
    T_b^T J T_a are either ~1 (J carries a vector of T_a into T_b) or ~0.
    Any singular value between ``1 - threshold`` and ``threshold`` means J
    mixes eigenspaces and raises ``AmbiguousPairingError``.

    Raises
    ------
    NotHopfError
    AmbiguousPairingError
    PairingInconsistentError
        When ``check_pairing`` and a pairing row violates
        (2a - alpha)(2b - alpha) = alpha^2 + 4 eps.
    """
    alphas = is_hopf(point, hopf_tol)
    if alphas is None:
        raise NotHopfError("structure vector is not a principal direction")
    alphas = _as_tuple(alphas)
    space = point.space
    D = _d_basis(point)
    AD = D.T @ point.A @ D
    w, V = np.linalg.eigh(0.5 * (AD + AD.T))
    groups = _cluster(w, cluster_tol)
    entries = [(float(np.mean(w[g])), len(g)) for g in groups]
    bases = [V[:, g] for g in groups]
    pairings = []
    for Pi in point.P:
        PD = D.T @ Pi @ D
        rows = []
        for a, Va in enumerate(bases):
            covered = 0
            for b, Vb in enumerate(bases):
                s = np.linalg.svd(Vb.T @ PD @ Va, compute_uv=False)
                if np.any((s > 1.0 - threshold) & (s < threshold)):
                    raise AmbiguousPairingError(
                        f"J mixes eigenspaces {entries[a][0]:.6g} and {entries[b][0]:.6g}"
                    )
                k = int(np.sum(s >= threshold))
                covered += k
                if b > a:
                    rows.extend([(a, b)] * k)
                elif b == a:
                    if k % 2:
                        raise AmbiguousPairingError(f"odd J-invariant part in eigenspace {entries[a][0]:.6g}")
                    rows.extend([(a, a)] * (k // 2))
            if covered != entries[a][1]:
                raise AmbiguousPairingError(f"J-image of eigenspace {entries[a][0]:.6g} not resolved")
        pairings.append(tuple(rows))
    eps = space.epsilon
    if check_pairing:
        for alpha, rows in zip(alphas, pairings):
            scale = max(1.0, alpha * alpha)
            for a, b in set(rows):
                r = pairing_residual(alpha, entries[a][0], entries[b][0], eps)
                if abs(r) > 1e3 * cluster_tol * scale:
                    raise PairingInconsistentError(
                        f"pair ({entries[a][0]:.6g}, {entries[b][0]:.6g}) has residual {r:.3g}"
                    )
    return SpectralData(alphas, entries, tuple(pairings), space.n, eps, space.quaternionic)


def hopf_class_of(data: SpectralData, tol: float = DEGENERATE_TOL) -> HopfClass:
    classes = {hopf_class(a, data.epsilon, tol) for a in data.alphas}
    if len(classes) != 1:
        return HopfClass.OUTSIDE
    return classes.pop()


def max_pairing_residual(data: SpectralData) -> float:
    res = 0.0
    lams = [lam for lam, _ in data.d_spectrum]
    for alpha, rows in zip(data.alphas, data.pairings):
        for a, b in rows:
            res = max(res, abs(pairing_residual(alpha, lams[a], lams[b], data.epsilon)))
    return res


def isclose_data(x: SpectralData, y: SpectralData, tol: float) -> bool:
    """Same structure and all curvatures within ``tol`` (relative to max(1, |v|))."""
    if (x.n, x.epsilon, x.quaternionic, x.pairings) != (y.n, y.epsilon, y.quaternionic, y.pairings):
        return False
    if [m for _, m in x.d_spectrum] != [m for _, m in y.d_spectrum]:
        return False
    vx = list(x.alphas) + [lam for lam, _ in x.d_spectrum]
    vy = list(y.alphas) + [lam for lam, _ in y.d_spectrum]
    return all(math.isclose(a, b, rel_tol=tol, abs_tol=tol) for a, b in zip(vx, vy))
