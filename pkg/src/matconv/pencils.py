"""Linear pencils and free spectrahedra.

A pencil L(x) = A0 + sum_i A_i x_i with Hermitian k x k coefficients is
evaluated at a Hermitian tuple X via Kronecker products with the
coefficient on the left:

    L(X) = A0 (x) I_n + sum_i A_i (x) X_i,

so block (p, q) of size n x n equals sum_i (A_i)_{pq} X_i + (A0)_{pq} I_n.
The block layout matters: every kernel-vector reshape downstream assumes it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    ArityMismatchError,
    ConstructionError,
    NotInteriorError,
    RayUnboundedError,
)
from .linalg import (
    DEFAULT_TOL,
    INDEFINITE,
    POSITIVE_DEFINITE,
    MatrixTuple,
    ScaledTolerance,
    as_hermitian,
    eig_hermitian,
    kernel_basis,
    spectral_norm,
)

__all__ = [
    "LinearPencil",
    "MembershipReport",
    "INTERIOR",
    "BOUNDARY",
    "OUTSIDE",
    "evaluate",
    "homogeneous_evaluate",
    "membership",
    "monicize",
    "MonicRecord",
    "boundary_sample",
    "interior_base",
    "random_direction",
    "sample_members",
    "interval_pencil",
    "cube_pencil",
    "disk_pencil",
    "polytope_pencil",
    "triangle_pencil",
    "simplex_pencil",
    "pencil_to_json",
    "pencil_from_json",
    "point_to_json",
    "point_from_json",
]

INTERIOR = "Interior"
BOUNDARY = "Boundary"
OUTSIDE = "Outside"


@dataclass(frozen=True, eq=False)
class LinearPencil:
    """Hermitian coefficient tuple (A0, A_1, ..., A_g)."""

    A0: np.ndarray
    coeffs: tuple

    def __init__(self, A0, coeffs):
        A0 = as_hermitian(A0)
        mats = tuple(as_hermitian(c) for c in coeffs)
        if not mats:
            raise ConstructionError("a pencil needs at least one variable coefficient")
        k = A0.shape[0]
        for c in mats:
            if c.shape != (k, k):
                raise ConstructionError("all pencil coefficients must be k x k")
        object.__setattr__(self, "A0", A0)
        object.__setattr__(self, "coeffs", mats)

    @property
    def k(self) -> int:
        return self.A0.shape[0]

    @property
    def g(self) -> int:
        return len(self.coeffs)

    @property
    def monic(self) -> bool:
        return spectral_norm(self.A0 - np.eye(self.k)) <= 1e-12

    def __repr__(self):
        return f"LinearPencil(k={self.k}, g={self.g}, monic={self.monic})"


def _check_arity(L: LinearPencil, X: MatrixTuple):
    if X.g != L.g:
        raise ArityMismatchError(f"pencil has g={L.g} variables, point has g={X.g}")


def evaluate(L: LinearPencil, X: MatrixTuple) -> np.ndarray:
    """L(X) = A0 (x) I_n + sum_i A_i (x) X_i, a Hermitian (k n) x (k n) matrix."""
    _check_arity(L, X)
    n = X.level
    out = np.kron(L.A0, np.eye(n, dtype=complex))
    for A, x in zip(L.coeffs, X.coords):
        out += np.kron(A, x)
    return (out + out.conj().T) / 2.0


def homogeneous_evaluate(L: LinearPencil, X: MatrixTuple) -> np.ndarray:
    """The linear part sum_i A_i (x) X_i (no constant block)."""
    _check_arity(L, X)
    out = np.zeros((L.k * X.level, L.k * X.level), dtype=complex)
    for A, x in zip(L.coeffs, X.coords):
        out += np.kron(A, x)
    return (out + out.conj().T) / 2.0


@dataclass(frozen=True)
class MembershipReport:
    verdict: str
    margin: float
    kernel_dim: int

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "margin": self.margin,
            "kernel_dim": self.kernel_dim,
        }


def membership(
    L: LinearPencil, X: MatrixTuple, tol: ScaledTolerance = DEFAULT_TOL
) -> MembershipReport:
    """Interior / Boundary / Outside trichotomy of X relative to D_L."""
    M = evaluate(L, X)
    w, _ = eig_hermitian(M)
    margin = float(w[0])
    t = tol.eff(float(np.abs(w).max()) if w.size else 0.0)
    if margin > t:
        return MembershipReport(INTERIOR, margin, 0)
    if margin < -t:
        return MembershipReport(OUTSIDE, margin, 0)
    kdim = kernel_basis(M, tol).shape[1]
    return MembershipReport(BOUNDARY, margin, kdim)


@dataclass(frozen=True)
class MonicRecord:
    """Affine change of variables produced by monicization: x -> x + v, conjugated."""

    center: np.ndarray  # the interior level-1 point v
    inv_sqrt: np.ndarray  # L(v)^{-1/2}


def monicize(
    L: LinearPencil, v: MatrixTuple, tol: ScaledTolerance = DEFAULT_TOL
) -> tuple[LinearPencil, MonicRecord]:
    """Normalize to a monic pencil around an interior level-1 point.

    Returns L'(x) = L(v)^{-1/2} L(x + v) L(v)^{-1/2} with A0' = I.
    """
    if v.level != 1:
        raise ConstructionError("monicize needs a level-1 interior point")
    rep = membership(L, v, tol)
    if rep.verdict != INTERIOR:
        raise NotInteriorError(f"center is {rep.verdict} (margin {rep.margin:.3e})")
    Mv = evaluate(L, v)
    w, V = eig_hermitian(Mv)
    inv_sqrt = (V / np.sqrt(w)) @ V.conj().T
    coeffs = [inv_sqrt @ A @ inv_sqrt for A in L.coeffs]
    monic = LinearPencil(np.eye(L.k), coeffs)
    return monic, MonicRecord(center=v.as_vector(), inv_sqrt=inv_sqrt)


def interior_base(L: LinearPencil, n: int) -> MatrixTuple:
    """The n-th amplification of the origin; valid base when 0 is interior."""
    return MatrixTuple([np.zeros((n, n))] * L.g, validate=False)


def boundary_sample(
    L: LinearPencil,
    n: int,
    direction: MatrixTuple,
    base: MatrixTuple,
    tol: ScaledTolerance = DEFAULT_TOL,
    horizon: float = 1e6,
    max_bisect: int = 200,
) -> MatrixTuple:
    """Walk from an interior base along a ray until L becomes singular.

    Deterministic bracketing (doubling) plus bisection; the minimum
    eigenvalue of L along a ray is concave, so the crossing is unique.
    Raises RayUnboundedError when no crossing exists up to the horizon.
    """
    _check_arity(L, direction)
    if direction.level != n or base.level != n:
        raise ArityMismatchError("direction and base must live at the requested level")
    if direction.norm() <= 0:
        raise ConstructionError("direction must be nonzero")
    rep = membership(L, base, tol)
    if rep.verdict != INTERIOR:
        raise NotInteriorError("base point must be interior")

    def lam_min(t: float) -> float:
        w, _ = eig_hermitian(evaluate(L, base.add(direction, t)))
        return float(w[0])

    def target_tol(t: float) -> float:
        return 1e-9 * (1.0 + base.add(direction, t).norm())

    hi = 1.0
    while lam_min(hi) > target_tol(hi):
        hi *= 2.0
        if hi > horizon:
            raise RayUnboundedError("no boundary crossing up to the horizon")
    if abs(lam_min(hi)) <= target_tol(hi):
        return base.add(direction, hi)
    lo = 0.0
    for _ in range(max_bisect):
        mid = 0.5 * (lo + hi)
        f = lam_min(mid)
        if abs(f) <= target_tol(mid):
            return base.add(direction, mid)
        if f > 0:
            lo = mid
        else:
            hi = mid
    return base.add(direction, 0.5 * (lo + hi))


def random_direction(rng: np.random.Generator, g: int, n: int) -> MatrixTuple:
    """Random Hermitian direction tuple with unit norm."""
    from .linalg import random_hermitian

    coords = [random_hermitian(rng, n) for _ in range(g)]
    X = MatrixTuple(coords, validate=False)
    return X.scale(1.0 / max(X.norm(), 1e-12))


def sample_members(
    L: LinearPencil,
    n: int,
    rng: np.random.Generator,
    count: int,
    base: MatrixTuple | None = None,
    boundary_fraction: float = 0.6,
    tol: ScaledTolerance = DEFAULT_TOL,
    max_retries: int = 40,
) -> list:
    """Seeded boundary + interior samples of D_L(n).

    The base defaults to the origin amplification and must be interior
    (monicize first otherwise).  Unbounded directions are retried; a pencil
    that is unbounded in every probed direction raises RayUnboundedError.
    """
    if base is None:
        base = interior_base(L, n)
    if membership(L, base, tol).verdict != INTERIOR:
        raise NotInteriorError("sampling base must be interior; monicize the pencil")
    out = []
    n_boundary = int(round(count * boundary_fraction))
    failures = 0
    while len(out) < n_boundary:
        direction = random_direction(rng, L.g, n)
        try:
            out.append(boundary_sample(L, n, direction, base, tol))
        except RayUnboundedError:
            failures += 1
            if failures > max_retries:
                raise
    while len(out) < count:
        direction = random_direction(rng, L.g, n)
        try:
            edge = boundary_sample(L, n, direction, base, tol)
        except RayUnboundedError:
            failures += 1
            if failures > max_retries:
                raise
            continue
        t = rng.uniform(0.05, 0.95)
        out.append(base.add(edge.add(base, -1.0), t))
    return out


# ---------------------------------------------------------------------------
# Stock pencils used throughout the tests and demos
# ---------------------------------------------------------------------------


def interval_pencil(a: float = 0.0, b: float = 1.0) -> LinearPencil:
    """L(x) = diag(x - a, b - x); D(n) is the matrix interval [aI, bI]."""
    if not a < b:
        raise ConstructionError("interval needs a < b")
    return LinearPencil(np.diag([-a, b]), [np.diag([1.0, -1.0])])


def cube_pencil(g: int) -> LinearPencil:
    """Direct sum of diag(1 - x_i, 1 + x_i); D(n) is the free cube [-I, I]^g."""
    k = 2 * g
    A0 = np.eye(k)
    coeffs = []
    for i in range(g):
        A = np.zeros((k, k))
        A[2 * i, 2 * i] = -1.0
        A[2 * i + 1, 2 * i + 1] = 1.0
        coeffs.append(A)
    return LinearPencil(A0, coeffs)


def disk_pencil() -> LinearPencil:
    """D(1) is the closed unit disk in the (x1, x2) plane."""
    A1 = np.array([[0.0, 1.0], [1.0, 0.0]])
    A2 = np.array([[0.0, 1j], [-1j, 0.0]])
    return LinearPencil(np.eye(2), [A1, A2])


def polytope_pencil(normals: np.ndarray, offsets: np.ndarray) -> LinearPencil:
    """Diagonal pencil of the polytope {x : normals @ x <= offsets}."""
    normals = np.asarray(normals, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    m, g = normals.shape
    A0 = np.diag(offsets)
    coeffs = [np.diag(-normals[:, i]) for i in range(g)]
    return LinearPencil(A0, coeffs)


def triangle_pencil() -> LinearPencil:
    """Triangle with vertices (0,0), (3,0), (0,3)."""
    normals = np.array([[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]])
    offsets = np.array([0.0, 0.0, 3.0])
    return polytope_pencil(normals, offsets)


def simplex_pencil(d: int) -> LinearPencil:
    """Unit simplex {x >= 0, sum x <= 1} in R^d."""
    normals = np.vstack([-np.eye(d), np.ones((1, d))])
    offsets = np.concatenate([np.zeros(d), [1.0]])
    return polytope_pencil(normals, offsets)


# ---------------------------------------------------------------------------
# JSON schemas
# ---------------------------------------------------------------------------


def _matrix_to_json(M: np.ndarray):
    return [
        [{"re": float(M[i, j].real), "im": float(M[i, j].imag)} for j in range(M.shape[1])]
        for i in range(M.shape[0])
    ]


def _matrix_from_json(rows) -> np.ndarray:
    try:
        return np.array(
            [[complex(e["re"], e.get("im", 0.0)) for e in row] for row in rows]
        )
    except (TypeError, KeyError) as exc:
        raise ConstructionError(f"malformed matrix entry: {exc}") from exc


def pencil_to_json(L: LinearPencil) -> dict:
    return {
        "k": L.k,
        "g": L.g,
        "A0": _matrix_to_json(L.A0),
        "A": [_matrix_to_json(A) for A in L.coeffs],
    }


def pencil_from_json(obj) -> LinearPencil:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        k, g = int(obj["k"]), int(obj["g"])
        A0 = _matrix_from_json(obj["A0"])
        coeffs = [_matrix_from_json(A) for A in obj["A"]]
    except (TypeError, KeyError, ValueError) as exc:
        raise ConstructionError(f"malformed pencil JSON: {exc}") from exc
    if A0.shape != (k, k) or len(coeffs) != g:
        raise ConstructionError("pencil JSON dimensions disagree with k/g fields")
    return LinearPencil(A0, coeffs)


def point_to_json(X: MatrixTuple) -> dict:
    return {
        "level": X.level,
        "g": X.g,
        "coords": [_matrix_to_json(c) for c in X.coords],
    }


def point_from_json(obj) -> MatrixTuple:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        level = int(obj["level"])
        coords = [_matrix_from_json(c) for c in obj["coords"]]
    except (TypeError, KeyError, ValueError) as exc:
        raise ConstructionError(f"malformed point JSON: {exc}") from exc
    X = MatrixTuple(coords)
    if X.level != level:
        raise ConstructionError("point JSON level disagrees with matrix sizes")
    return X
