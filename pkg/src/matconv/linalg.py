"""Hermitian linear algebra shared by every other module.

All matrices are complex numpy arrays.  Hermitian inputs are validated and
symmetrized on entry; rank and singularity decisions go through a scaled
tolerance plus a spectral-gap rule so that downstream predicates
(boundary membership, kernel dimensions, exposure) are auditable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AmbiguousRankError,
    ArityMismatchError,
    ConstructionError,
    EquivalenceInconclusiveError,
    GramMismatchError,
    RankDeficientError,
    SolverError,
)

__all__ = [
    "ScaledTolerance",
    "DEFAULT_TOL",
    "MatrixTuple",
    "as_hermitian",
    "eig_hermitian",
    "spectral_norm",
    "kernel_basis",
    "is_psd",
    "POSITIVE_DEFINITE",
    "PSD_SINGULAR",
    "INDEFINITE",
    "douglas_unitary",
    "unitarily_equivalent",
    "herm_basis",
    "herm_to_vec",
    "vec_to_herm",
    "random_hermitian",
    "random_unitary",
]

HERMITICITY_RTOL = 1e-12

POSITIVE_DEFINITE = "PositiveDefinite"
PSD_SINGULAR = "PositiveSemidefiniteSingular"
INDEFINITE = "Indefinite"


@dataclass(frozen=True)
class ScaledTolerance:
    """Absolute + relative tolerance; the effective value scales with the input."""

    absolute: float = 1e-9
    relative: float = 1e-9

    def __post_init__(self):
        if not (np.isfinite(self.absolute) and np.isfinite(self.relative)):
            raise ConstructionError("tolerances must be finite")
        if self.absolute < 0 or self.relative < 0:
            raise ConstructionError("tolerances must be nonnegative")

    def eff(self, scale: float) -> float:
        """Effective tolerance for an object of the given norm."""
        return self.absolute + self.relative * abs(scale)

    def for_matrix(self, M: np.ndarray) -> float:
        return self.eff(spectral_norm(M))


DEFAULT_TOL = ScaledTolerance()


def as_hermitian(M, tol: ScaledTolerance = DEFAULT_TOL) -> np.ndarray:
    """Validate and symmetrize a square matrix.

    Asymmetry beyond ``1e-12 * ||M||`` is treated as a construction error
    rather than silently averaged away.
    """
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConstructionError(f"expected a square matrix, got shape {A.shape}")
    herm = (A + A.conj().T) / 2.0
    scale = max(1.0, float(np.linalg.norm(herm, 2))) if herm.size else 1.0
    gap = float(np.linalg.norm(A - herm, 2)) if herm.size else 0.0
    if gap > HERMITICITY_RTOL * scale:
        raise ConstructionError(
            f"matrix is not Hermitian: asymmetry {gap:.3e} exceeds {HERMITICITY_RTOL:.0e}*norm"
        )
    return herm


@dataclass(frozen=True, eq=False)
class MatrixTuple:
    """A point X in S_n^g: a g-tuple of Hermitian n x n matrices."""

    coords: tuple = field()

    def __init__(self, coords: Iterable, validate: bool = True):
        mats = tuple(np.asarray(c, dtype=complex) for c in coords)
        if not mats:
            raise ConstructionError("a matrix tuple needs at least one coordinate")
        if validate:
            mats = tuple(as_hermitian(c) for c in mats)
        n = mats[0].shape[0]
        for c in mats:
            if c.shape != (n, n):
                raise ConstructionError("all coordinates must share the same dimension")
        object.__setattr__(self, "coords", mats)

    @property
    def level(self) -> int:
        return self.coords[0].shape[0]

    @property
    def g(self) -> int:
        return len(self.coords)

    @staticmethod
    def scalar(values: Sequence[float]) -> "MatrixTuple":
        """Level-1 point from a real vector."""
        return MatrixTuple([np.array([[complex(v)]]) for v in values])

    def as_vector(self) -> np.ndarray:
        """Level-1 tuple back to a real g-vector."""
        if self.level != 1:
            raise ConstructionError("as_vector needs a level-1 tuple")
        return np.array([c[0, 0].real for c in self.coords])

    def scaled_identity(self, n: int) -> "MatrixTuple":
        """The n-fold direct sum of a level-1 point: v -> v (x) I_n."""
        if self.level != 1:
            raise ConstructionError("scaled_identity needs a level-1 tuple")
        eye = np.eye(n)
        return MatrixTuple([c[0, 0].real * eye for c in self.coords], validate=False)

    def conjugate(self, gamma: np.ndarray) -> "MatrixTuple":
        """gamma^* X gamma, coordinatewise (no contraction check)."""
        gamma = np.asarray(gamma, dtype=complex)
        if gamma.shape[0] != self.level:
            raise ArityMismatchError(
                f"gamma has {gamma.shape[0]} rows, tuple lives at level {self.level}"
            )
        gh = gamma.conj().T
        return MatrixTuple(
            [(gh @ c @ gamma + (gh @ c @ gamma).conj().T) / 2.0 for c in self.coords],
            validate=False,
        )

    def direct_sum(self, other: "MatrixTuple") -> "MatrixTuple":
        if other.g != self.g:
            raise ArityMismatchError("direct sum needs matching numbers of coordinates")
        n, m = self.level, other.level
        out = []
        for a, b in zip(self.coords, other.coords):
            c = np.zeros((n + m, n + m), dtype=complex)
            c[:n, :n] = a
            c[n:, n:] = b
            out.append(c)
        return MatrixTuple(out, validate=False)

    def add(self, other: "MatrixTuple", weight: float = 1.0) -> "MatrixTuple":
        if other.g != self.g or other.level != self.level:
            raise ArityMismatchError("tuple addition needs matching shapes")
        return MatrixTuple(
            [a + weight * b for a, b in zip(self.coords, other.coords)], validate=False
        )

    def scale(self, t: float) -> "MatrixTuple":
        return MatrixTuple([t * c for c in self.coords], validate=False)

    def norm(self) -> float:
        return max(spectral_norm(c) for c in self.coords)

    def distance(self, other: "MatrixTuple") -> float:
        return max(
            spectral_norm(a - b) for a, b in zip(self.coords, other.coords)
        )

    def __repr__(self):
        return f"MatrixTuple(level={self.level}, g={self.g})"


def spectral_norm(M: np.ndarray) -> float:
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def eig_hermitian(M) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, orthonormal eigenvector columns) and
    checks the reconstruction residual; failure raises SolverError with the
    residual attached.
    """
    H = as_hermitian(M)
    try:
        w, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails
        raise SolverError(f"eigensolver did not converge: {exc}") from exc
    scale = max(1.0, float(np.abs(w).max()) if w.size else 1.0)
    residual = spectral_norm(H - (V * w) @ V.conj().T)
    if residual > 1e-10 * scale:
        raise SolverError("eigendecomposition residual too large", residual=residual)
    return w, V


def is_psd(M, tol: ScaledTolerance = DEFAULT_TOL) -> tuple[str, float]:
    """Trichotomy (PositiveDefinite | PositiveSemidefiniteSingular | Indefinite).

    Returns the verdict together with the smallest eigenvalue.
    """
    H = as_hermitian(M)
    if H.shape[0] == 0:
        return POSITIVE_DEFINITE, float("inf")
    w, _ = eig_hermitian(H)
    lam_min = float(w[0])
    t = tol.eff(float(np.abs(w).max()) if w.size else 0.0)
    if lam_min > t:
        return POSITIVE_DEFINITE, lam_min
    if lam_min < -t:
        return INDEFINITE, lam_min
    return PSD_SINGULAR, lam_min


GAP_FACTOR = 10.0


def kernel_basis(M, tol: ScaledTolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the numerical kernel of a Hermitian matrix.

    Columns span {v : |lambda| <= tol_eff for the corresponding eigenvalue}.
    A rank decision without a factor-10 spectral gap between the largest
    "zero" and the smallest "nonzero" eigenvalue raises AmbiguousRankError.
    """
    w, V = eig_hermitian(M)
    t = tol.eff(float(np.abs(w).max()) if w.size else 0.0)
    absw = np.abs(w)
    zero_mask = absw <= t
    if zero_mask.any() and (~zero_mask).any():
        max_zero = float(absw[zero_mask].max())
        min_nonzero = float(absw[~zero_mask].min())
        if max_zero > 0 and min_nonzero < GAP_FACTOR * max_zero:
            raise AmbiguousRankError(
                f"spectral gap {min_nonzero / max_zero:.2f} below {GAP_FACTOR}",
                max_zero=max_zero,
                min_nonzero=min_nonzero,
            )
    return V[:, zero_mask]


def douglas_unitary(
    gamma, delta, tol: ScaledTolerance = DEFAULT_TOL
) -> np.ndarray:
    """Recover the unitary U with gamma = U delta from equal Gram matrices.

    Both factors must be surjective; U is computed as
    gamma delta^* (delta delta^*)^{-1} and verified.
    """
    G = np.asarray(gamma, dtype=complex)
    D = np.asarray(delta, dtype=complex)
    if G.ndim != 2 or D.ndim != 2 or G.shape[1] != D.shape[1]:
        raise ConstructionError("factors must be matrices with a common column count")
    scale = max(1.0, spectral_norm(G), spectral_norm(D))
    t = tol.eff(scale)
    for name, A in (("gamma", G), ("delta", D)):
        s = np.linalg.svd(A, compute_uv=False)
        if A.shape[0] > A.shape[1] or s.size == 0 or s[-1] <= t:
            raise RankDeficientError(f"{name} is not surjective (smallest s.v. <= tol)")
    gram_gap = spectral_norm(G.conj().T @ G - D.conj().T @ D)
    if G.shape[0] != D.shape[0] or gram_gap > max(t, 1e-10 * scale**2):
        raise GramMismatchError(f"Gram matrices differ by {gram_gap:.3e}")
    DDh = D @ D.conj().T
    U = G @ D.conj().T @ np.linalg.inv(DDh)
    r = U.shape[0]
    unitary_gap = spectral_norm(U.conj().T @ U - np.eye(r))
    if unitary_gap > 1e-10 * max(1.0, spectral_norm(U) ** 2):
        raise GramMismatchError(
            f"recovered factor is not unitary (defect {unitary_gap:.3e})"
        )
    recon_gap = spectral_norm(G - U @ D)
    if recon_gap > max(t, 1e-8 * scale):
        raise GramMismatchError(f"gamma - U delta has norm {recon_gap:.3e}")
    return U


# ---------------------------------------------------------------------------
# Unitary equivalence of Hermitian tuples
# ---------------------------------------------------------------------------


def _trace_words_mismatch(
    X: MatrixTuple, Y: MatrixTuple, max_len: int, word_budget: int, rtol: float
) -> bool:
    """True when some trace word certifies X and Y are not unitarily equivalent.

    Words are enumerated breadth-first by length; enumeration stops at
    ``word_budget`` words.  A mismatch is a sound certificate of
    non-equivalence; agreement is only evidence.
    """
    n = X.level
    scale = max(1.0, X.norm(), Y.norm())
    Xs = [c / scale for c in X.coords]
    Ys = [c / scale for c in Y.coords]
    frontier = [(np.eye(n, dtype=complex), np.eye(n, dtype=complex))]
    count = 0
    for _ in range(max_len):
        nxt = []
        for wx, wy in frontier:
            for cx, cy in zip(Xs, Ys):
                px, py = wx @ cx, wy @ cy
                if abs(np.trace(px) - np.trace(py)) > rtol * n:
                    return True
                nxt.append((px, py))
                count += 1
                if count >= word_budget:
                    return False
        frontier = nxt
    return False


def _phase_alignment(P: np.ndarray, Q: np.ndarray, floor: float) -> np.ndarray | None:
    """Diagonal phases d with P diag(d) = diag(d) Q, when entries permit."""
    n = P.shape[0]
    d = np.zeros(n, dtype=complex)
    d[0] = 1.0
    known = [0]
    unknown = set(range(1, n))
    while unknown:
        progress = False
        for q in list(unknown):
            for p in known:
                # P[p,q] d[q] = d[p] Q[p,q]  and  P[q,p] d[p] = d[q] Q[q,p]
                if abs(P[p, q]) > floor and abs(Q[p, q]) > floor:
                    d[q] = d[p] * Q[p, q] / P[p, q]
                elif abs(Q[q, p]) > floor and abs(P[q, p]) > floor:
                    d[q] = d[p] * P[q, p] / Q[q, p]
                else:
                    continue
                d[q] /= abs(d[q])
                known.append(q)
                unknown.discard(q)
                progress = True
                break
        if not progress:
            # disconnected entry graph: free phase
            q = unknown.pop()
            d[q] = 1.0
            known.append(q)
    return d


def _blockdiag_intertwiner(
    Xs: Sequence[np.ndarray],
    Ys: Sequence[np.ndarray],
    VX: np.ndarray,
    VY: np.ndarray,
    clusters: list[np.ndarray],
) -> np.ndarray | None:
    """Least-squares block-diagonal solve of P B = B Q followed by a polar fix-up."""
    n = VX.shape[0]
    Ps = [VX.conj().T @ c @ VX for c in Xs]
    Qs = [VY.conj().T @ c @ VY for c in Ys]
    # unknowns: entries of B restricted to the block-diagonal pattern
    pattern = []
    for idx in clusters:
        for a in idx:
            for b in idx:
                pattern.append((a, b))
    m = len(pattern)
    rows = []
    for P, Q in zip(Ps, Qs):
        # (P B - B Q)[a, b] = sum_k P[a,k] B[k,b] - B[a,k] Q[k,b]
        for a in range(n):
            for b in range(n):
                row = np.zeros(m, dtype=complex)
                for j, (k, l) in enumerate(pattern):
                    if l == b:
                        row[j] += P[a, k]
                    if k == a:
                        row[j] -= Q[l, b]
                rows.append(row)
    A = np.array(rows)
    Ar = np.vstack([np.hstack([A.real, -A.imag]), np.hstack([A.imag, A.real])])
    _, s, vt = np.linalg.svd(Ar)
    vec = vt[-1]
    bvec = vec[:m] + 1j * vec[m:]
    B = np.zeros((n, n), dtype=complex)
    for j, (k, l) in enumerate(pattern):
        B[k, l] = bvec[j]
    # project each diagonal block to the nearest unitary
    for idx in clusters:
        blk = B[np.ix_(idx, idx)]
        u, _, vh = np.linalg.svd(blk)
        B[np.ix_(idx, idx)] = u @ vh
    return VX @ B @ VY.conj().T


def unitarily_equivalent(
    X: MatrixTuple,
    Y: MatrixTuple,
    tol: ScaledTolerance = DEFAULT_TOL,
    word_length: int | None = None,
    word_budget: int = 20000,
    restarts: int = 32,
    seed: int = 7,
) -> bool:
    """Decide whether U^* X_i U = Y_i for some unitary U.

    Trace-word invariants (length bound default 2 n^2) give sound ``False``
    answers; ``True`` is only returned with an explicitly verified unitary
    witness.  When invariants agree but no witness is found within the
    restart budget, EquivalenceInconclusiveError is raised instead of
    guessing.
    """
    if X.level != Y.level or X.g != Y.g:
        raise ArityMismatchError("tuples must share level and number of coordinates")
    n, g = X.level, X.g
    scale = max(1.0, X.norm(), Y.norm())
    t = tol.eff(scale)
    if X.distance(Y) <= t:
        return True
    if word_length is None:
        word_length = 2 * n * n
    if _trace_words_mismatch(X, Y, word_length, word_budget, rtol=1e-8):
        return False

    rng = np.random.default_rng(seed)

    def verify(U: np.ndarray) -> bool:
        if U is None:
            return False
        if spectral_norm(U.conj().T @ U - np.eye(n)) > 1e-8:
            return False
        return all(
            spectral_norm(U.conj().T @ x @ U - y) <= max(t, 1e-8 * scale)
            for x, y in zip(X.coords, Y.coords)
        )

    for attempt in range(restarts):
        if attempt == 0:
            c = np.ones(g)
        else:
            c = rng.normal(size=g)
        HX = sum(ci * xi for ci, xi in zip(c, X.coords))
        HY = sum(ci * yi for ci, yi in zip(c, Y.coords))
        wX, VX = eig_hermitian(HX)
        wY, VY = eig_hermitian(HY)
        if np.max(np.abs(wX - wY)) > max(t, 1e-7 * scale):
            return False
        gaps = np.diff(wX)
        cluster_tol = max(t, 1e-7 * scale)
        # cluster indices of (numerically) equal eigenvalues
        clusters, current = [], [0]
        for i, gp in enumerate(gaps):
            if gp <= cluster_tol:
                current.append(i + 1)
            else:
                clusters.append(np.array(current))
                current = [i + 1]
        clusters.append(np.array(current))

        if g == 1:
            U = VX @ VY.conj().T
            if verify(U):
                return True
            continue
        if all(len(idx) == 1 for idx in clusters):
            j = 1 if attempt % 2 == 0 else rng.integers(0, g)
            P = VX.conj().T @ X.coords[j] @ VX
            Q = VY.conj().T @ Y.coords[j] @ VY
            d = _phase_alignment(P, Q, floor=1e-8 * scale)
            if d is not None and verify(VX @ np.diag(d) @ VY.conj().T):
                return True
        U = _blockdiag_intertwiner(X.coords, Y.coords, VX, VY, clusters)
        if verify(U):
            return True
    raise EquivalenceInconclusiveError(
        "trace invariants match but no unitary witness found within budget"
    )


# ---------------------------------------------------------------------------
# Real coordinates on Hermitian space
# ---------------------------------------------------------------------------


def herm_basis(n: int) -> list[np.ndarray]:
    """Orthonormal real basis of Hermitian n x n matrices under Re tr(A^* B)."""
    basis = []
    for p in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[p, p] = 1.0
        basis.append(E)
    inv = 1.0 / np.sqrt(2.0)
    for p in range(n):
        for q in range(p + 1, n):
            E = np.zeros((n, n), dtype=complex)
            E[p, q] = inv
            E[q, p] = inv
            basis.append(E)
            F = np.zeros((n, n), dtype=complex)
            F[p, q] = 1j * inv
            F[q, p] = -1j * inv
            basis.append(F)
    return basis


def herm_to_vec(M: np.ndarray) -> np.ndarray:
    """Isometric embedding of a Hermitian matrix into R^{n^2}."""
    n = M.shape[0]
    out = np.empty(n * n)
    out[:n] = np.diagonal(M).real
    k = n
    s = np.sqrt(2.0)
    for p in range(n):
        for q in range(p + 1, n):
            out[k] = s * M[p, q].real
            out[k + 1] = s * M[p, q].imag
            k += 2
    return out


def vec_to_herm(v: np.ndarray, n: int) -> np.ndarray:
    M = np.zeros((n, n), dtype=complex)
    M[np.diag_indices(n)] = v[:n]
    k = n
    inv = 1.0 / np.sqrt(2.0)
    for p in range(n):
        for q in range(p + 1, n):
            M[p, q] = (v[k] + 1j * v[k + 1]) * inv
            M[q, p] = (v[k] - 1j * v[k + 1]) * inv
            k += 2
    return M


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (A + A.conj().T) / 2.0


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(A)
    return Q * (np.diagonal(R) / np.abs(np.diagonal(R)))
