"""Matrix convex combinations, compressions and matrix-convex-hull membership.

Hull membership is linearized through completely positive maps: a point X
at level n lies in the matrix convex hull of generators A^(1), ..., A^(m)
iff there are CP maps Phi_i from level-n_i matrices to level-n matrices
with sum_i Phi_i(A^(i)_j) = X_j for every coordinate j and
sum_i Phi_i(I) = I.  Each Phi_i is encoded by its Choi matrix (a PSD
block), which turns membership into an affine + PSD feasibility problem.
Member verdicts come with Kraus factors extracted from the Choi blocks and
are re-verified as an explicit matrix convex combination; NotMember is
only ever heuristic (a solver stall), never a certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ArityMismatchError,
    ConstructionError,
    NotContractionError,
    PartitionOfUnityViolatedError,
    ZeroGammaError,
)
from .feasibility import (
    FEASIBLE,
    STALLED_INFEASIBLE,
    AffinePSDProblem,
    AffineRow,
    solve_feasibility,
)
from .linalg import (
    DEFAULT_TOL,
    MatrixTuple,
    ScaledTolerance,
    as_hermitian,
    eig_hermitian,
    spectral_norm,
)

__all__ = [
    "MatrixConvexCombination",
    "apply_combination",
    "compress",
    "GammaPoint",
    "gamma_point",
    "ChoiSystem",
    "build_choi_system",
    "kraus_from_choi",
    "HullReport",
    "MEMBER",
    "NOT_MEMBER_HEURISTIC",
    "UNDECIDED",
    "hull_membership",
]

MEMBER = "Member"
NOT_MEMBER_HEURISTIC = "NotMemberHeuristic"
UNDECIDED = "Undecided"

PARTITION_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MatrixConvexCombination:
    """Terms (X^i, gamma_i) representing sum_i gamma_i^* X^i gamma_i at the target level."""

    terms: tuple
    target_level: int

    def __init__(self, terms, target_level: int):
        checked = []
        gram = np.zeros((target_level, target_level), dtype=complex)
        for point, gamma in terms:
            gamma = np.asarray(gamma, dtype=complex)
            if gamma.shape != (point.level, target_level):
                raise ArityMismatchError(
                    f"gamma must be {point.level} x {target_level}, got {gamma.shape}"
                )
            gram += gamma.conj().T @ gamma
            checked.append((point, gamma))
        if spectral_norm(gram - np.eye(target_level)) > PARTITION_TOL:
            raise PartitionOfUnityViolatedError(
                "sum gamma_i^* gamma_i differs from the identity beyond 1e-10"
            )
        object.__setattr__(self, "terms", tuple(checked))
        object.__setattr__(self, "target_level", target_level)

    @property
    def proper(self) -> bool:
        """True when every gamma_i is surjective (full row rank)."""
        for point, gamma in self.terms:
            s = np.linalg.svd(gamma, compute_uv=False)
            if s.size < point.level or s[point.level - 1] <= 1e-12:
                return False
        return True

    def to_dict(self):
        from .pencils import point_to_json, _matrix_to_json

        return {
            "target_level": self.target_level,
            "terms": [
                {"point": point_to_json(p), "gamma": _matrix_to_json(g)}
                for p, g in self.terms
            ],
        }


def apply_combination(c: MatrixConvexCombination) -> MatrixTuple:
    """Evaluate sum_i gamma_i^* X^i gamma_i coordinatewise."""
    g = c.terms[0][0].g
    n = c.target_level
    out = [np.zeros((n, n), dtype=complex) for _ in range(g)]
    for point, gamma in c.terms:
        if point.g != g:
            raise ArityMismatchError("all terms must share the number of coordinates")
        gh = gamma.conj().T
        for j, coord in enumerate(point.coords):
            out[j] += gh @ coord @ gamma
    return MatrixTuple([(M + M.conj().T) / 2.0 for M in out], validate=False)


def compress(X: MatrixTuple, alpha, tol: ScaledTolerance = DEFAULT_TOL) -> MatrixTuple:
    """alpha^* X alpha for a contraction alpha with X.level rows."""
    A = np.asarray(alpha, dtype=complex)
    if A.ndim != 2 or A.shape[0] != X.level:
        raise ArityMismatchError("alpha must have X.level rows")
    if spectral_norm(A) > 1.0 + 1e-12:
        raise NotContractionError(f"operator norm {spectral_norm(A):.6f} exceeds 1")
    return X.conjugate(A)


@dataclass(frozen=True, eq=False)
class GammaPoint:
    """A point (gamma^* gamma, gamma^* A gamma) of the trace-one Gram family."""

    gram: np.ndarray
    image: MatrixTuple
    source_level: int


def gamma_point(
    A: MatrixTuple, gamma, tol: ScaledTolerance = DEFAULT_TOL
) -> GammaPoint:
    """Form (gamma^* gamma, gamma^* A gamma), reducing to a surjective factor.

    When gamma is rank deficient, (A, gamma) is replaced by the compression
    onto range(gamma) before the pair is formed, so the recorded source
    level equals rank(gamma).
    """
    G = np.asarray(gamma, dtype=complex)
    if G.ndim != 2 or G.shape[0] != A.level:
        raise ArityMismatchError("gamma must have A.level rows")
    tr = float(np.trace(G.conj().T @ G).real)
    if abs(tr - 1.0) > PARTITION_TOL:
        raise ZeroGammaError(f"trace(gamma^* gamma) = {tr:.6f}, expected 1")
    U, s, _ = np.linalg.svd(G)
    t = tol.eff(s[0] if s.size else 0.0)
    rank = int((s > t).sum())
    if rank == 0:
        raise ZeroGammaError("gamma is numerically zero")
    if rank < A.level:
        xi = U[:, :rank].conj().T  # isometry onto range(gamma), written as rows
        A = A.conjugate(xi.conj().T)
        G = xi @ G
    gram = G.conj().T @ G
    gram = (gram + gram.conj().T) / 2.0
    return GammaPoint(gram=gram, image=A.conjugate(G), source_level=rank)


# ---------------------------------------------------------------------------
# Choi encoding of hull membership
# ---------------------------------------------------------------------------


@dataclass
class ChoiSystem:
    """Feasibility instance for hull membership, one PSD Choi block per generator."""

    problem: AffinePSDProblem
    generators: list
    target: MatrixTuple

    @property
    def block_dims(self):
        return self.problem.block_dims


def _choi_rows_for_matrix(
    generators, X_entrywise: np.ndarray, pick, n: int
) -> list:
    """Affine rows forcing sum_i Phi_i(pick(A^(i))) == X_entrywise.

    pick maps a generator to the matrix plugged into its CP map (a
    coordinate, or the identity for the unital row).  One real row per
    diagonal entry, two per strict upper entry.
    """
    rows = []
    for s in range(n):
        for t_col in range(s, n):
            # with E = e_t e_s^T, tr(kron(B^T, E) C) equals Phi(B)[s, t]
            E = np.zeros((n, n), dtype=complex)
            E[t_col, s] = 1.0
            coeff_re, coeff_im = [], []
            for gen in generators:
                B = pick(gen)
                K = np.kron(B.T, E)
                coeff_re.append((K + K.conj().T) / 2.0)
                coeff_im.append((-1j * K + (-1j * K).conj().T) / 2.0)
            target = X_entrywise[s, t_col]
            rows.append(AffineRow(tuple(coeff_re), float(target.real)))
            if t_col > s:
                rows.append(AffineRow(tuple(coeff_im), float(target.imag)))
    return rows


def build_choi_system(
    generators, X: MatrixTuple, tol: ScaledTolerance = DEFAULT_TOL
) -> ChoiSystem:
    """Affine + PSD encoding of "X is a matrix convex combination of the generators"."""
    if not generators:
        raise ConstructionError("at least one generator is required")
    g = X.g
    for gen in generators:
        if gen.g != g:
            raise ArityMismatchError("generators and X must share the coordinate count")
    n = X.level
    block_dims = [gen.level * n for gen in generators]
    rows = []
    for j in range(g):
        rows.extend(
            _choi_rows_for_matrix(generators, X.coords[j], lambda gen: gen.coords[j], n)
        )
    rows.extend(
        _choi_rows_for_matrix(
            generators,
            np.eye(n, dtype=complex),
            lambda gen: np.eye(gen.level, dtype=complex),
            n,
        )
    )
    return ChoiSystem(AffinePSDProblem(block_dims, rows, tol=tol), list(generators), X)


def kraus_from_choi(
    C: np.ndarray, source_dim: int, target_dim: int, cutoff: float = 1e-10
) -> list:
    """Kraus factors gamma_k (source_dim x target_dim) of a Choi block.

    The CP map acts as Phi(B) = sum_k gamma_k^* B gamma_k.
    """
    C = as_hermitian(C)
    w, V = eig_hermitian(C)
    lam_max = float(w[-1]) if w.size else 0.0
    factors = []
    for lam, vec in zip(w, V.T):
        if lam <= max(cutoff, 1e-12 * max(lam_max, 1.0)):
            continue
        W = vec.reshape(source_dim, target_dim)  # rows are the block slices
        factors.append(np.sqrt(lam) * W.conj())
    return factors


@dataclass
class HullReport:
    status: str
    combination: MatrixConvexCombination | None
    choi_blocks: list | None
    distance: float
    iterations: int

    def witness_to_json(self):
        from .pencils import _matrix_to_json

        if self.combination is None:
            return None
        return [
            _matrix_to_json(gamma) for _, gamma in self.combination.terms
        ]


def hull_membership(
    generators,
    X: MatrixTuple,
    tol: ScaledTolerance = DEFAULT_TOL,
    max_iter: int = 20000,
) -> HullReport:
    """Decide membership of X in mconv of the generators (one-sided certificate).

    Member is sound: the Kraus expansion of the Choi witness is re-applied
    as an explicit matrix convex combination and must reproduce X within
    10 * tol.  NotMemberHeuristic only reports a solver stall.
    """
    system = build_choi_system(generators, X, tol)
    report = solve_feasibility(system.problem, max_iter=max_iter)
    scale = max(1.0, X.norm(), *(gen.norm() for gen in generators))
    t_eff = tol.eff(scale)
    if report.status == STALLED_INFEASIBLE:
        return HullReport(
            NOT_MEMBER_HEURISTIC, None, None, report.residuals[1], report.iterations
        )
    if report.status != FEASIBLE:
        return HullReport(UNDECIDED, None, None, report.residuals[0], report.iterations)

    n = X.level
    terms = []
    partition = np.zeros((n, n), dtype=complex)
    for gen, C in zip(system.generators, report.point):
        for gamma in kraus_from_choi(C, gen.level, n):
            terms.append((gen, gamma))
            partition += gamma.conj().T @ gamma
    gap = spectral_norm(partition - np.eye(n))
    if gap > 10 * t_eff:
        return HullReport(UNDECIDED, None, report.point, gap, report.iterations)
    # orthonormal correction of the partition, then verify the combination
    w, V = eig_hermitian(partition)
    fix = (V / np.sqrt(w)) @ V.conj().T
    terms = [(gen, gamma @ fix) for gen, gamma in terms]
    combo = MatrixConvexCombination(terms, n)
    reproduced = apply_combination(combo)
    err = reproduced.distance(X)
    if err > 10 * t_eff:
        return HullReport(UNDECIDED, None, report.point, err, report.iterations)
    return HullReport(MEMBER, combo, report.point, err, report.iterations)
