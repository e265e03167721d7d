"""Faces of spectrahedron levels and the matrix-face certificate verifiers.

A face of D_L(n) is canonically represented by the kernel of L at a
generating point: the unique face containing X in its relative interior is

    F(X) = {Y in D_L(n) : L(Y) v = 0 for every v in ker L(X)},

and its affine span is the solution set of the homogeneous system
"kernel annihilated" in the difference Y - X.  All matrix-face properties
quantify over every proper matrix convex decomposition, so their verifiers
run bounded falsification searches: verdicts are NoCounterexample or
Counterexample, never Proven.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .convexity import (
    MEMBER,
    MatrixConvexCombination,
    apply_combination,
    hull_membership,
)
from .errors import (
    AmbiguousRankError,
    ConstructionError,
    NotVertexError,
    VerificationFailedError,
)
from .feasibility import (
    FEASIBLE,
    AffinePSDProblem,
    AffineRow,
    solve_feasibility,
)
from .linalg import (
    DEFAULT_TOL,
    GAP_FACTOR,
    MatrixTuple,
    ScaledTolerance,
    eig_hermitian,
    herm_basis,
    kernel_basis,
    random_unitary,
    spectral_norm,
)
from .pencils import (
    BOUNDARY,
    INTERIOR,
    OUTSIDE,
    LinearPencil,
    evaluate,
    homogeneous_evaluate,
    membership,
    sample_members,
)

__all__ = [
    "FaceDescriptor",
    "face_of",
    "ExposedFaceFunctional",
    "exposed_face_functional",
    "ExplicitFace",
    "FaceVerdict",
    "NO_COUNTEREXAMPLE",
    "COUNTEREXAMPLE",
    "matrix_face_verify",
    "ExposedFaceReport",
    "matrix_exposed_face_verify",
    "MconvMultiface",
    "SingleLevelMultiface",
    "multiface_verify",
    "positively_generated_kernel",
]

NO_COUNTEREXAMPLE = "NoCounterexample"
COUNTEREXAMPLE = "Counterexample"


def _nullspace_gap(
    M: np.ndarray, tol: ScaledTolerance
) -> np.ndarray:
    """Null space of a real matrix with the shared spectral-gap rank rule."""
    if M.shape[0] == 0:
        return np.eye(M.shape[1])
    _, s, Vt = np.linalg.svd(M)
    smax = s[0] if s.size else 0.0
    t = tol.eff(smax)
    zero = s <= t
    nonzero = ~zero
    if zero.any() and nonzero.any():
        max_zero = float(s[zero].max())
        min_nonzero = float(s[nonzero].min())
        if max_zero > 0 and min_nonzero < GAP_FACTOR * max_zero:
            raise AmbiguousRankError(
                "singular values lack the rank gap",
                max_zero=max_zero,
                min_nonzero=min_nonzero,
            )
    rank = int(nonzero.sum())
    basis = Vt[rank:].T
    if basis.size == 0:
        return np.zeros((M.shape[1], 0))
    return basis


@dataclass(frozen=True, eq=False)
class FaceDescriptor:
    """Kernel-encoded face of D_L(n) through a generating point."""

    pencil: LinearPencil
    level: int
    generator: MatrixTuple
    kernel: np.ndarray  # (k n) x d orthonormal columns
    directions: tuple  # orthonormal basis of the homogeneous solution space

    @property
    def dim(self) -> int:
        return len(self.directions)

    def contains(self, Y: MatrixTuple, tol: ScaledTolerance = DEFAULT_TOL) -> bool:
        if Y.level != self.level or Y.g != self.generator.g:
            return False
        if membership(self.pencil, Y, tol).verdict == OUTSIDE:
            return False
        if self.kernel.shape[1] == 0:
            return True
        M = evaluate(self.pencil, Y)
        scale = max(1.0, spectral_norm(M))
        gap = spectral_norm(M @ self.kernel)
        return gap <= 100 * tol.eff(scale)

    def sample(
        self, rng: np.random.Generator, tol: ScaledTolerance = DEFAULT_TOL
    ) -> MatrixTuple:
        """A point of the face near the generator (relative-interior biased)."""
        if not self.directions:
            return self.generator
        coeffs = rng.normal(size=len(self.directions))
        H = None
        for c, D in zip(coeffs, self.directions):
            H = D.scale(c) if H is None else H.add(D, c)
        H = H.scale(1.0 / max(H.norm(), 1e-12))
        t_max = _max_step(self.pencil, self.generator, H, tol)
        t = rng.uniform(0.0, 0.8) * t_max
        Y = self.generator.add(H, t)
        return Y if self.contains(Y, tol) else self.generator

    def to_dict(self):
        from .pencils import point_to_json

        return {
            "level": self.level,
            "dim": self.dim,
            "kernel_dim": int(self.kernel.shape[1]),
            "generator": point_to_json(self.generator),
        }


def _max_step(
    L: LinearPencil, X: MatrixTuple, H: MatrixTuple, tol: ScaledTolerance
) -> float:
    """Largest t with X + tH still a member, by doubling + bisection."""

    def ok(t: float) -> bool:
        return membership(L, X.add(H, t), tol).verdict != OUTSIDE

    if not ok(1e-9):
        return 0.0
    hi = 1.0
    while ok(hi):
        hi *= 2.0
        if hi > 1e6:
            return 1e6
    lo = 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _annihilation_system(
    L: LinearPencil, n: int, kernel: np.ndarray
) -> np.ndarray:
    """Real matrix of the map Y -> (sum_i A_i (x) Y_i) v over kernel columns v."""
    g = L.g
    basis = herm_basis(n)
    cols = []
    for j in range(g):
        for B in basis:
            op = np.kron(L.coeffs[j], B)
            img = op @ kernel  # (k n) x d complex
            cols.append(np.concatenate([img.real.ravel(), img.imag.ravel()]))
    if not cols:
        return np.zeros((0, 0))
    return np.array(cols).T


def face_of(
    L: LinearPencil, n: int, X: MatrixTuple, tol: ScaledTolerance = DEFAULT_TOL
) -> FaceDescriptor:
    """The unique face of D_L(n) containing X in its relative interior."""
    rep = membership(L, X, tol)
    if rep.verdict == OUTSIDE:
        raise ConstructionError("X is not a member of D_L(n)")
    M = evaluate(L, X)
    kernel = kernel_basis(M, tol) if rep.verdict == BOUNDARY else np.zeros((L.k * n, 0))
    system = _annihilation_system(L, n, kernel)
    if kernel.shape[1] == 0:
        null = np.eye(L.g * n * n)
    else:
        null = _nullspace_gap(system, tol)
    basis = herm_basis(n)
    directions = []
    for col in null.T:
        coords = []
        for j in range(L.g):
            chunk = col[j * n * n : (j + 1) * n * n]
            coords.append(sum(c * B for c, B in zip(chunk, basis)))
        directions.append(MatrixTuple(coords, validate=False))
    return FaceDescriptor(
        pencil=L, level=n, generator=X, kernel=kernel, directions=tuple(directions)
    )


# ---------------------------------------------------------------------------
# Exposing functionals of faces
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ExposedFaceFunctional:
    """Affine functional with ell <= a on D_L(n) and equality exactly on the face."""

    gradient: tuple  # Hermitian matrices G_j: ell(Y) = sum_j tr(G_j Y_j)
    bound: float

    def value(self, Y: MatrixTuple) -> float:
        return float(
            sum(np.trace(G @ c).real for G, c in zip(self.gradient, Y.coords))
        )

    def gap(self, Y: MatrixTuple) -> float:
        return self.bound - self.value(Y)


def exposed_face_functional(
    L: LinearPencil,
    n: int,
    F: FaceDescriptor,
    tol: ScaledTolerance = DEFAULT_TOL,
    verify_samples: int = 50,
    seed: int = 11,
) -> ExposedFaceFunctional:
    """Exposing functional of a face from its kernel columns.

    ell(Y) = -sum_v v^* (sum_j A_j (x) Y_j) v  and  a = sum_v v^* (A0 (x) I) v,
    so that ell <= a on D_L(n) with equality exactly on the face; the
    equality pattern is re-verified on seeded samples.
    """
    if F.kernel.shape[1] == 0:
        raise ConstructionError("the whole level is not an exposed proper face")
    k = L.k
    grads = []
    for j in range(L.g):
        S = np.zeros((n, n), dtype=complex)
        for v in F.kernel.T:
            W = v.reshape(k, n)
            S += np.einsum("pq,qu,pv->uv", L.coeffs[j], W, W.conj())
        G = -(S + S.conj().T) / 2.0
        grads.append(G)
    a = 0.0
    A0n = np.kron(L.A0, np.eye(n))
    for v in F.kernel.T:
        a += float((v.conj() @ (A0n @ v)).real)
    func = ExposedFaceFunctional(gradient=tuple(grads), bound=a)

    rng = np.random.default_rng(seed)
    scale = max(1.0, abs(a))
    if abs(func.gap(F.generator)) > 1e-8 * scale:
        raise VerificationFailedError("functional does not vanish on the generator")
    for _ in range(5):
        Y = F.sample(rng, tol)
        if abs(func.gap(Y)) > 1e-8 * scale:
            raise VerificationFailedError("functional not constant on face samples")
    for Y in sample_members(L, n, rng, verify_samples, tol=tol):
        gap = func.gap(Y)
        if gap < -1e-8 * scale:
            raise VerificationFailedError("functional exceeds its bound on a member")
        if not F.contains(Y, tol) and gap <= tol.eff(scale):
            raise VerificationFailedError(
                "a sampled non-face point achieves equality"
            )
    return func


# ---------------------------------------------------------------------------
# Matrix-face falsification
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ExplicitFace:
    """Candidate face given by an explicit finite point set (convex hull)."""

    points: tuple

    def __init__(self, points):
        pts = tuple(points)
        if not pts:
            raise ConstructionError("an explicit face needs at least one point")
        lvl = pts[0].level
        if any(p.level != lvl for p in pts):
            raise ConstructionError("explicit face points must share one level")
        object.__setattr__(self, "points", pts)

    @property
    def level(self) -> int:
        return self.points[0].level

    @property
    def generator(self) -> MatrixTuple:
        return self.points[0]

    def contains(self, Y: MatrixTuple, tol: ScaledTolerance = DEFAULT_TOL) -> bool:
        if Y.level != self.level:
            return False
        scale = max(1.0, Y.norm())
        t = 100 * tol.eff(scale)
        if any(Y.distance(p) <= t for p in self.points):
            return True
        if len(self.points) == 1:
            return False
        # classical convex combination fit on the simplex of points
        diffs = np.array(
            [
                np.concatenate([(c - q).ravel() for c, q in zip(p.coords, Y.coords)])
                for p in self.points
            ]
        ).T
        m = len(self.points)
        A = np.vstack(
            [
                np.vstack([diffs.real, diffs.imag]),
                np.ones((1, m)),
            ]
        )
        b = np.zeros(A.shape[0])
        b[-1] = 1.0
        w, *_ = np.linalg.lstsq(A, b, rcond=None)
        if np.any(w < -1e-8):
            return False
        w = np.clip(w, 0.0, None)
        w /= w.sum()
        mix = None
        for wi, p in zip(w, self.points):
            mix = p.scale(wi) if mix is None else mix.add(p, wi)
        return Y.distance(mix) <= t

    def sample(self, rng: np.random.Generator, tol=DEFAULT_TOL) -> MatrixTuple:
        w = rng.dirichlet(np.ones(len(self.points)))
        mix = None
        for wi, p in zip(w, self.points):
            mix = p.scale(wi) if mix is None else mix.add(p, wi)
        return mix


@dataclass
class FaceVerdict:
    verdict: str
    combination: MatrixConvexCombination | None
    reason: str
    attempts: int

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "reason": self.reason,
            "attempts": self.attempts,
            "combination": None
            if self.combination is None
            else self.combination.to_dict(),
        }


def _reduce_to_proper(terms, tol: ScaledTolerance):
    """Drop negligible factors and compress non-surjective gammas.

    Returns eq-1.1 terms whose gammas are all onto; compressions of members
    stay members, so the result is still a decomposition over the set.
    """
    kept = []
    for point, gamma in terms:
        weight = float(np.trace(gamma.conj().T @ gamma).real)
        if weight <= 1e-10:
            continue
        U, s, _ = np.linalg.svd(gamma)
        t = tol.eff(s[0] if s.size else 0.0)
        rank = int((s > max(t, 1e-8)).sum())
        if rank < point.level:
            xi = U[:, :rank].conj().T
            point = point.conjugate(xi.conj().T)
            gamma = xi @ gamma
        kept.append((point, gamma))
    return kept


def _decomposition_candidates(
    D: LinearPencil,
    target: MatrixTuple,
    levels,
    rng,
    tol: ScaledTolerance,
    pool_size: int = 10,
    max_iter: int = 4000,
):
    """Proper decompositions of the target from sampled members of D."""
    pool = []
    for lvl in levels:
        want = max(2, pool_size // len(levels))
        pool.extend(sample_members(D, lvl, rng, want, tol=tol))
    report = hull_membership(pool, target, tol=tol, max_iter=max_iter)
    if report.status != MEMBER:
        return None
    terms = _reduce_to_proper(report.combination.terms, tol)
    if not terms:
        return None
    combo = MatrixConvexCombination(terms, target.level)
    if apply_combination(combo).distance(target) > 100 * tol.eff(max(1.0, target.norm())):
        return None
    return combo


def _cstar_convexity_spot_check(face, D, rng, tol, rounds: int = 5):
    """Sampled C*-convex combinations of face members must stay in the face."""
    n = face.level if hasattr(face, "level") else face.generator.level
    for _ in range(rounds):
        k = int(rng.integers(1, 3))
        raw = [
            rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(k)
        ]
        stack = np.vstack(raw)
        Q, _ = np.linalg.qr(stack)
        gammas = [Q[i * n : (i + 1) * n, :] for i in range(k)]
        pts = [face.sample(rng, tol) for _ in range(k)]
        combo = MatrixConvexCombination(list(zip(pts, gammas)), n)
        mixed = apply_combination(combo)
        if not face.contains(mixed, tol):
            return combo
    return None


def matrix_face_verify(
    D: LinearPencil,
    F,
    type: str = "face",
    budget: int = 2000,
    seed: int = 5,
    tol: ScaledTolerance = DEFAULT_TOL,
) -> FaceVerdict:
    """Bounded falsification of the matrix-face property of F in D.

    type "face": components of proper combinations landing in F must stay
    at the face level and inside F; "cstar_face" restricts decompositions
    to square gammas and spot-checks C*-convexity; "weak_face" only asks
    components to be unitarily equivalent into F.
    """
    if type not in ("face", "cstar_face", "weak_face"):
        raise ConstructionError(f"unknown face type {type!r}")
    rng = np.random.default_rng(seed)
    n = F.level
    attempts = 0

    def components_ok(combo) -> tuple[bool, str]:
        for point, gamma in combo.terms:
            if point.level != n:
                return False, f"component at level {point.level} != {n}"
            if type == "weak_face":
                ok = _ue_into_face(point, F, rng, tol)
                if ok is False:
                    return False, "component not unitarily equivalent into F"
            else:
                if not F.contains(point, tol):
                    return False, "component escapes F"
        return True, ""

    lam = [n] if type == "cstar_face" else list(range(1, n + 1))
    rounds = max(3, budget // 400)
    for round_idx in range(rounds):
        attempts += 1
        target = F.sample(rng, tol)
        combo = _decomposition_candidates(
            D, target, lam, rng, tol, pool_size=8 + 2 * round_idx
        )
        if combo is not None:
            ok, why = components_ok(combo)
            if not ok:
                return FaceVerdict(COUNTEREXAMPLE, combo, why, attempts)
        # unitary mixing: T = sum (U_i/sqrt m)^* (U_i T U_i^*) (U_i/sqrt m)
        m = int(rng.integers(2, 4))
        us = [random_unitary(rng, n) for _ in range(m)]
        terms = [
            (target.conjugate(U.conj().T), U / np.sqrt(m)) for U in us
        ]
        combo = MatrixConvexCombination(terms, n)
        ok, why = components_ok(combo)
        if not ok:
            return FaceVerdict(COUNTEREXAMPLE, combo, why, attempts)
        # segment route inside the level
        chord = _segment_decomposition(D, target, rng, tol)
        if chord is not None:
            ok, why = components_ok(chord)
            if not ok:
                return FaceVerdict(COUNTEREXAMPLE, chord, why, attempts)
    if type == "cstar_face":
        bad = _cstar_convexity_spot_check(F, D, rng, tol)
        if bad is not None:
            return FaceVerdict(
                COUNTEREXAMPLE, bad, "F is not C*-convex on samples", attempts
            )
    return FaceVerdict(NO_COUNTEREXAMPLE, None, "no violation found", attempts)


def _ue_into_face(point, F, rng, tol):
    """Is the point unitarily equivalent to some member of F (sample-based)?"""
    from .linalg import unitarily_equivalent
    from .errors import EquivalenceInconclusiveError

    probes = [F.generator] if hasattr(F, "generator") else []
    probes += [F.sample(rng, tol) for _ in range(3)]
    for q in probes:
        try:
            if unitarily_equivalent(point, q, tol):
                return True
        except EquivalenceInconclusiveError:
            return None
    return False


def _segment_decomposition(D, target, rng, tol):
    """target = (target+tH)/2 + (target-tH)/2 as a proper C*-combination."""
    n = target.level
    from .pencils import random_direction

    H = random_direction(rng, D.g, n)
    t_plus = _max_step(D, target, H, tol)
    t_minus = _max_step(D, target, H.scale(-1.0), tol)
    t = 0.5 * min(t_plus, t_minus)
    if t <= 1e-9:
        return None
    gam = np.eye(n) / np.sqrt(2.0)
    return MatrixConvexCombination(
        [(target.add(H, t), gam), (target.add(H, -t), gam)], n
    )


# ---------------------------------------------------------------------------
# Matrix exposed faces
# ---------------------------------------------------------------------------


@dataclass
class ExposedFaceReport:
    psd_on_samples: bool
    strict_below_n: bool
    locus_matches: bool
    joint_kernel_dim: int
    kernel_components_rank: int
    counterexample: MatrixTuple | None
    level_cap: int

    @property
    def confirmed(self) -> bool:
        return (
            self.psd_on_samples
            and self.strict_below_n
            and self.locus_matches
            and self.joint_kernel_dim >= 1
        )

    def to_dict(self):
        return {
            "psd_on_samples": self.psd_on_samples,
            "strict_below_n": self.strict_below_n,
            "locus_matches": self.locus_matches,
            "joint_kernel_dim": self.joint_kernel_dim,
            "kernel_components_rank": self.kernel_components_rank,
            "confirmed": self.confirmed,
            "level_cap": self.level_cap,
        }


def matrix_exposed_face_verify(
    D: LinearPencil,
    F,
    pair,
    budget: int = 600,
    r_max: int | None = None,
    weak: bool = False,
    seed: int = 9,
    tol: ScaledTolerance = DEFAULT_TOL,
) -> ExposedFaceReport:
    """Sample-based check of the three exposed-face conditions for (Phi, alpha).

    (i) domination at levels r <= r_max, (ii) strictness below the face
    level, (iii) the singular locus at the face level equals F (its unitary
    orbit when weak=True); plus the joint-kernel structure: the
    intersection of the kernels over the face is nontrivial, and when it is
    one-dimensional its components span C^n.
    """
    from .extremality import exposure_pencil, _singular_locus_samples

    n = F.level
    if pair.level != n:
        raise ConstructionError("pair level must match the face level")
    if r_max is None:
        r_max = 2 * n
    rng = np.random.default_rng(seed)
    E = exposure_pencil(pair)
    per_level = max(4, budget // (6 * max(r_max, 1)))

    psd_ok, strict_ok, locus_ok = True, True, True
    counterexample = None
    for r in range(1, r_max + 1):
        pts = sample_members(D, r, rng, per_level, tol=tol)
        if r == n:
            pts.append(F.generator)
            pts.extend(F.sample(rng, tol) for _ in range(3))
        for B in pts:
            w, _ = eig_hermitian(evaluate(E, B))
            lam = float(w[0])
            t = tol.eff(float(np.abs(w).max()) if w.size else 0.0)
            if lam < -t:
                psd_ok = False
                counterexample = counterexample or B
            elif r < n and lam <= t:
                strict_ok = False
                counterexample = counterexample or B

    # (iii): face samples singular, sampled singular points inside F
    face_pts = [F.generator] + [F.sample(rng, tol) for _ in range(4)]
    for T in face_pts:
        w, _ = eig_hermitian(evaluate(E, T))
        t = tol.eff(float(np.abs(w).max()) if w.size else 0.0)
        if float(w[0]) > t:
            locus_ok = False
            counterexample = counterexample or T
    for B in _singular_locus_samples(D, E, n, rng, count=max(6, budget // 100), tol=tol):
        inside = (
            _ue_into_face(B, F, rng, tol) if weak else F.contains(B, tol)
        )
        if inside is False:
            locus_ok = False
            counterexample = counterexample or B

    # joint kernel over the face: ker of the PSD sum equals the intersection
    S = np.zeros((n * n, n * n), dtype=complex)
    for T in face_pts:
        S += evaluate(E, T)
    w, V = eig_hermitian(S)
    t = tol.eff(float(np.abs(w).max()) if w.size else 0.0)
    mask = np.abs(w) <= max(t, 1e-7 * max(1.0, float(np.abs(w).max())))
    joint = V[:, mask]
    jdim = int(joint.shape[1])
    comp_rank = 0
    if jdim >= 1:
        Wm = joint[:, 0].reshape(n, n)
        s = np.linalg.svd(Wm, compute_uv=False)
        comp_rank = int((s > tol.eff(s[0] if s.size else 0.0)).sum())
    return ExposedFaceReport(
        psd_on_samples=psd_ok,
        strict_below_n=strict_ok,
        locus_matches=locus_ok,
        joint_kernel_dim=jdim,
        kernel_components_rank=comp_rank,
        counterexample=counterexample,
        level_cap=r_max,
    )


# ---------------------------------------------------------------------------
# Multifaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MconvMultiface:
    """Candidate multiface given as the matrix convex hull of generators."""

    generators: tuple

    def __init__(self, generators):
        gens = tuple(generators)
        if not gens:
            raise ConstructionError("need at least one generator")
        object.__setattr__(self, "generators", gens)

    def levels(self, n_max: int):
        return list(range(1, n_max + 1))

    def contains(self, Y: MatrixTuple, tol: ScaledTolerance = DEFAULT_TOL) -> bool:
        report = hull_membership(self.generators, Y, tol=tol, max_iter=6000)
        return report.status == MEMBER

    def sample(self, n: int, rng: np.random.Generator) -> MatrixTuple:
        pool = [g for g in self.generators if g.level <= n]
        if not pool:
            pool = list(self.generators)
        k = int(rng.integers(1, min(3, len(pool)) + 1))
        picks = [pool[int(rng.integers(0, len(pool)))] for _ in range(k)]
        raw = np.vstack(
            [rng.normal(size=(p.level, n)) + 1j * rng.normal(size=(p.level, n)) for p in picks]
        )
        Q, _ = np.linalg.qr(raw)
        row, terms = 0, []
        for p in picks:
            terms.append((p, Q[row : row + p.level, :]))
            row += p.level
        return apply_combination(MatrixConvexCombination(terms, n))

    def extreme_level1_points(self, tol: ScaledTolerance = DEFAULT_TOL):
        """Level-1 generators that are vertices of the level-1 hull."""
        pts = [g for g in self.generators if g.level == 1]
        out = []
        for i, p in enumerate(pts):
            others = [q for j, q in enumerate(pts) if j != i]
            if not others:
                out.append(p)
                continue
            rep = hull_membership(others, p, tol=tol, max_iter=4000)
            if rep.status != MEMBER:
                out.append(p)
        return out


@dataclass(frozen=True, eq=False)
class SingleLevelMultiface:
    """Multiface candidate concentrated at one level (empty elsewhere)."""

    face: object  # any fixed-level candidate with .level/.contains/.sample

    def levels(self, n_max: int):
        return [self.face.level] if self.face.level <= n_max else []

    def contains(self, Y: MatrixTuple, tol: ScaledTolerance = DEFAULT_TOL) -> bool:
        return Y.level == self.face.level and self.face.contains(Y, tol)

    def sample(self, n: int, rng: np.random.Generator) -> MatrixTuple:
        if n != self.face.level:
            raise ConstructionError("candidate is empty at this level")
        return self.face.sample(rng)


def multiface_verify(
    D: LinearPencil,
    F,
    type: str = "multiface",
    budget: int = 2000,
    seed: int = 13,
    n_max: int = 3,
    tol: ScaledTolerance = DEFAULT_TOL,
) -> FaceVerdict:
    """Falsification of the multiface property across levels.

    Components of proper combinations landing in F must lie in F at their
    own levels; "convex_multiface" additionally spot-checks matrix
    convexity; sampled extreme points of F must be matrix extreme in D
    (heredity cross-check).
    """
    if type not in ("multiface", "convex_multiface"):
        raise ConstructionError(f"unknown multiface type {type!r}")
    from .extremality import matrix_extreme, YES

    rng = np.random.default_rng(seed)
    attempts = 0
    levels = F.levels(n_max)
    rounds = max(2, budget // (600 * max(len(levels), 1)))
    for n in levels:
        for _ in range(rounds):
            attempts += 1
            target = F.sample(n, rng)
            combo = _decomposition_candidates(
                D, target, list(range(1, n + 1)), rng, tol
            )
            if combo is not None:
                for point, _ in combo.terms:
                    if not F.contains(point, tol):
                        return FaceVerdict(
                            COUNTEREXAMPLE,
                            combo,
                            f"component at level {point.level} escapes F",
                            attempts,
                        )
            chord = _segment_decomposition(D, target, rng, tol)
            if chord is not None:
                for point, _ in chord.terms:
                    if not F.contains(point, tol):
                        return FaceVerdict(
                            COUNTEREXAMPLE, chord, "segment component escapes F", attempts
                        )
    if type == "convex_multiface" and isinstance(F, MconvMultiface):
        for n in levels[:2]:
            mixed = F.sample(n, rng)
            if not F.contains(mixed, tol):
                return FaceVerdict(
                    COUNTEREXAMPLE, None, "F is not matrix convex on samples", attempts
                )
    if isinstance(F, MconvMultiface):
        for p in F.extreme_level1_points(tol):
            verdict = matrix_extreme(D, p, tol=tol)
            if verdict.verdict != YES:
                return FaceVerdict(
                    COUNTEREXAMPLE,
                    verdict.witness,
                    "extreme point of F fails heredity into D",
                    attempts,
                )
    return FaceVerdict(NO_COUNTEREXAMPLE, None, "no violation found", attempts)


# ---------------------------------------------------------------------------
# Polytope vertex order-ideal check
# ---------------------------------------------------------------------------


def positively_generated_kernel(
    vertices, X, tol: ScaledTolerance = DEFAULT_TOL
) -> bool:
    """LP check that affine functions vanishing at a vertex split positively.

    For a spanning set of affine f with f(X) = 0, decides feasibility of
    f = f1 - f2 with f_i >= 0 on all vertices and f_i(X) = 0; True iff all
    spanning functions decompose.  Non-vertex inputs raise NotVertexError.
    """
    V = np.asarray(vertices, dtype=float)
    x = np.asarray(X, dtype=float)
    if V.ndim != 2 or x.shape != (V.shape[1],):
        raise ConstructionError("vertices must be m x d and X a d-vector")
    m, d = V.shape
    others = [v for v in V if np.linalg.norm(v - x) > 1e-9]
    if len(others) == m:
        raise NotVertexError("X is not among the polytope vertices")
    if others and _in_convex_hull(np.array(others), x):
        raise NotVertexError("X is a convex combination of the other vertices")

    for i in range(d):
        # f(y) = (y - X)_i ; decompose f = f1 - f2
        if not _decomposable(V, x, np.eye(d)[i]):
            return False
    return True


def _in_convex_hull(P: np.ndarray, x: np.ndarray) -> bool:
    """LP feasibility of x in conv(P) via the shared solver (scalar blocks)."""
    m, d = P.shape
    dims = [1] * m
    rows = []
    for j in range(d):
        rows.append(
            AffineRow(tuple(np.array([[P[i, j]]]) for i in range(m)), float(x[j]))
        )
    rows.append(AffineRow(tuple(np.array([[1.0]]) for _ in range(m)), 1.0))
    prob = AffinePSDProblem(dims, rows, tol=ScaledTolerance(1e-8, 1e-8))
    report = solve_feasibility(prob, max_iter=6000)
    return report.status == FEASIBLE


def _decomposable(V: np.ndarray, x: np.ndarray, c: np.ndarray) -> bool:
    """Feasibility of f1 >= 0 on vertices, f1(x) = 0, f1 - f >= 0 on vertices,
    where f(y) = c . (y - x); then f2 = f1 - f completes the split."""
    m, d = V.shape
    fvals = (V - x) @ c
    # variables: free block of size 1 per coefficient of f1 (d + 1 scalars),
    # psd scalar slacks s1_j = f1(v_j) and s2_j = f1(v_j) - f(v_j)
    nfree = d + 1
    dims = [1] * (nfree + 2 * m)
    kinds = ["free"] * nfree + ["psd"] * (2 * m)

    def coeff_row(vec, slack_index, target):
        coeffs = [np.array([[float(t)]]) for t in vec]
        slacks = [None] * (2 * m)
        if slack_index is not None:
            slacks[slack_index] = np.array([[-1.0]])
        return AffineRow(
            tuple(coeffs + [s if s is not None else None for s in slacks]), target
        )

    rows = []
    # f1(x) = 0
    rows.append(coeff_row(list(x) + [1.0], None, 0.0))
    for j in range(m):
        aff = list(V[j]) + [1.0]
        rows.append(coeff_row(aff, j, 0.0))  # f1(v_j) - s1_j = 0
        rows.append(coeff_row(aff, m + j, float(fvals[j])))  # f1(v_j) - s2_j = f(v_j)
    prob = AffinePSDProblem(dims, rows, kinds=kinds, tol=ScaledTolerance(1e-8, 1e-8))
    report = solve_feasibility(prob, max_iter=8000)
    return report.status == FEASIBLE
