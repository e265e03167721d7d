import numpy as np
import pytest

from matconv.convexity import (
    MEMBER,
    NOT_MEMBER_HEURISTIC,
    MatrixConvexCombination,
    apply_combination,
    build_choi_system,
    compress,
    gamma_point,
    hull_membership,
    kraus_from_choi,
)
from matconv.errors import (
    NotContractionError,
    PartitionOfUnityViolatedError,
    ZeroGammaError,
)
from matconv.linalg import (
    MatrixTuple,
    random_hermitian,
    random_unitary,
    spectral_norm,
)
from matconv.pencils import interval_pencil, membership


def _random_isometry_split(rng, levels, n):
    raw = np.vstack(
        [rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n)) for m in levels]
    )
    Q, _ = np.linalg.qr(raw)
    out, row = [], 0
    for m in levels:
        out.append(Q[row : row + m, :])
        row += m
    return out


def test_apply_combination_identity_term():
    X = MatrixTuple([np.diag([0.3, 0.7])])
    combo = MatrixConvexCombination([(X, np.eye(2))], 2)
    assert apply_combination(combo).distance(X) <= 1e-14


def test_apply_combination_direct_sum_form():
    zero = MatrixTuple.scalar([0.0])
    one = MatrixTuple.scalar([1.0])
    g1 = np.array([[1.0, 0.0]])
    g2 = np.array([[0.0, 1.0]])
    combo = MatrixConvexCombination([(zero, g1), (one, g2)], 2)
    out = apply_combination(combo)
    assert np.allclose(out.coords[0], np.diag([0.0, 1.0]))


def test_apply_combination_matches_naive_summation():
    rng = np.random.default_rng(0)
    levels, n = [2, 3, 1], 3
    gammas = _random_isometry_split(rng, levels, n)
    points = [MatrixTuple([random_hermitian(rng, m) for _ in range(2)]) for m in levels]
    combo = MatrixConvexCombination(list(zip(points, gammas)), n)
    assert combo.proper
    out = apply_combination(combo)
    naive = [np.zeros((n, n), dtype=complex) for _ in range(2)]
    for X, gam in zip(points, gammas):
        for j in range(2):
            naive[j] += gam.conj().T @ X.coords[j] @ gam
    for j in range(2):
        assert spectral_norm(out.coords[j] - naive[j]) <= 1e-12


def test_partition_of_unity_enforced():
    X = MatrixTuple.scalar([1.0])
    with pytest.raises(PartitionOfUnityViolatedError):
        MatrixConvexCombination([(X, np.array([[0.5]]))], 1)


def test_compress_identity_and_corner():
    X = MatrixTuple([np.diag([1.0, 2.0]), np.diag([3.0, 4.0])])
    assert compress(X, np.eye(2)).distance(X) == 0
    e1 = np.array([[1.0], [0.0]])
    out = compress(X, e1)
    assert out.level == 1
    assert np.allclose([c[0, 0] for c in out.coords], [1.0, 3.0])


def test_compress_rejects_expansions():
    X = MatrixTuple([np.eye(2)])
    with pytest.raises(NotContractionError):
        compress(X, 1.5 * np.eye(2))


def test_compress_block_isometry_identity():
    # alpha^* X alpha = (alpha^* beta^*) (X (+) 0) (alpha; beta) with
    # beta = (I - alpha^* alpha)^{1/2}
    rng = np.random.default_rng(1)
    X = MatrixTuple([random_hermitian(rng, 2) for _ in range(2)])
    alpha = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    alpha /= spectral_norm(alpha) * 1.1
    w, V = np.linalg.eigh(np.eye(3) - alpha.conj().T @ alpha)
    beta = (V * np.sqrt(np.maximum(w, 0.0))) @ V.conj().T
    stacked = np.vstack([alpha, beta])
    padded = X.direct_sum(MatrixTuple([np.zeros((3, 3))] * 2, validate=False))
    combo = MatrixConvexCombination([(padded, stacked)], 3)
    assert apply_combination(combo).distance(compress(X, alpha)) <= 1e-10


def test_gamma_point_scalar():
    gp = gamma_point(MatrixTuple.scalar([0.7]), np.array([[1.0]]))
    assert gp.source_level == 1
    assert gp.gram[0, 0].real == pytest.approx(1.0)
    assert gp.image.coords[0][0, 0].real == pytest.approx(0.7)


def test_gamma_point_rank_deficient_reduction():
    rng = np.random.default_rng(2)
    A = MatrixTuple([random_hermitian(rng, 2)])
    u = rng.normal(size=2) + 1j * rng.normal(size=2)
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    G = np.outer(u, v)
    G /= np.sqrt(np.trace(G.conj().T @ G).real)
    gp = gamma_point(A, G)
    assert gp.source_level == 1
    # the reduced pair reproduces gamma^* A gamma exactly
    direct = A.conjugate(G)
    assert gp.image.distance(direct) <= 1e-12
    assert float(np.trace(gp.gram).real) == pytest.approx(1.0)


def test_gamma_point_trace_validation():
    A = MatrixTuple([np.eye(2)])
    with pytest.raises(ZeroGammaError):
        gamma_point(A, np.sqrt(2.0) * np.eye(2))


def test_gamma_family_convexity():
    # t p + (1-t) q realized by the explicit direct-sum construction
    rng = np.random.default_rng(3)
    n = 2
    A = MatrixTuple([random_hermitian(rng, 2)])
    B = MatrixTuple([random_hermitian(rng, 3)])
    gam = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
    gam /= np.sqrt(np.trace(gam.conj().T @ gam).real)
    dlt = rng.normal(size=(3, n)) + 1j * rng.normal(size=(3, n))
    dlt /= np.sqrt(np.trace(dlt.conj().T @ dlt).real)
    p = gamma_point(A, gam)
    q = gamma_point(B, dlt)
    for t in (0.0, 0.25, 0.5, 0.9, 1.0):
        stacked = np.vstack([np.sqrt(t) * gam, np.sqrt(1.0 - t) * dlt])
        mix = gamma_point(A.direct_sum(B), stacked)
        gram_mix = t * p.gram + (1.0 - t) * q.gram
        img_mix = p.image.scale(t).add(q.image, 1.0 - t)
        assert spectral_norm(mix.gram - gram_mix) <= 1e-10
        assert mix.image.distance(img_mix) <= 1e-10


def test_choi_system_shape():
    gens = [MatrixTuple.scalar([0.0]), MatrixTuple.scalar([1.0])]
    X = MatrixTuple([np.diag([0.0, 1.0])])
    system = build_choi_system(gens, X)
    assert system.problem.block_dims == [2, 2]
    # (g + 1) * n^2 real rows
    assert len(system.problem.rows) == 2 * 4


def test_kraus_round_trip():
    rng = np.random.default_rng(4)
    m, n = 2, 3
    B = rng.normal(size=(m * n, m * n)) + 1j * rng.normal(size=(m * n, m * n))
    C = B @ B.conj().T / (m * n)
    factors = kraus_from_choi(C, m, n)
    # rebuild Phi entrywise and compare with the Choi blocks
    for p in range(m):
        for q in range(m):
            E = np.zeros((m, m), dtype=complex)
            E[p, q] = 1.0
            got = sum(f.conj().T @ E @ f for f in factors)
            assert spectral_norm(got - C[p * n : (p + 1) * n, q * n : (q + 1) * n]) <= 1e-8


def test_hull_membership_direct_sum_case():
    gens = [MatrixTuple.scalar([0.0]), MatrixTuple.scalar([1.0])]
    X = MatrixTuple([np.diag([0.0, 1.0])])
    report = hull_membership(gens, X)
    assert report.status == MEMBER
    assert apply_combination(report.combination).distance(X) <= 1e-7


def test_hull_membership_scalar_weights():
    gens = [MatrixTuple.scalar([0.0]), MatrixTuple.scalar([1.0])]
    report = hull_membership(gens, MatrixTuple.scalar([0.5]))
    assert report.status == MEMBER
    weights = [
        float(np.trace(g.conj().T @ g).real)
        for _, g in report.combination.terms
    ]
    assert sum(weights) == pytest.approx(1.0, abs=1e-8)


def test_hull_membership_outside_level1():
    # level-1 hull of {0, 1} is [0, 1]: 1.5 is outside by the LP oracle
    gens = [MatrixTuple.scalar([0.0]), MatrixTuple.scalar([1.0])]
    report = hull_membership(gens, MatrixTuple.scalar([1.5]))
    assert report.status == NOT_MEMBER_HEURISTIC


def test_hull_membership_interval_levels():
    # interval members are hulls of the endpoints at every level
    rng = np.random.default_rng(5)
    gens = [MatrixTuple.scalar([0.0]), MatrixTuple.scalar([1.0])]
    L = interval_pencil()
    for n in (2, 3):
        for _ in range(5):
            H = random_hermitian(rng, n)
            w, V = np.linalg.eigh(H)
            w = (w - w.min()) / max(w.max() - w.min(), 1e-9)
            X = MatrixTuple([(V * w) @ V.conj().T])
            assert membership(L, X).verdict != "Outside"
            report = hull_membership(gens, X)
            assert report.status == MEMBER
            assert apply_combination(report.combination).distance(X) <= 1e-6


def test_hull_witness_combination_is_verified():
    rng = np.random.default_rng(6)
    gens = [
        MatrixTuple([random_hermitian(rng, 2) for _ in range(2)]),
        MatrixTuple([random_hermitian(rng, 1) for _ in range(2)]),
    ]
    # target built from a known combination
    gammas = _random_isometry_split(rng, [2, 1], 2)
    combo = MatrixConvexCombination(list(zip(gens, gammas)), 2)
    X = apply_combination(combo)
    report = hull_membership(gens, X)
    assert report.status == MEMBER
    assert apply_combination(report.combination).distance(X) <= 1e-6
