import numpy as np
import pytest

from matconv.errors import (
    AmbiguousRankError,
    ConstructionError,
    EquivalenceInconclusiveError,
    GramMismatchError,
    RankDeficientError,
)
from matconv.linalg import (
    DEFAULT_TOL,
    INDEFINITE,
    POSITIVE_DEFINITE,
    PSD_SINGULAR,
    MatrixTuple,
    ScaledTolerance,
    as_hermitian,
    douglas_unitary,
    eig_hermitian,
    herm_basis,
    herm_to_vec,
    is_psd,
    kernel_basis,
    random_hermitian,
    random_unitary,
    spectral_norm,
    unitarily_equivalent,
    vec_to_herm,
)


def test_as_hermitian_symmetrizes_and_rejects():
    M = as_hermitian([[1.0, 2.0], [2.0, 3.0]])
    assert np.allclose(M, M.conj().T)
    with pytest.raises(ConstructionError):
        as_hermitian([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ConstructionError):
        as_hermitian(np.zeros((2, 3)))


def test_eig_diagonal_permutation():
    w, V = eig_hermitian(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [1.0, 2.0, 3.0])
    # columns are a permutation of the standard basis
    assert np.allclose(np.abs(V), np.abs(V).round())


def test_eig_2x2_closed_form():
    # characteristic polynomial of [[2,1],[1,2]]: (2-l)^2 - 1 = 0 -> l = 1, 3
    w, V = eig_hermitian(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.allclose(w, [1.0, 3.0])
    v0 = V[:, 0] / V[0, 0]
    v1 = V[:, 1] / V[0, 1]
    assert np.allclose(v0 / np.linalg.norm(v0), [1 / np.sqrt(2), -1 / np.sqrt(2)])
    assert np.allclose(v1 / np.linalg.norm(v1), [1 / np.sqrt(2), 1 / np.sqrt(2)])


def test_eig_zero_matrix():
    w, V = eig_hermitian(np.zeros((4, 4)))
    assert np.allclose(w, 0.0)
    assert np.allclose(V.conj().T @ V, np.eye(4))


def test_eig_reconstruction_random():
    rng = np.random.default_rng(0)
    for n in (2, 3, 5, 8):
        M = random_hermitian(rng, n, scale=3.0)
        w, V = eig_hermitian(M)
        assert np.all(np.diff(w) >= -1e-12)
        assert spectral_norm((V * w) @ V.conj().T - M) <= 1e-9 * max(1.0, spectral_norm(M))
        assert spectral_norm(V.conj().T @ V - np.eye(n)) <= 1e-12


def test_kernel_basis_examples():
    assert kernel_basis(np.eye(3)).shape == (3, 0)
    K = kernel_basis(np.diag([0.0, 1.0]))
    assert K.shape == (2, 1)
    assert abs(abs(K[0, 0]) - 1.0) < 1e-12

    rng = np.random.default_rng(1)
    x = rng.normal(size=4) + 1j * rng.normal(size=4)
    x /= np.linalg.norm(x)
    P = np.eye(4) - np.outer(x, x.conj())
    K = kernel_basis(P)
    assert K.shape == (4, 1)
    assert abs(abs(x.conj() @ K[:, 0]) - 1.0) < 1e-10


def test_kernel_rank_split_counts():
    rng = np.random.default_rng(2)
    for n in (2, 4, 6):
        M = random_hermitian(rng, n)
        w, V = eig_hermitian(M)
        ker = kernel_basis(M)
        t = DEFAULT_TOL.eff(np.abs(w).max())
        rank = int((np.abs(w) > t).sum())
        assert ker.shape[1] + rank == n


def test_kernel_ambiguous_gap():
    with pytest.raises(AmbiguousRankError):
        kernel_basis(np.diag([1e-9, 5e-9, 1.0]), ScaledTolerance(2e-9, 0.0))


def test_is_psd_trichotomy():
    verdict, lam = is_psd(np.eye(2))
    assert verdict == POSITIVE_DEFINITE and lam == pytest.approx(1.0)
    verdict, lam = is_psd(np.diag([0.0, 2.0]))
    assert verdict == PSD_SINGULAR and lam == pytest.approx(0.0, abs=1e-12)
    verdict, lam = is_psd(np.diag([-1.0, 1.0]))
    assert verdict == INDEFINITE and lam == pytest.approx(-1.0)


def test_douglas_identity_case():
    U = douglas_unitary(np.eye(2), np.eye(2))
    assert np.allclose(U, np.eye(2))


def test_douglas_round_trip():
    rng = np.random.default_rng(3)
    hits = 0
    for _ in range(50):
        delta = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
        dd = delta @ delta.conj().T
        if np.linalg.cond(dd) > 1e6:
            continue
        U = random_unitary(rng, 2)
        U2 = douglas_unitary(U @ delta, delta)
        assert spectral_norm(U2 - U) <= 1e-8
        hits += 1
    assert hits > 40


def test_douglas_rejections():
    rng = np.random.default_rng(4)
    delta = rng.normal(size=(2, 3))
    gamma = np.vstack([delta[0], delta[0]])  # rank 1
    with pytest.raises(RankDeficientError):
        douglas_unitary(gamma, delta)
    with pytest.raises(GramMismatchError):
        douglas_unitary(delta + 0.5, delta)


def _pauli_tuple():
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    sz = np.diag([1.0, -1.0])
    return MatrixTuple([sx, sz])


def test_unitary_equivalence_basic():
    X = _pauli_tuple()
    assert unitarily_equivalent(X, X)
    rng = np.random.default_rng(5)
    U = random_unitary(rng, 2)
    Y = X.conjugate(U)
    assert unitarily_equivalent(X, Y)
    A = MatrixTuple([np.diag([0.0, 1.0])])
    B = MatrixTuple([np.diag([0.0, 2.0])])
    assert not unitarily_equivalent(A, B)


def test_unitary_equivalence_properties():
    rng = np.random.default_rng(6)
    for n in (2, 3):
        X = MatrixTuple([random_hermitian(rng, n) for _ in range(2)])
        U = random_unitary(rng, n)
        Y = X.conjugate(U)
        assert unitarily_equivalent(Y, X)  # symmetry
        W = random_unitary(rng, n)
        assert unitarily_equivalent(X.conjugate(W), Y.conjugate(W))


def test_unitary_equivalence_degenerate_blocks():
    # Z (+) Z against a conjugated copy: every Hermitian combination is degenerate
    rng = np.random.default_rng(7)
    Z = MatrixTuple([random_hermitian(rng, 2) for _ in range(2)])
    X = Z.direct_sum(Z)
    U = random_unitary(rng, 4)
    assert unitarily_equivalent(X, X.conjugate(U))


def test_unitary_equivalence_trace_certificate():
    # same eigenvalues per coordinate, different joint structure
    X = MatrixTuple([np.diag([1.0, -1.0]), np.diag([1.0, -1.0])])
    Y = MatrixTuple([np.diag([1.0, -1.0]), np.diag([-1.0, 1.0])])
    assert not unitarily_equivalent(X, Y)


def test_herm_vec_round_trip():
    rng = np.random.default_rng(8)
    for n in (1, 2, 4):
        M = random_hermitian(rng, n)
        v = herm_to_vec(M)
        assert np.allclose(vec_to_herm(v, n), M)
        # isometry: Frobenius norm preserved
        assert np.linalg.norm(v) == pytest.approx(np.linalg.norm(M, "fro"))
        basis = herm_basis(n)
        assert len(basis) == n * n
        G = np.array(
            [[np.trace(a.conj().T @ b).real for b in basis] for a in basis]
        )
        assert np.allclose(G, np.eye(n * n))


def test_matrix_tuple_helpers():
    v = MatrixTuple.scalar([0.5, -0.25])
    assert v.level == 1 and v.g == 2
    assert np.allclose(v.as_vector(), [0.5, -0.25])
    amp = v.scaled_identity(3)
    assert amp.level == 3
    assert np.allclose(amp.coords[0], 0.5 * np.eye(3))
    s = v.direct_sum(v)
    assert s.level == 2
