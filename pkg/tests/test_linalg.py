import numpy as np
import pytest

from mcca.errors import ConfigError, DataError, NumericalError
from mcca.linalg import inv_sqrt_psd, svd_truncated, sym_eig


def test_sym_eig_identity():
    res = sym_eig(np.eye(3))
    np.testing.assert_allclose(res.eigenvalues, [1.0, 1.0, 1.0])


def test_sym_eig_diagonal():
    res = sym_eig(np.diag([4.0, 1.0]))
    np.testing.assert_allclose(res.eigenvalues, [4.0, 1.0])
    # Sign convention: dominant entries positive, so these are +e1, +e2.
    np.testing.assert_allclose(res.eigenvectors, np.eye(2), atol=1e-14)


def test_sym_eig_two_by_two_hand_value():
    # Characteristic polynomial of [[2,1],[1,2]]: (2-l)^2 - 1 = 0 -> l in {3, 1}.
    res = sym_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(res.eigenvalues, [3.0, 1.0], atol=1e-12)


def test_sym_eig_rejects_non_square():
    with pytest.raises(DataError):
        sym_eig(np.ones((2, 3)))


def test_sym_eig_rejects_asymmetric():
    with pytest.raises(DataError):
        sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_sym_eig_orthonormal_and_reconstructs():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((7, 7))
    a = a + a.T
    res = sym_eig(a)
    q = res.eigenvectors
    assert np.abs(q.T @ q - np.eye(7)).max() <= 1e-10
    recon = q @ np.diag(res.eigenvalues) @ q.T
    assert np.abs(recon - a).max() <= 1e-8 * np.abs(a).max()


def test_sym_eig_trace_equals_eigenvalue_sum():
    rng = np.random.default_rng(11)
    for _ in range(20):
        a = rng.standard_normal((5, 5))
        a = a + a.T
        res = sym_eig(a)
        assert np.abs(res.eigenvalues.sum() - np.trace(a)) <= 1e-8 * max(1.0, abs(np.trace(a)))


def test_inv_sqrt_identity():
    np.testing.assert_allclose(inv_sqrt_psd(np.eye(4)), np.eye(4), atol=1e-12)


def test_inv_sqrt_diagonal():
    np.testing.assert_allclose(
        inv_sqrt_psd(np.diag([4.0, 9.0])), np.diag([0.5, 1.0 / 3.0]), atol=1e-12
    )


def test_inv_sqrt_floor_applied():
    out = inv_sqrt_psd(np.diag([4.0, 0.0]), eig_floor=1e-6)
    np.testing.assert_allclose(out, np.diag([0.5, 1000.0]), atol=1e-9)


def test_inv_sqrt_rejects_negative_definite():
    with pytest.raises(NumericalError):
        inv_sqrt_psd(np.diag([1.0, -0.5]))


def test_inv_sqrt_whitening_residual():
    # B A B ~= I on the subspace above the floor.
    rng = np.random.default_rng(5)
    m = rng.standard_normal((6, 6))
    a = m @ m.T + 0.1 * np.eye(6)
    b = inv_sqrt_psd(a)
    assert np.abs(b @ a @ b - np.eye(6)).max() <= 1e-6


def test_svd_diagonal():
    res = svd_truncated(np.diag([3.0, 2.0, 1.0]), k=2)
    np.testing.assert_allclose(res.s, [3.0, 2.0])


def test_svd_rank_one():
    u = np.array([3.0, 4.0]) / 5.0
    v = np.array([1.0, 2.0, 2.0]) / 3.0
    res = svd_truncated(np.outer(u, v), k=1)
    np.testing.assert_allclose(res.s, [1.0], atol=1e-12)


def test_svd_full_rank_reconstruction():
    rng = np.random.default_rng(9)
    a = rng.standard_normal((5, 4))
    res = svd_truncated(a, k=4)
    recon = res.u @ np.diag(res.s) @ res.v.T
    assert np.linalg.norm(recon - a) <= 1e-8 * np.linalg.norm(a)


def test_svd_k_out_of_range():
    with pytest.raises(ConfigError):
        svd_truncated(np.eye(3), k=4)
    with pytest.raises(ConfigError):
        svd_truncated(np.eye(3), k=0)


def test_svd_orthonormal_and_sorted():
    rng = np.random.default_rng(21)
    a = rng.standard_normal((8, 6))
    res = svd_truncated(a, k=5)
    assert np.abs(res.u.T @ res.u - np.eye(5)).max() <= 1e-10
    assert np.abs(res.v.T @ res.v - np.eye(5)).max() <= 1e-10
    assert np.all(np.diff(res.s) <= 1e-12)
    assert np.all(res.s >= 0)


def test_sign_convention_is_deterministic():
    rng = np.random.default_rng(30)
    a = rng.standard_normal((6, 5))
    res = svd_truncated(a, k=3)
    for j in range(3):
        col = res.u[:, j]
        assert col[np.argmax(np.abs(col))] > 0
    eig = sym_eig(a @ a.T)
    for j in range(6):
        col = eig.eigenvectors[:, j]
        assert col[np.argmax(np.abs(col))] > 0
