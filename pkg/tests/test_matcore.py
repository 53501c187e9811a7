import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from structneg import matcore
from structneg.errors import IndexOutOfRange, NoConvergence, NonHermitianInput


def rand_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def rand_hermitian(rng, n):
    g = rand_complex(rng, n)
    return 0.5 * (g + g.conj().T)


def rand_unitary(rng, n):
    q, r = np.linalg.qr(rand_complex(rng, n))
    return q * (r.diagonal() / np.abs(r.diagonal()))


# ---------------------------------------------------------------- adjoint


def test_adjoint_identity_and_diagonal():
    assert np.array_equal(matcore.adjoint(np.eye(4)), np.eye(4))
    np.testing.assert_array_equal(matcore.adjoint(np.diag([1j, -1j])), np.diag([-1j, 1j]))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_adjoint_involution(n, seed):
    m = rand_complex(np.random.default_rng(seed), n)
    assert np.array_equal(matcore.adjoint(matcore.adjoint(m)), m)


def test_as_matrix_rejects_nonfinite():
    with pytest.raises(ValueError):
        matcore.as_matrix([[np.nan, 0], [0, 1]])


# ---------------------------------------------------------------- kron


def test_kron_examples():
    np.testing.assert_array_equal(matcore.kron(np.eye(2), np.eye(2)), np.eye(4))
    np.testing.assert_array_equal(matcore.kron(np.diag([1, 2]), np.diag([3, 4])), np.diag([3, 4, 6, 8]))


def test_kron_trace_multiplies():
    rng = np.random.default_rng(3)
    for na, nb in [(2, 2), (2, 3), (3, 4)]:
        a, b = rand_complex(rng, na), rand_complex(rng, nb)
        # direct entrywise construction as oracle
        oracle = np.zeros((na * nb, na * nb), dtype=complex)
        for i in range(na):
            for j in range(na):
                for k in range(nb):
                    for l in range(nb):
                        oracle[i * nb + k, j * nb + l] = a[i, j] * b[k, l]
        out = matcore.kron(a, b)
        np.testing.assert_allclose(out, oracle, atol=1e-14)
        assert abs(np.trace(out) - np.trace(a) * np.trace(b)) < 1e-10


# ---------------------------------------------------------------- eigensolvers


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eigvals_examples(method):
    np.testing.assert_allclose(matcore.eigvals_hermitian(np.diag([3.0, 1.0, 2.0]), method=method), [1, 2, 3])
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    singlet = np.outer(psi, psi)
    np.testing.assert_allclose(matcore.eigvals_hermitian(singlet, method=method), [0, 0, 0, 1], atol=1e-14)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
@pytest.mark.parametrize("n", [2, 4, 9, 16])
def test_eigvals_round_trip(method, n):
    rng = np.random.default_rng(n)
    lam = np.sort(rng.uniform(-1, 1, n))
    u = rand_unitary(rng, n)
    m = u @ np.diag(lam) @ u.conj().T
    w = matcore.eigvals_hermitian(m, method=method)
    np.testing.assert_allclose(w, lam, atol=1e-9)
    assert abs(w.sum() - np.trace(m).real) < 1e-9
    assert np.all(np.diff(w) >= 0)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eigenvector_residuals(method):
    rng = np.random.default_rng(11)
    for n in (3, 9, 16, 64):
        m = rand_hermitian(rng, n)
        w, v = matcore.eigh_hermitian(m, method=method)
        norm = np.linalg.norm(m, 2)
        resid = np.linalg.norm(m @ v - v * w, axis=0)
        assert resid.max() <= 1e-10 * norm


def test_jacobi_agrees_with_lapack():
    rng = np.random.default_rng(5)
    for n in (2, 5, 9, 16):
        m = rand_hermitian(rng, n)
        np.testing.assert_allclose(
            matcore.eigvals_hermitian(m, method="jacobi"), matcore.eigvals_hermitian(m), atol=1e-12
        )


def test_spectrum_unitary_invariance():
    rng = np.random.default_rng(8)
    for n in (4, 9):
        m = rand_hermitian(rng, n)
        u = rand_unitary(rng, n)
        np.testing.assert_allclose(
            matcore.eigvals_hermitian(u @ m @ u.conj().T), matcore.eigvals_hermitian(m), atol=1e-9
        )


def test_non_hermitian_rejected():
    with pytest.raises(NonHermitianInput):
        matcore.eigvals_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NonHermitianInput):
        matcore.eigvals_hermitian(np.ones((2, 3)))
    # within tolerance: symmetrized and accepted
    m = np.array([[1.0, 1e-9], [0.0, 2.0]])
    np.testing.assert_allclose(matcore.eigvals_hermitian(m), [1, 2], atol=1e-12)


def test_jacobi_budget_exhaustion():
    with pytest.raises(NoConvergence):
        matcore.jacobi_eigh(np.array([[1.0, 0.5], [0.5, 2.0]]), max_sweeps=0)


def test_eigvals_deterministic():
    m = rand_hermitian(np.random.default_rng(0), 16)
    for method in ("lapack", "jacobi"):
        a = matcore.eigvals_hermitian(m, method=method)
        b = matcore.eigvals_hermitian(m.copy(), method=method)
        assert a.tobytes() == b.tobytes()


# ---------------------------------------------------------------- singular values and trace norm


def test_singular_values_examples():
    np.testing.assert_allclose(matcore.singular_values(np.eye(3)), [1, 1, 1])
    np.testing.assert_allclose(matcore.singular_values(np.diag([-2.0, 1.0])), [2, 1])


def test_singular_values_gram_oracle():
    rng = np.random.default_rng(21)
    for n in (2, 4, 9, 16):
        m = rand_complex(rng, n)
        s = matcore.singular_values(m)
        gram = np.sqrt(np.clip(matcore.eigvals_hermitian(m.conj().T @ m, method="jacobi"), 0, None))[::-1]
        np.testing.assert_allclose(s, gram, atol=1e-8)
        assert np.all(np.diff(s) <= 0) and np.all(s >= 0)


def test_trace_norm_examples():
    for n in (1, 3, 5):
        assert matcore.trace_norm(np.eye(n)) == pytest.approx(n, abs=1e-12)
    u = rand_unitary(np.random.default_rng(2), 2)
    h = u @ np.diag([1.0, -0.5]) @ u.conj().T
    assert matcore.trace_norm(h) == pytest.approx(1.5, abs=1e-12)
    g = rand_complex(np.random.default_rng(3), 4, 2)
    rho = g @ g.conj().T
    rho /= np.trace(rho)
    assert matcore.trace_norm(rho) == pytest.approx(1.0, abs=1e-9)


def test_trace_norm_hermitian_matches_eigenvalues():
    rng = np.random.default_rng(4)
    for n in (4, 9, 16):
        h = rand_hermitian(rng, n)
        assert abs(matcore.trace_norm(h) - np.abs(matcore.eigvals_hermitian(h)).sum()) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_trace_norm_is_a_norm(n, seed):
    rng = np.random.default_rng(seed)
    a, b = rand_complex(rng, n), rand_complex(rng, n)
    assert matcore.trace_norm(a) >= 0
    assert matcore.trace_norm(np.zeros((n, n))) <= 1e-12
    assert matcore.trace_norm(a + b) <= matcore.trace_norm(a) + matcore.trace_norm(b) + 1e-10


# ---------------------------------------------------------------- Weyl


def test_weyl_examples():
    assert matcore.weyl_holds(np.eye(2), np.eye(2), 1, 0)
    a, b = np.diag([0.3, -1.0, 2.0]), np.diag([1.0, 0.5, -0.2])
    for k in range(1, 4):
        for j in range(0, 4 - k):
            assert matcore.weyl_holds(a, b, k, j)


@pytest.mark.parametrize("k,j", [(0, 0), (2, 1), (1, 2), (1, -1), (3, 0)])
def test_weyl_index_errors(k, j):
    with pytest.raises(IndexOutOfRange):
        matcore.weyl_holds(np.eye(2), np.eye(2), k, j)


def test_weyl_random_pairs_all_indices():
    rng = np.random.default_rng(99)
    for n in (4, 9):
        for _ in range(30):
            a, b = rand_hermitian(rng, n), rand_hermitian(rng, n)
            margins = matcore.weyl_margins(a, b)
            assert np.nanmin(margins) >= -1e-10
            # spot-check the single-pair API against the table
            assert matcore.weyl_holds(a, b, 1, n - 1)
    # table covers exactly the valid (k, j)
    assert np.count_nonzero(~np.isnan(matcore.weyl_margins(np.eye(4), np.eye(4)))) == 4 * 5 // 2
