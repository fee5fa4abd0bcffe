import importlib

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cslacc import _fallback, numerics
from cslacc.errors import DimensionOverflow, NegativeEigenvalue, NonHermitianInput
from cslacc.numerics import SeededRng, complex_gaussian, hermitian_sqrt, kronecker, svd


def _random_complex(rng, m, n):
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


def _exp_corr(m, rho):
    idx = np.arange(m)
    d = idx[None, :] - idx[:, None]
    q = np.where(d >= 0, rho ** np.abs(d), np.conj(rho) ** np.abs(d))
    return q.astype(complex)


def _kernel_modules():
    mods = [_fallback]
    try:
        mods.append(importlib.import_module("cslacc._kernels"))
    except ImportError:
        pass
    return mods


# ---------------------------------------------------------------- sqrt


def test_hermitian_sqrt_identity():
    np.testing.assert_allclose(hermitian_sqrt(np.eye(3)), np.eye(3), atol=1e-14)


def test_hermitian_sqrt_diagonal():
    np.testing.assert_allclose(hermitian_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)


def test_hermitian_sqrt_two_by_two_correlation():
    # eigenpairs of [[1, c], [c, 1]] are 1 +/- c on (1, +/-1)/sqrt(2)
    c = 0.6
    hi, lo = np.sqrt(1 + c), np.sqrt(1 - c)
    expected = 0.5 * np.array([[hi + lo, hi - lo], [hi - lo, hi + lo]])
    got = hermitian_sqrt([[1, c], [c, 1]])
    np.testing.assert_allclose(got, expected, atol=1e-12)
    np.testing.assert_allclose(got, [[0.9487, 0.3162], [0.3162, 0.9487]], atol=1e-4)
    q = np.array([[1, c], [c, 1]])
    assert np.linalg.norm(got @ got - q) <= 1e-9 * np.linalg.norm(q)


def test_hermitian_sqrt_rejects_non_hermitian():
    with pytest.raises(NonHermitianInput):
        hermitian_sqrt([[1, 2], [0, 1]])


def test_hermitian_sqrt_rejects_negative_eigenvalue():
    with pytest.raises(NegativeEigenvalue):
        hermitian_sqrt(np.diag([1.0, -0.5]))


def test_hermitian_sqrt_clamps_roundoff_negatives():
    q = np.diag([1.0, -1e-12])
    root = hermitian_sqrt(q)
    assert np.all(np.isfinite(root))
    np.testing.assert_allclose(root, np.diag([1.0, 0.0]), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    m=st.integers(1, 12),
    mag=st.sampled_from([0.0, 0.1, 0.3, 0.5, 0.6, 0.8, 0.9, 0.95]),
    phase=st.sampled_from([0.0, np.pi / 7, np.pi / 3]),
)
def test_hermitian_sqrt_squares_back(m, mag, phase):
    q = _exp_corr(m, mag * np.exp(1j * phase))
    root = hermitian_sqrt(q)
    assert np.linalg.norm(root - root.conj().T) <= 1e-12
    assert np.linalg.norm(root @ root - q) <= 1e-9 * np.linalg.norm(q)
    assert np.linalg.eigvalsh(root).min() >= -1e-10


# ---------------------------------------------------------------- eigh


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_eigh_invariants(n):
    rng = np.random.default_rng(n)
    a = _random_complex(rng, n, n)
    h = a + a.conj().T
    w, v = numerics.eigh(h)
    assert np.all(np.diff(w) >= 0)
    tol = 1e-10 * np.linalg.norm(h)
    assert np.linalg.norm(h @ v - v * w) <= tol
    assert np.linalg.norm(v.conj().T @ v - np.eye(n)) <= 1e-10


# ---------------------------------------------------------------- svd


@pytest.mark.parametrize("method", ["jacobi", "lapack"])
def test_svd_diagonal(method):
    np.testing.assert_allclose(svd(np.diag([3.0, 1.0]), method=method).singular_values, [3, 1], atol=1e-14)


@pytest.mark.parametrize("method", ["jacobi", "lapack"])
def test_svd_rank_one_norm_product(method):
    rng = np.random.default_rng(1)
    u = _random_complex(rng, 4, 1)
    v = _random_complex(rng, 3, 1)
    u *= 2 / np.linalg.norm(u)
    v *= 5 / np.linalg.norm(v)
    res = svd(u @ v.conj().T, method=method)
    np.testing.assert_allclose(res.singular_values, [10, 0, 0], atol=1e-12)
    assert np.linalg.norm(res.u.conj().T @ res.u - np.eye(3)) <= 1e-10


@pytest.mark.parametrize("method", ["jacobi", "lapack"])
def test_svd_exponential_block_largest(method):
    # symmetric eigvectors (x, y, x) of [[1,a,b],[a,1,a],[b,a,1]] give
    # lambda^2 - (2 + b) lambda + (1 + b - 2 a^2) = 0
    a, b = 0.5, 0.25
    disc = (2 + b) ** 2 - 4 * (1 + b - 2 * a * a)
    expected = ((2 + b) + np.sqrt(disc)) / 2
    s = svd(_exp_corr(3, 0.5), method=method).singular_values
    assert abs(s[0] - expected) < 1e-12
    assert abs(s[0] - 1.843) < 1e-3


@pytest.mark.parametrize("method", ["jacobi", "lapack"])
@pytest.mark.parametrize("shape", [(1, 1), (3, 3), (7, 4), (4, 7), (17, 17), (40, 33), (64, 64)])
def test_svd_invariants_random(method, shape):
    rng = np.random.default_rng(sum(shape))
    a = _random_complex(rng, *shape)
    res = svd(a, method=method)
    k = min(shape)
    assert res.u.shape == (shape[0], k) and res.v.shape == (shape[1], k)
    assert np.all(np.diff(res.singular_values) <= 0)
    assert np.all(res.singular_values >= 0)
    assert np.linalg.norm(res.u.conj().T @ res.u - np.eye(k)) <= 1e-10
    assert np.linalg.norm(res.v.conj().T @ res.v - np.eye(k)) <= 1e-10
    assert np.linalg.norm(res.reconstruct() - a) <= 1e-9 * np.linalg.norm(a)


def test_svd_rank_deficient_basis_completed():
    a = np.zeros((4, 4), dtype=complex)
    a[0, 1] = 2.0
    res = svd(a, method="jacobi")
    np.testing.assert_allclose(res.singular_values, [2, 0, 0, 0], atol=1e-15)
    assert np.linalg.norm(res.u.conj().T @ res.u - np.eye(4)) <= 1e-10
    assert np.linalg.norm(res.reconstruct() - a) <= 1e-12


@pytest.mark.parametrize("kern", _kernel_modules(), ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_kernel_backends_agree_with_lapack(kern):
    rng = np.random.default_rng(7)
    for n in (2, 5, 9, 16):
        a = _random_complex(rng, n + 3, n)
        work = np.asfortranarray(a.copy())
        vec = np.asfortranarray(np.eye(n, dtype=complex))
        assert kern.one_sided_jacobi(work, vec, 1e-12, 100 * n) > 0
        s = np.sort(np.linalg.norm(work, axis=0))[::-1]
        np.testing.assert_allclose(s, np.linalg.svd(a, compute_uv=False), rtol=1e-12, atol=1e-12)
        h = a.conj().T @ a
        work = np.asfortranarray(h.copy())
        vec = np.asfortranarray(np.eye(n, dtype=complex))
        assert kern.hermitian_jacobi(work, vec, 1e-14, 100 * n) >= 0
        np.testing.assert_allclose(np.sort(np.diag(work).real), np.linalg.eigvalsh(h),
                                   rtol=1e-11, atol=1e-11 * np.linalg.norm(h))


# ---------------------------------------------------------------- kronecker


def test_kronecker_identity_scalar():
    np.testing.assert_array_equal(kronecker(np.eye(2), [[5]]), np.diag([5, 5]))


def test_kronecker_scalar_left():
    b = np.arange(6).reshape(2, 3)
    np.testing.assert_array_equal(kronecker([[2]], b), 2 * b)


def test_kronecker_block_layout():
    a = np.array([[1, 2], [3, 4]])
    b = np.array([[0, 1], [1, 0]])
    k = kronecker(a, b)
    assert k.shape == (4, 4)
    np.testing.assert_array_equal(k[2:, :2], 3 * b)


@pytest.mark.parametrize("seed", range(5))
def test_kronecker_singular_values_are_products(seed):
    rng = np.random.default_rng(seed)
    a = _random_complex(rng, 2, 2)
    b = _random_complex(rng, 3, 3)
    direct = svd(kronecker(a, b), method="jacobi").singular_values
    sa = np.linalg.svd(a, compute_uv=False)
    sb = np.linalg.svd(b, compute_uv=False)
    products = np.sort(np.outer(sa, sb).ravel())[::-1]
    np.testing.assert_allclose(direct, products, atol=1e-9)


def test_kronecker_overflow():
    with pytest.raises(DimensionOverflow):
        kronecker(np.eye(100), np.eye(100), max_entries=10_000)


# ---------------------------------------------------------------- rng


def test_complex_gaussian_zero_variance():
    np.testing.assert_array_equal(complex_gaussian(SeededRng(1), 3, 4, 0.0), np.zeros((3, 4)))


def test_complex_gaussian_moments():
    n = 10**6
    g = complex_gaussian(SeededRng(2024), n, 1, 1.0).ravel()
    assert abs(g.mean()) < 4 * np.sqrt(1.0 / n)
    assert abs(np.mean(np.abs(g) ** 2) - 1.0) < 0.01
    # circular symmetry: real and imaginary parts each carry half the power
    assert abs(np.var(g.real) - 0.5) < 0.01
    assert abs(np.mean(g * g)) < 0.01


def test_complex_gaussian_variance_scales():
    g = complex_gaussian(SeededRng(3), 200_000, 1, 4.0)
    assert abs(np.mean(np.abs(g) ** 2) - 4.0) < 0.06


def test_rng_determinism_and_children():
    a = complex_gaussian(SeededRng(11).child(3, 1), 5, 5)
    b = complex_gaussian(SeededRng(11).child(3, 1), 5, 5)
    c = complex_gaussian(SeededRng(11).child(3, 2), 5, 5)
    assert a.tobytes() == b.tobytes()
    assert not np.allclose(a, c)


def test_helpers():
    a = np.array([[2, 1j], [-1j, 3]])
    assert numerics.trace(a) == 5
    assert numerics.frobenius_norm(np.eye(4)) == 2.0
    assert abs(numerics.rayleigh_quotient(a, [1, 0]) - 2) < 1e-15
