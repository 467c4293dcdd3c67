import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bireg import numkernel as nk
from conftest import det_cofactor


class TestSymEig:
    def test_identity(self):
        w, V = nk.sym_eig(np.eye(3))
        assert np.allclose(w, [1, 1, 1])
        assert np.allclose(V @ V.T, np.eye(3))

    def test_analytic_2x2(self):
        w, V = nk.sym_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(w, [3.0, 1.0])
        assert np.allclose(V[:, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)])
        assert np.allclose(V[:, 1], [1 / np.sqrt(2), -1 / np.sqrt(2)])

    def test_reconstruction_8x8(self):
        rng = nk.rng_from_seed(101)
        M = rng.standard_normal((8, 8))
        M = M + M.T
        w, V = nk.sym_eig(M)
        assert np.linalg.norm(V @ np.diag(w) @ V.T - M) <= 1e-9 * np.linalg.norm(M)

    def test_sign_convention(self):
        rng = nk.rng_from_seed(5)
        M = rng.standard_normal((6, 6))
        M = M + M.T
        _, V = nk.sym_eig(M)
        for j in range(6):
            col = V[:, j]
            first = col[np.abs(col) > 1e-12 * np.abs(col).max()][0]
            assert first > 0

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            nk.sym_eig(np.ones((2, 3)))

    def test_rejects_asymmetric(self):
        M = np.array([[1.0, 2.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            nk.sym_eig(M)

    @settings(deadline=None, max_examples=25)
    @given(st.integers(0, 10 ** 6), st.integers(2, 12))
    def test_trace_and_frobenius_identities(self, seed, size):
        rng = nk.rng_from_seed(seed)
        M = rng.standard_normal((size, size))
        M = M + M.T
        w, _ = nk.sym_eig(M)
        assert np.isclose(w.sum(), np.trace(M), rtol=1e-9, atol=1e-9)
        assert np.isclose(
            (w ** 2).sum(), np.linalg.norm(M) ** 2, rtol=1e-9, atol=1e-9
        )


class TestSvd:
    def test_rank_one_ones(self):
        res = nk.svd(np.ones((2, 3)))
        assert np.allclose(res.s, [np.sqrt(6), 0.0])
        assert res.s[1] == 0.0

    def test_zero_matrix(self):
        res = nk.svd(np.zeros((3, 4)))
        assert np.all(res.s == 0.0)

    def test_cross_kernel_oracle_5x7(self):
        rng = nk.rng_from_seed(7)
        X = rng.standard_normal((5, 7))
        s = nk.svd(X).s
        w, _ = nk.sym_eig(X @ X.T)
        assert np.allclose(s, np.sqrt(np.maximum(w, 0.0)), atol=1e-8)

    def test_reconstruction(self):
        rng = nk.rng_from_seed(8)
        X = rng.standard_normal((6, 9))
        res = nk.svd(X)
        assert np.linalg.norm(res.u * res.s @ res.v.T - X) <= 1e-9 * np.linalg.norm(X)

    @settings(deadline=None, max_examples=20)
    @given(st.integers(0, 10 ** 6), st.integers(1, 8), st.integers(1, 8))
    def test_transpose_same_singulars(self, seed, n, m):
        rng = nk.rng_from_seed(seed)
        X = rng.standard_normal((n, m))
        k = min(n, m)
        assert np.allclose(nk.svd(X).s[:k], nk.svd(X.T).s[:k], atol=1e-10)


class TestComplexLogDet:
    def test_identity(self):
        assert nk.complex_log_det(np.eye(4, dtype=complex)) == (0.0, 0.0)

    def test_diagonal(self):
        mod, arg = nk.complex_log_det(np.diag([2j, 3.0 + 0j]))
        assert np.isclose(mod, np.log(6.0))
        assert np.isclose(arg, np.pi / 2)

    def test_cofactor_oracle_6x6(self):
        rng = nk.rng_from_seed(12)
        M = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        mod, arg = nk.complex_log_det(M)
        ref = det_cofactor(M)
        got = np.exp(mod) * np.exp(1j * arg)
        assert abs(got - ref) <= 1e-10 * abs(ref)

    @settings(deadline=None, max_examples=20)
    @given(st.integers(0, 10 ** 6))
    def test_multiplicativity(self, seed):
        rng = nk.rng_from_seed(seed)
        A = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        B = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        ma, aa = nk.complex_log_det(A)
        mb, ab = nk.complex_log_det(B)
        mab, aab = nk.complex_log_det(A @ B)
        assert np.isclose(mab, ma + mb, rtol=1e-9, atol=1e-9)
        assert abs(nk.wrap_angle(aab - (aa + ab))) <= 1e-9

    def test_singular(self):
        M = np.zeros((3, 3), dtype=complex)
        mod, arg = nk.complex_log_det(M)
        assert mod == -np.inf
        assert arg == 0.0

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            nk.complex_log_det(np.ones((2, 3), dtype=complex))


class TestRngStream:
    def test_equal_seeds_byte_identical(self):
        a = nk.rng_from_seed(99).bytes(64)
        b = nk.rng_from_seed(99).bytes(64)
        assert a == b

    def test_different_seeds_differ(self):
        assert nk.rng_from_seed(1).bytes(32) != nk.rng_from_seed(2).bytes(32)

    def test_substreams_deterministic_and_distinct(self):
        a = nk.rng_substream(5, 0).bytes(32)
        b = nk.rng_substream(5, 0).bytes(32)
        c = nk.rng_substream(5, 1).bytes(32)
        assert a == b
        assert a != c
