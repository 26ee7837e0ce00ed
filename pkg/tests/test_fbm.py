import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats
from scipy.linalg import solve_triangular, toeplitz

from hurstqv.errors import DomainError, FactorizationError, SynthesisError
from hurstqv import fbm
from hurstqv.fbm import (
    cholesky_fgn_oracle,
    eigen_moment_stats,
    fbm_path,
    fgn_autocovariance,
    generate_fgn,
    second_increment_cov,
    second_increment_cov_matrix,
)

H_GRID = [0.55, 0.65, 0.75, 0.85, 0.95]


def fbm_cov(s, t, hurst):
    return 0.5 * (abs(s) ** (2 * hurst) + abs(t) ** (2 * hurst) - abs(t - s) ** (2 * hurst))


def brute_second_increment_cov(i, j, n, hurst):
    """Expand E[(B_i - 2B_{i-1} + B_{i-2})(B_j - 2B_{j-1} + B_{j-2})] term by term."""
    total = 0.0
    for a, p in zip((1, -2, 1), (0, 1, 2)):
        for b, q in zip((1, -2, 1), (0, 1, 2)):
            total += a * b * fbm_cov((i - p) / n, (j - q) / n, hurst)
    return total


def sample_autocov(x, lag):
    x = x - x.mean()
    return np.dot(x[: x.size - lag], x[lag:]) / x.size


class TestAutocovariance:
    def test_unit_variance(self):
        assert fgn_autocovariance(0, 0.7) == 1.0

    def test_white_noise_at_half(self):
        assert fgn_autocovariance(1, 0.5) == pytest.approx(0.0, abs=1e-15)

    def test_lag_one_h075(self):
        expected = 0.5 * (2**1.5 - 2)
        assert fgn_autocovariance(1, 0.75) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(0.414214, abs=1e-6)
        # E[B_1 (B_2 - B_1)] from the fBm covariance
        brute = fbm_cov(1, 2, 0.75) - fbm_cov(1, 1, 0.75)
        assert fgn_autocovariance(1, 0.75) == pytest.approx(brute, rel=1e-12)

    @given(st.integers(0, 1000), st.floats(0.01, 0.99))
    def test_symmetric_in_lag(self, k, hurst):
        assert fgn_autocovariance(k, hurst) == fgn_autocovariance(-k, hurst)

    @pytest.mark.parametrize("hurst", [0.0, 1.0, -0.2, 1.5])
    def test_domain(self, hurst):
        with pytest.raises(DomainError):
            fgn_autocovariance(1, hurst)


class TestSecondIncrementCov:
    @pytest.mark.parametrize("n,hurst", [(4, 0.5), (10, 0.7), (1000, 0.95)])
    def test_diagonal(self, n, hurst):
        expected = (4 - 2 ** (2 * hurst)) * n ** (-2 * hurst)
        assert second_increment_cov(3, 3, n, hurst) == pytest.approx(expected, rel=1e-13)

    def test_independent_increments_at_half(self):
        assert second_increment_cov(2, 4, 4, 0.5) == pytest.approx(0.0, abs=1e-15)

    def test_matches_covariance_expansion(self):
        expected = brute_second_increment_cov(2, 3, 8, 0.8)
        assert second_increment_cov(2, 3, 8, 0.8) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("hurst", [0.3, 0.6, 0.9])
    def test_matrix_matches_expansion(self, hurst):
        n = 12
        mat = second_increment_cov_matrix(n, hurst)
        brute = np.array([[brute_second_increment_cov(i, j, n, hurst)
                           for j in range(2, n + 1)] for i in range(2, n + 1)])
        np.testing.assert_allclose(mat, brute, rtol=1e-10, atol=1e-14)

    @pytest.mark.parametrize("i,j", [(1, 2), (2, 9), (0, 0)])
    def test_index_range(self, i, j):
        with pytest.raises(DomainError):
            second_increment_cov(i, j, 8, 0.7)


class TestGenerateFgn:
    def test_white_noise(self):
        x = generate_fgn(4096, 0.5, seed=1).values
        assert abs(sample_autocov(x, 1) / sample_autocov(x, 0)) < 0.05

    def test_autocovariance_h075(self):
        reps = [generate_fgn(4096, 0.75, seed=s).values for s in range(100)]
        for lag in range(6):
            est = np.mean([np.dot(x[: 4096 - lag], x[lag:]) / (4096 - lag) for x in reps])
            assert est == pytest.approx(fgn_autocovariance(lag, 0.75), abs=0.05)

    def test_autocovariance_converges_lags_0_to_10(self):
        # Monte-Carlo error O(1/sqrt(reps*n)): 64 x 2048 draws
        reps = np.array([generate_fgn(2048, 0.85, seed=1000 + s).values for s in range(64)])
        for lag in range(11):
            est = np.mean(reps[:, : 2048 - lag] * reps[:, lag:])
            assert est == pytest.approx(fgn_autocovariance(lag, 0.85), abs=0.06)

    @pytest.mark.parametrize("n,hurst", [(256, 0.9), (128, 0.7)])
    def test_agrees_with_cholesky_oracle(self, n, hurst):
        # values within one path are strongly dependent, so whiten every path
        # with the exact covariance factor before pooling: both generators
        # must then produce iid N(0, 1) draws
        lower = np.linalg.cholesky(
            toeplitz(fgn_autocovariance(np.arange(n), hurst)))

        def whitened(paths):
            return solve_triangular(lower, np.array(paths).T, lower=True).ravel()

        fft = whitened([generate_fgn(n, hurst, seed=s).values for s in range(200)])
        chol = whitened([cholesky_fgn_oracle(n, hurst, seed=1_000_000 + s).values
                         for s in range(200)])
        assert stats.ks_2samp(fft, chol).pvalue > 0.01
        assert stats.kstest(fft, "norm").pvalue > 0.01
        assert abs(fft.mean() - chol.mean()) < 0.02
        assert fft.var() == pytest.approx(chol.var(), rel=0.03)

    def test_deterministic(self):
        a = generate_fgn(1000, 0.7, seed=42).values
        b = generate_fgn(1000, 0.7, seed=42).values
        assert np.array_equal(a, b)
        assert not np.array_equal(a, generate_fgn(1000, 0.7, seed=43).values)

    @pytest.mark.parametrize("n", [2, 3, 17, 1000])
    def test_length(self, n):
        sample = generate_fgn(n, 0.3, seed=0)
        assert sample.n == n and sample.spacing == 1.0

    def test_bad_arguments(self):
        with pytest.raises(DomainError):
            generate_fgn(1, 0.7, seed=0)
        with pytest.raises(DomainError):
            generate_fgn(10, 1.0, seed=0)
        with pytest.raises(DomainError):
            generate_fgn(10, 0.7, seed=-1)

    def test_negative_eigenvalues_abort(self, monkeypatch):
        def bad_autocov(k, hurst):
            # circulant eigenvalues 1 + 1.8 cos(2 pi j / M) go negative
            k = np.asarray(k, dtype=float)
            return np.where(k == 0, 1.0, np.where(k == 1, 0.9, 0.0))
        monkeypatch.setattr(fbm, "fgn_autocovariance", bad_autocov)
        fbm._circulant_sqrt_eigenvalues.cache_clear()
        try:
            with pytest.raises(SynthesisError, match="H=0.61"):
                generate_fgn(16, 0.61, seed=0)
        finally:
            fbm._circulant_sqrt_eigenvalues.cache_clear()


class TestCholeskyOracle:
    def test_two_independent_increments(self):
        draws = np.array([cholesky_fgn_oracle(2, 0.5, seed=s).values for s in range(4000)])
        assert abs(np.corrcoef(draws.T)[0, 1]) < 0.05

    def test_empirical_covariance(self):
        draws = np.array([cholesky_fgn_oracle(64, 0.7, seed=s).values for s in range(10_000)])
        emp = draws.T @ draws / draws.shape[0]
        lags = np.abs(np.subtract.outer(np.arange(64), np.arange(64)))
        # each autocovariance entry, estimated along its diagonal
        by_lag = np.array([np.mean(np.diagonal(emp, k)) for k in range(64)])
        np.testing.assert_allclose(by_lag, fgn_autocovariance(np.arange(64), 0.7), atol=0.03)
        # single entries: sd ~ 0.014 with 1e4 draws
        np.testing.assert_allclose(emp, fgn_autocovariance(lags, 0.7), atol=0.06)

    def test_size_guard(self):
        with pytest.raises(DomainError):
            cholesky_fgn_oracle(2049, 0.7, seed=0)

    def test_factorization_error(self, monkeypatch):
        monkeypatch.setattr(fbm, "fgn_autocovariance",
                            lambda k, h: np.where(np.asarray(k) == 0, 1.0, 1.5))
        with pytest.raises(FactorizationError):
            cholesky_fgn_oracle(8, 0.7, seed=0)


class TestFbmPath:
    def test_starts_at_zero(self):
        path = fbm_path(64, 1.0, 0.7, seed=3)
        assert path.values[0] == 0.0 and path.m == 64

    def test_endpoint_variance(self):
        ends = [fbm_path(4096, 1.0, 0.6, seed=s).values[-1] for s in range(500)]
        assert np.var(ends) == pytest.approx(1.0, rel=0.10)

    def test_self_similar_scaling(self):
        hurst = 0.7
        one = fbm_path(256, 1.0, hurst, seed=9).values
        two = fbm_path(256, 2.0, hurst, seed=9).values
        np.testing.assert_allclose(two, 2**hurst * one, rtol=1e-12, atol=0)

    def test_too_few_steps(self):
        with pytest.raises(DomainError):
            fbm_path(3, 1.0, 0.7, seed=0)


class TestEigenMomentStats:
    @pytest.mark.parametrize("hurst", H_GRID)
    @pytest.mark.parametrize("n", [3, 64, 100, 512])
    def test_trace_identity(self, n, hurst):
        total, _, _ = eigen_moment_stats(n, hurst)
        expected = (n - 1) * (4 - 2 ** (2 * hurst)) / n ** (2 * hurst)
        assert total == pytest.approx(expected, rel=1e-10)

    def test_trace_n100_h07(self):
        total, _, _ = eigen_moment_stats(100, 0.7)
        assert total == pytest.approx(99 * (4 - 2**1.4) / 100**1.4, rel=1e-10)

    @pytest.mark.parametrize("hurst", [0.55, 0.75, 0.95])
    def test_max_eigenvalue_rate(self, hurst):
        ratio = eigen_moment_stats(1024, hurst)[2] / eigen_moment_stats(512, hurst)[2]
        target = 2 ** (-2 * hurst)
        assert 0.9 * target <= ratio <= 1.1 * target

    def test_normalised_variance_stabilises(self):
        hurst = 0.7

        def normalised(n):
            _, sum_sq, _ = eigen_moment_stats(n, hurst)
            return n * 2 * sum_sq / ((4 - 2 ** (2 * hurst)) ** 2 * n ** (-4 * hurst + 2))

        values = [normalised(n) for n in (128, 256, 512, 1024)]
        steps = np.abs(np.diff(values))
        assert np.all(steps[1:] < 0.6 * steps[:-1])
        assert steps[-1] / values[-1] < 5e-3

    def test_size_guard(self):
        with pytest.raises(DomainError):
            eigen_moment_stats(4097, 0.7)
