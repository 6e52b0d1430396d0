import numpy as np
import pytest

from longmem import (
    ArfimaParams,
    DomainError,
    InvalidInputError,
    fit_ls,
    fracdiff_ma_coefficients,
    periodogram,
    pooled_log_periodogram,
    simulate,
    spectral_density,
)

from oracles import fractional_noise_acov, hosking_simulate


class TestParams:
    def test_validation(self):
        with pytest.raises(DomainError):
            ArfimaParams(d=0.5)
        with pytest.raises(DomainError):
            ArfimaParams(d=-1.0)
        with pytest.raises(InvalidInputError):
            ArfimaParams(d=0.1, phi=1.0)
        with pytest.raises(InvalidInputError):
            ArfimaParams(d=0.1, theta=-1.0)
        with pytest.raises(InvalidInputError):
            ArfimaParams(d=0.1, sigma2=0.0)


class TestFracdiffCoefficients:
    def test_white_noise(self):
        np.testing.assert_allclose(fracdiff_ma_coefficients(0.0, 5), [1, 0, 0, 0, 0])

    def test_first_coefficient_is_d(self):
        for d in (-0.7, -0.2, 0.1, 0.45):
            assert fracdiff_ma_coefficients(d, 2)[1] == pytest.approx(d, rel=1e-15)

    def test_second_coefficient(self):
        # psi_2 = psi_1 * (1 + d) / 2 = 0.4 * 1.4 / 2
        assert fracdiff_ma_coefficients(0.4, 3)[2] == pytest.approx(0.28, rel=1e-14)

    def test_positive_decreasing_for_positive_d(self):
        psi = fracdiff_ma_coefficients(0.3, 200)
        assert np.all(psi > 0)
        assert np.all(np.diff(psi[1:]) < 0)

    def test_domain(self):
        with pytest.raises(DomainError):
            fracdiff_ma_coefficients(0.6, 10)


class TestSimulate:
    def test_white_noise_variance(self):
        series = simulate(ArfimaParams(d=0.0), 10_000, seed=5)
        assert series.values.var() == pytest.approx(1.0, rel=0.05)

    def test_deterministic(self):
        a = simulate(ArfimaParams(d=0.3, phi=0.2, theta=0.1), 500, seed=9)
        b = simulate(ArfimaParams(d=0.3, phi=0.2, theta=0.1), 500, seed=9)
        assert np.array_equal(a.values, b.values)

    def test_hyperbolic_vs_geometric_lag50(self):
        # Exact oracle values: fractional-noise lag-50 autocorrelation is large
        # while the AR(1) benchmark's phi^50 is numerically zero.
        acov = fractional_noise_acov(0.4, 1.0, 50)
        rho50_exact = acov[50] / acov[0]
        ar1_rho50 = 0.5**50
        assert rho50_exact > 0.25
        sample_rhos = []
        for seed in range(20):
            x = simulate(ArfimaParams(d=0.4), 10_000, seed=100 + seed).values
            x = x - x.mean()
            rho = float((x[:-50] * x[50:]).sum() / (x * x).sum())
            sample_rhos.append(rho)
        median_rho = np.median(sample_rhos)
        assert median_rho > 0.0
        assert median_rho > ar1_rho50
        # Sample ACFs at long lags are downward-biased once the mean is
        # estimated, so only a loose band around the exact value is asserted.
        assert 0.08 < median_rho < rho50_exact + 0.1

    def test_autocovariance_matches_exact_recursion(self):
        # Cross-check the MA-truncation generator against the exact Gaussian
        # (Durbin-Levinson) oracle at n = 512 via averaged sample moments.
        d = 0.25
        exact = fractional_noise_acov(d, 1.0, 5)
        reps = 200
        acc_sim = np.zeros(6)
        acc_oracle = np.zeros(6)
        rng = np.random.default_rng(77)
        for rep in range(reps):
            x = simulate(ArfimaParams(d=d), 512, seed=5000 + rep).values
            y = hosking_simulate(d, 512, rng)
            for k in range(6):
                acc_sim[k] += (x[: 512 - k] * x[k:]).mean()
                acc_oracle[k] += (y[: 512 - k] * y[k:]).mean()
        acc_sim /= reps
        acc_oracle /= reps
        np.testing.assert_allclose(acc_sim, exact, rtol=0.06)
        np.testing.assert_allclose(acc_oracle, exact, rtol=0.06)

    def test_short_series_rejected(self):
        with pytest.raises(InvalidInputError):
            simulate(ArfimaParams(d=0.1), 3, seed=0)


class TestSpectralDensity:
    def test_white_noise_flat(self):
        params = ArfimaParams(d=0.0)
        lams = np.linspace(0.01, np.pi, 50)
        np.testing.assert_allclose(
            spectral_density(params, lams), 1.0 / (2 * np.pi), rtol=1e-14
        )

    def test_fractional_at_pi(self):
        value = spectral_density(ArfimaParams(d=0.25), np.pi)
        assert value == pytest.approx(1.0 / (2 * np.pi) * 2**-0.5, rel=1e-12)

    def test_arma_moduli_near_origin(self):
        value = spectral_density(ArfimaParams(d=0.0, phi=0.5, theta=0.1), 1e-9)
        assert value == pytest.approx((1.1**2 / 0.5**2) / (2 * np.pi), rel=1e-6)

    def test_low_frequency_power_law_bounded(self):
        # log f + 2 d log(lambda) stays bounded toward the origin.
        params = ArfimaParams(d=0.35, phi=0.4, theta=0.2)
        lams = np.geomspace(1e-8, 1e-2, 40)
        values = np.log(spectral_density(params, lams)) + 2 * params.d * np.log(lams)
        assert np.ptp(values) < 0.1
        assert np.all(np.isfinite(values))

    def test_domain(self):
        with pytest.raises(DomainError):
            spectral_density(ArfimaParams(d=0.2), 0.0)


class TestPeriodogramSlopeRecovery:
    @pytest.mark.slow
    def test_ls_slope_recovers_d(self):
        for d in (0.2, 0.4):
            estimates = []
            for seed in range(20):
                series = simulate(ArfimaParams(d=d), 10_000, seed=300 + seed)
                sample = pooled_log_periodogram(periodogram(series), K=1, ell=0, m=1586)
                estimates.append(fit_ls(sample).d_hat)
            assert np.median(estimates) == pytest.approx(d, abs=0.1)
