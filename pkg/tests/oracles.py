"""Independent reference implementations used to freeze expected values.

Everything here is deliberately naive (direct double sums, brute-force
mixture expansion, textbook recursions) and stays independent of the library
code paths it checks.
"""

import numpy as np
from scipy.special import gammaln


def direct_periodogram(x, j_values):
    """O(n^2) trigonometric double-sum periodogram at 1-based bin indices."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    t = np.arange(1, n + 1)
    out = []
    for j in j_values:
        lam = 2.0 * np.pi * j / n
        cos_part = float((x * np.cos(lam * t)).sum())
        sin_part = float((x * np.sin(lam * t)).sum())
        out.append((cos_part**2 + sin_part**2) / (2.0 * np.pi * n))
    return np.asarray(out)


def fractional_noise_acov(d, sigma2, nlags):
    """Exact autocovariances of (1-B)^(-d) eps via the gamma-ratio recursion."""
    gamma0 = sigma2 * np.exp(gammaln(1.0 - 2.0 * d) - 2.0 * gammaln(1.0 - d))
    acov = np.empty(nlags + 1)
    acov[0] = gamma0
    for k in range(1, nlags + 1):
        acov[k] = acov[k - 1] * (k - 1.0 + d) / (k - d)
    return acov


def hosking_simulate(d, n, rng):
    """Exact Gaussian fractional noise via the Durbin-Levinson recursion."""
    acov = fractional_noise_acov(d, 1.0, n)
    x = np.empty(n)
    phis = np.empty(n)
    v = acov[0]
    x[0] = rng.standard_normal() * np.sqrt(v)
    prev = np.empty(0)
    for t in range(1, n):
        if t == 1:
            phis[0] = acov[1] / acov[0]
        else:
            num = acov[t] - float((prev * acov[t - 1 : 0 : -1]).sum())
            phis[t - 1] = num / v
            phis[: t - 1] = prev - phis[t - 1] * prev[::-1]
        v = v * (1.0 - phis[t - 1] ** 2)
        mean = float((phis[:t] * x[t - 1 :: -1][:t]).sum())
        x[t] = mean + rng.standard_normal() * np.sqrt(v)
        prev = phis[:t].copy()
    return x


def norm_pdf(u, mean, sd):
    return np.exp(-0.5 * ((u - mean) / sd) ** 2) / (sd * np.sqrt(2.0 * np.pi))


def brute_force_mixture_weights(v, knots, xi, kind, lam):
    """Hand-expanded stick-breaking weights for one frequency."""
    h = len(v)
    weights = np.empty(h)
    survival = 1.0
    for idx in range(h):
        if kind == "squared-exponential":
            w = np.exp(-((lam - knots[idx]) / xi) ** 2)
        else:
            w = np.exp(-abs(lam - knots[idx]) / xi)
        vw = 1.0 if idx == h - 1 else v[idx] * w
        weights[idx] = vw * survival
        survival *= 1.0 - vw
    return weights


def brute_force_loglik(y, lam, x, c, d, pis, mus, s1s, s2s, v, knots, xi, kind):
    """Direct log-likelihood: loop over observations and components."""
    total = 0.0
    for j in range(len(y)):
        u = y[j] - c - d * x[j]
        weights = brute_force_mixture_weights(v, knots, xi, kind, lam[j])
        dens = 0.0
        for h in range(len(pis)):
            mu2 = -mus[h] * pis[h] / (1.0 - pis[h])
            b = pis[h] * norm_pdf(u, mus[h], s1s[h]) + (1.0 - pis[h]) * norm_pdf(u, mu2, s2s[h])
            dens += weights[h] * b
        total += np.log(dens)
    return total


def bayes_weighted_ls(y, x, weights, c_prior_var):
    """Posterior mean/cov of (c, d) in the heteroscedastic linear model."""
    design = np.column_stack((np.ones_like(x), x))
    precision = design.T @ (design * weights[:, None])
    precision[0, 0] += 1.0 / c_prior_var
    cov = np.linalg.inv(precision)
    mean = cov @ (design.T @ (weights * y))
    return mean, cov
