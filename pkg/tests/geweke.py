"""Joint-distribution (prior invariance) check for the Gibbs kernel.

Each cycle draws a fresh state from the prior, simulates responses from it,
and pushes the pair through a few full Gibbs sweeps with data re-simulated in
between.  Because every sweep leaves the conditional posterior invariant, the
recorded parameters remain prior-distributed, and cycles are independent, so
plain KS comparisons against the priors apply.
"""

from dataclasses import replace as dc_replace

import numpy as np
from scipy import stats

from longmem.mixture import ModelConfig, prior_draw, simulate_responses
from longmem.sampler import gibbs_sweep
from longmem.spectral import RegressionSample, regressor

GEWEKE_SCALES = {
    "mu": 1.0, "pi": 0.8, "stick": 0.25, "knot": 0.5, "xi": 0.8,
    "nu": 0.3, "a": 1.0, "b": 1.0, "sigma2_theta": 1.2,
}

# Proper, numerically tame test priors: the production defaults put an
# IG(0.01, 0.01) on the base variance whose raw prior draws overflow doubles.
GEWEKE_CONFIG = ModelConfig(
    lambda_min=0.05,
    lambda_max=float(np.pi),
    h_components=3,
    stick_ab_min=0.5,
    base_var_shape=2.0,
    base_var_scale=2.0,
    atom_var_shape=2.0,
    atom_var_scale=2.0,
    c_prior_var=25.0,
)


def run_invariance_cycles(cycles, seed, m=20, sweeps_per_cycle=3, config=GEWEKE_CONFIG):
    """Returns per-cycle (d, c, xi) after pushing prior draws through sweeps."""
    rng = np.random.default_rng(seed)
    lam = np.linspace(0.3, 2.8, m)
    x = regressor(lam)
    base = RegressionSample(np.zeros(m), x, lam, K=1, ell=0, m=m, n=200)
    out = np.empty((cycles, 3))
    for t in range(cycles):
        state = prior_draw(config, lam, rng)
        data = dc_replace(base, responses=simulate_responses(state, x, rng))
        for _ in range(sweeps_per_cycle):
            state = gibbs_sweep(state, data, rng, config, GEWEKE_SCALES)
            data = dc_replace(data, responses=simulate_responses(state, x, rng))
        out[t] = state.d, state.c, state.sticks.xi
    return out


def invariance_ks_statistics(cycles=5000, seed=42, config=GEWEKE_CONFIG):
    """KS statistics of the d, c and xi marginals against their priors."""
    out = run_invariance_cycles(cycles, seed, config=config)
    span = config.d_high - config.d_low
    ks_d = stats.kstest(out[:, 0], stats.uniform(loc=config.d_low, scale=span).cdf).statistic
    ks_c = stats.kstest(out[:, 1], stats.norm(0.0, np.sqrt(config.c_prior_var)).cdf).statistic
    rng = np.random.default_rng(seed + 99_991)
    nu = rng.uniform(0.0, 1.0, cycles)
    xi_prior = 1.0 / rng.gamma(config.xi_shape, 2.0 / nu**2)
    ks_xi = stats.ks_2samp(out[:, 2], xi_prior).statistic
    return {"d": float(ks_d), "c": float(ks_c), "xi": float(ks_xi)}
