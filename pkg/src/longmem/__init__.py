"""Long-memory time-series toolkit.

Simulates ARFIMA processes and estimates the long-memory parameter d from the
log-periodogram three ways: least-squares regression, a Bayesian
semiparametric mixture model with frequency-dependent weights, and a
parametric Bayesian Whittle-likelihood chain.  A study harness reproduces
simulation tables and real-data analyses at configurable scale.
"""

from .arfima import ArfimaParams, fracdiff_ma_coefficients, simulate, spectral_density
from .baselines import (
    DiagnosticsReport,
    LsEstimate,
    default_bandwidth,
    dfa2,
    diagnostics,
    empirical_hurst,
    fit_ls,
    rs_hurst,
    run_param_chain,
    whittle_neg_loglik,
)
from .chains import ChainConfig, PosteriorDraws, PosteriorSummary, effective_sample_size, summarize
from .errors import (
    DegenerateInputError,
    DomainError,
    InvalidBandwidthError,
    InvalidInputError,
    LongmemError,
    NumericError,
)
from .mixture import (
    Atom,
    AtomSet,
    ModelConfig,
    ModelState,
    StickState,
    kernel_pdf,
    kernel_weight,
    log_prior,
    loglik,
    mixture_weights,
)
from .sampler import init_state, run_chain
from .spectral import (
    Periodogram,
    RegressionSample,
    TimeSeries,
    fourier_frequencies,
    periodogram,
    pooled_log_periodogram,
    regressor,
)

__version__ = "0.1.0"
