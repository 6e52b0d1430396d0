"""Reference estimators: least-squares log-periodogram regression, a
parametric Whittle-likelihood Bayesian chain, and time-domain memory
diagnostics (rescaled-range Hurst variants and second-order detrended
fluctuation analysis).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .arfima import ArfimaParams, spectral_density
from .chains import ChainConfig, PosteriorDraws, ScaleAdapter
from .errors import (
    DegenerateInputError,
    DomainError,
    InvalidInputError,
    NumericError,
)
from .spectral import RegressionSample, as_timeseries, periodogram

Z_95 = 1.96  # conventional two-sided 95% multiplier


@dataclass(frozen=True)
class LsEstimate:
    """Least-squares fit of the pooled log-periodogram regression."""

    c_hat: float
    d_hat: float
    se: float
    ci_low: float
    ci_high: float
    m: int
    ell: int
    K: int


@dataclass(frozen=True)
class DiagnosticsReport:
    """Time-domain long-memory diagnostics for one series."""

    rs_hurst: float
    corrected_rs_hurst: float
    empirical_hurst: float
    dfa2_slope: float


def default_bandwidth(n: int) -> int:
    """Bandwidth 1 + floor(n^0.8), capped at floor(n/2).

    The floor convention is used throughout; analyses that need a specific
    bandwidth should pass m explicitly.
    """
    if n < 16:
        raise InvalidInputError(f"need n >= 16 for the default bandwidth, got {n}")
    return min(1 + math.floor(n**0.8), n // 2)


def fit_ls(sample: RegressionSample) -> LsEstimate:
    """Ordinary least squares of the responses on (1, regressor).

    The regressor already carries its minus sign, so the fitted slope is the
    long-memory estimate itself.  For K = 1 the standard error comes from the
    asymptotic slope variance pi^2 / (24 m') with m' the number of grid
    points; for pooled fits (K > 1) it falls back to the residual-based OLS
    variance.
    """
    x = sample.regressors
    y = sample.responses
    if len(x) < 3:
        raise InvalidInputError("need at least 3 grid points for the regression")
    sxx = float(np.sum((x - x.mean()) ** 2))
    if sxx <= 0.0:
        raise InvalidInputError("regressor is constant; slope is unidentified")
    d_hat = float(np.sum((x - x.mean()) * (y - y.mean())) / sxx)
    c_hat = float(y.mean() - d_hat * x.mean())
    if sample.K == 1:
        se = math.sqrt(math.pi**2 / (24.0 * len(x)))
    else:
        resid = y - c_hat - d_hat * x
        s2 = float(np.sum(resid**2)) / (len(x) - 2)
        se = math.sqrt(s2 / sxx)
    return LsEstimate(
        c_hat=c_hat,
        d_hat=d_hat,
        se=se,
        ci_low=d_hat - Z_95 * se,
        ci_high=d_hat + Z_95 * se,
        m=sample.m,
        ell=sample.ell,
        K=sample.K,
    )


# ---------------------------------------------------------------------------
# Whittle likelihood and the parametric Bayesian chain


def whittle_neg_loglik(series, params: ArfimaParams) -> float:
    """Whittle pseudo negative log-likelihood sum_j [log f + I/f]."""
    series = as_timeseries(series)
    pg = periodogram(series)
    f = spectral_density(params, pg.frequencies)
    if np.any(f <= 0.0) or not np.all(np.isfinite(f)):
        raise DomainError("spectral density is zero or infinite on the grid")
    value = float(np.sum(np.log(f) + pg.ordinates / f))
    if not np.isfinite(value):
        raise NumericError("Whittle objective overflowed")
    return value


_PARAM_MODELS = ("0d0", "1d1")
_SIGMA2_PRIOR_SHAPE = 0.1
_SIGMA2_PRIOR_SCALE = 0.1


class _WhittleTarget:
    """Whittle pseudo-posterior over (d, phi, theta, log sigma2).

    Flat priors on d in (-1, 1/2) and phi, theta in (-1, 1); sigma2 carries an
    IG(0.1, 0.1) prior with the log-scale Jacobian folded in.  Periodogram
    quantities are precomputed once per series.
    """

    def __init__(self, series, model: str):
        if model not in _PARAM_MODELS:
            raise InvalidInputError(f"unknown parametric model {model!r}; use one of {_PARAM_MODELS}")
        self.model = model
        pg = periodogram(as_timeseries(series))
        self.ords = pg.ordinates
        self.cos_lam = np.cos(pg.frequencies)
        self.log_4sin2 = np.log(4.0 * np.sin(pg.frequencies / 2.0) ** 2)

    def __call__(self, d, phi, theta, log_s2):
        if not (-1.0 < d < 0.5 and abs(phi) < 1.0 and abs(theta) < 1.0):
            return -np.inf
        log_f = (
            log_s2
            - math.log(2.0 * math.pi)
            + np.log1p(2.0 * theta * self.cos_lam + theta * theta)
            - np.log1p(-2.0 * phi * self.cos_lam + phi * phi)
            - d * self.log_4sin2
        )
        whittle = float(np.sum(log_f) + np.sum(self.ords * np.exp(-log_f)))
        s2 = math.exp(log_s2)
        prior = (
            -(_SIGMA2_PRIOR_SHAPE + 1.0) * log_s2
            - _SIGMA2_PRIOR_SCALE / s2
            + log_s2  # Jacobian of the log transform
        )
        return -whittle + prior


def run_param_chain(series, model: str, config: ChainConfig) -> PosteriorDraws:
    """Random-walk MH over the Whittle pseudo-posterior of an ARFIMA model.

    ``model`` selects "0d0" (phi = theta = 0 held fixed) or "1d1".  Draws
    respect the supports by construction and the run is reproducible for a
    fixed seed.  The intercept slot of the returned draws is None; the ARMA
    coefficients and innovation variance are stored as extras.
    """
    series = as_timeseries(series)
    target = _WhittleTarget(series, model)
    rng = np.random.default_rng(config.seed)

    names = ["d", "log_s2"] if model == "0d0" else ["d", "phi", "theta", "log_s2"]
    values = {"d": 0.0, "phi": 0.0, "theta": 0.0,
              "log_s2": math.log(max(float(series.values.var()), 1e-12))}
    current = target(values["d"], values["phi"], values["theta"], values["log_s2"])
    if not np.isfinite(current):
        raise NumericError("Whittle target is non-finite at the starting point")

    scales = {"param": np.full(len(names), config.scale_for("param"))}
    adapter = ScaleAdapter(scales, config.target_accept)
    if not config.adapt:
        adapter.freeze()

    kept = config.kept_draws
    store = {name: np.empty(kept) for name in names}
    acc_sum = 0.0
    acc_n = 0.0
    idx = 0
    for it in range(1, config.iterations + 1):
        acc_vec = np.empty(len(names))
        for k, name in enumerate(names):
            proposal = dict(values)
            proposal[name] = values[name] + adapter.scales["param"][k] * rng.standard_normal()
            cand = target(proposal["d"], proposal["phi"], proposal["theta"], proposal["log_s2"])
            accepted = math.log(1.0 - rng.random()) < cand - current
            if accepted:
                values = proposal
                current = cand
            acc_vec[k] = accepted
        acc_sum += acc_vec.sum()
        acc_n += len(names)
        if it <= config.burn_in:
            adapter.update("param", acc_vec, it)
        if it == config.burn_in:
            adapter.freeze()
        if it > config.burn_in and (it - config.burn_in) % config.thin == 0:
            for name in names:
                store[name][idx] = values[name]
            idx += 1

    extras = {"sigma2": np.exp(store.pop("log_s2"))}
    if model == "1d1":
        extras["phi"] = store.pop("phi")
        extras["theta"] = store.pop("theta")
    return PosteriorDraws(
        d=store["d"], c=None,
        acceptance={"param": acc_sum / acc_n},
        seed=config.seed, iterations=config.iterations,
        burn_in=config.burn_in, thin=config.thin, extras=extras,
    )


# ---------------------------------------------------------------------------
# time-domain diagnostics


def _dyadic_windows(n: int, smallest: int) -> list[int]:
    sizes = []
    w = n
    while w >= smallest:
        sizes.append(w)
        w //= 2
    return sizes


def _rs_statistics(x: np.ndarray, window: int, q: int) -> float:
    """Mean rescaled range over non-overlapping blocks of the given size.

    With q > 0 the denominator is Lo's autocovariance-adjusted standard
    deviation with Bartlett weights up to lag q.
    """
    nblocks = len(x) // window
    blocks = x[: nblocks * window].reshape(nblocks, window)
    dev = blocks - blocks.mean(axis=1, keepdims=True)
    cum = np.cumsum(dev, axis=1)
    rng_ = cum.max(axis=1) - cum.min(axis=1)
    var = (dev**2).mean(axis=1)
    if q > 0:
        for lag in range(1, q + 1):
            gamma = (dev[:, :-lag] * dev[:, lag:]).sum(axis=1) / window
            var = var + 2.0 * (1.0 - lag / (q + 1.0)) * gamma
    var = np.maximum(var, 0.0)
    keep = var > 0.0
    if not np.any(keep):
        return np.nan
    return float(np.mean(rng_[keep] / np.sqrt(var[keep])))


def rs_hurst(series, corrected: bool = False) -> float:
    """Rescaled-range Hurst exponent over dyadic window sizes.

    The classical statistic regresses log(R/S) on log(window).  The corrected
    variant replaces the block standard deviation with Lo's
    autocovariance-adjusted version, truncation lag q = floor(4 (n/100)^0.25).
    """
    series = as_timeseries(series)
    x = series.values
    n = series.n
    if n < 64:
        raise InvalidInputError(f"need n >= 64 for R/S analysis, got {n}")
    q = math.floor(4.0 * (n / 100.0) ** 0.25) if corrected else 0
    smallest = max(8, 2 * (q + 1))
    sizes = _dyadic_windows(n, smallest)
    if len(sizes) < 2:
        raise InvalidInputError("series too short for the corrected R/S window grid")
    log_w, log_rs = [], []
    for w in sizes:
        stat = _rs_statistics(x, w, min(q, w // 2 - 1) if corrected else 0)
        if np.isfinite(stat) and stat > 0.0:
            log_w.append(math.log(w))
            log_rs.append(math.log(stat))
    if len(log_rs) < 2:
        raise DegenerateInputError("rescaled range is degenerate on every window")
    slope = np.polyfit(log_w, log_rs, 1)[0]
    return float(slope)


def _expected_rs(window: int) -> float:
    """Small-sample expectation of R/S under independent Gaussian noise."""
    i = np.arange(1, window)
    tail = float(np.sqrt((window - i) / i).sum())
    if window <= 340:
        lead = math.exp(gammaln((window - 1) / 2.0) - gammaln(window / 2.0)) / math.sqrt(math.pi)
    else:
        lead = 1.0 / math.sqrt(window * math.pi / 2.0)
    return lead * tail * (window - 0.5) / window


def empirical_hurst(series) -> float:
    """Hurst exponent from the deviation of R/S from its white-noise mean.

    H = 1/2 plus the slope of log(R/S) - log E[R/S] on log(window), which
    removes the small-sample bias of the plain statistic.
    """
    series = as_timeseries(series)
    x = series.values
    n = series.n
    if n < 64:
        raise InvalidInputError(f"need n >= 64 for R/S analysis, got {n}")
    log_w, log_dev = [], []
    for w in _dyadic_windows(n, 8):
        stat = _rs_statistics(x, w, 0)
        if np.isfinite(stat) and stat > 0.0:
            log_w.append(math.log(w))
            log_dev.append(math.log(stat) - math.log(_expected_rs(w)))
    if len(log_dev) < 2:
        raise DegenerateInputError("rescaled range is degenerate on every window")
    slope = np.polyfit(log_w, log_dev, 1)[0]
    return float(0.5 + slope)


def dfa2(series) -> float:
    """Second-order detrended fluctuation slope.

    The mean-removed profile is split into non-overlapping windows for 16
    log-spaced sizes between 10 and n/4; each window is quadratically
    detrended and F(s) is the root-mean-square residual.  Returns the
    least-squares slope of log F(s) on log s.
    """
    series = as_timeseries(series)
    x = series.values
    n = series.n
    if n < 256:
        raise InvalidInputError(f"need n >= 256 for DFA2, got {n}")
    profile = np.cumsum(x - x.mean())
    sizes = np.unique(np.geomspace(10, n // 4, 16).astype(int))
    log_s, log_f = [], []
    scale = float(np.sqrt(np.mean(profile**2))) + 1e-300
    for s in sizes:
        nwin = n // s
        if nwin < 1:
            continue
        segs = profile[: nwin * s].reshape(nwin, s)
        t = np.arange(s, dtype=float)
        design = np.column_stack((np.ones(s), t, t * t))
        qmat, _ = np.linalg.qr(design)
        resid = segs - (segs @ qmat) @ qmat.T
        f_s = float(np.sqrt(np.mean(resid**2)))
        if f_s < 1e-10 * scale:
            raise DegenerateInputError(
                "fluctuation function is numerically zero; quadratic detrending "
                "annihilated the profile"
            )
        log_s.append(math.log(s))
        log_f.append(math.log(f_s))
    slope = np.polyfit(log_s, log_f, 1)[0]
    return float(slope)


def diagnostics(series) -> DiagnosticsReport:
    """All four memory diagnostics for one series."""
    series = as_timeseries(series)
    return DiagnosticsReport(
        rs_hurst=rs_hurst(series),
        corrected_rs_hurst=rs_hurst(series, corrected=True),
        empirical_hurst=empirical_hurst(series),
        dfa2_slope=dfa2(series),
    )
