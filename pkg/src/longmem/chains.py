"""Shared MCMC plumbing: chain configuration, stored draws and summaries.

Used by both the semiparametric Gibbs sampler and the parametric
Whittle-likelihood chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import InvalidInputError
from .mixture import DOUBLE_EXPONENTIAL, KERNEL_KINDS

# One proposal scale per Metropolis-Hastings block of the semiparametric
# sweep; the parametric chain reuses the "param" entry for its coordinates.
DEFAULT_PROPOSAL_SCALES: Mapping[str, float] = MappingProxyType(
    {
        "mu": 0.5,
        "pi": 0.6,
        "stick": 0.25,
        "knot": 0.3,
        "xi": 0.6,
        "nu": 0.15,
        "a": 0.8,
        "b": 0.8,
        "sigma2_theta": 1.0,
        "param": 0.1,
    }
)


@dataclass(frozen=True)
class ChainConfig:
    """MCMC run configuration.

    ``proposal_scales`` are initial random-walk scales per MH block; they
    adapt toward ``target_accept`` during burn-in only (Robbins-Monro) and are
    frozen afterwards so the post-burn-in kernel is fixed.
    """

    iterations: int = 20_000
    burn_in: int = 10_000
    thin: int = 5
    seed: int = 0
    h_components: int = 30
    kernel_kind: str = DOUBLE_EXPONENTIAL
    proposal_scales: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_PROPOSAL_SCALES))
    adapt: bool = True
    target_accept: float = 0.44
    store_full_state: bool = False

    def __post_init__(self):
        if self.iterations < 1:
            raise InvalidInputError("need at least one iteration")
        if not 0 <= self.burn_in < self.iterations:
            raise InvalidInputError("burn-in must satisfy 0 <= burn_in < iterations")
        if self.thin < 1:
            raise InvalidInputError("thinning must be >= 1")
        if self.h_components < 2:
            raise InvalidInputError("need at least 2 mixture components")
        if self.kernel_kind not in KERNEL_KINDS:
            raise InvalidInputError(f"unknown kernel kind {self.kernel_kind!r}")

    @property
    def kept_draws(self) -> int:
        return (self.iterations - self.burn_in) // self.thin

    def scale_for(self, block: str) -> float:
        return float(self.proposal_scales.get(block, DEFAULT_PROPOSAL_SCALES[block]))


@dataclass
class PosteriorDraws:
    """Kept (post burn-in, thinned) draws plus acceptance bookkeeping.

    ``c`` is None for chains without an intercept (the parametric chain);
    ``extras`` optionally carries further per-draw state such as the kernel
    bandwidth or the ARMA coefficients.
    """

    d: np.ndarray
    c: np.ndarray | None
    acceptance: dict[str, float]
    seed: int
    iterations: int
    burn_in: int
    thin: int
    extras: dict[str, np.ndarray] | None = None

    def __post_init__(self):
        expected = (self.iterations - self.burn_in) // self.thin
        if len(self.d) != expected:
            raise InvalidInputError(
                f"draw count {len(self.d)} != (iterations - burn_in)//thin = {expected}"
            )
        if len(self.d) and not bool(np.all((self.d > -1.0) & (self.d < 0.5))):
            raise InvalidInputError("stored d draws must lie in (-1, 1/2)")


@dataclass(frozen=True)
class PosteriorSummary:
    """Point and interval summaries of a scalar posterior sample."""

    mean: float
    median: float
    map_estimate: float
    ci_low: float
    ci_high: float
    ess: float
    chain_count: int = 1


def autocovariance(x: np.ndarray) -> np.ndarray:
    """Biased-normalisation autocovariances via FFT, lags 0..n-1."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    centered = x - x.mean()
    size = int(2 ** math.ceil(math.log2(2 * n)))
    fx = np.fft.rfft(centered, size)
    acov = np.fft.irfft(fx * np.conj(fx), size)[:n].real
    return acov / n


def effective_sample_size(x: np.ndarray) -> float:
    """ESS from the initial monotone sequence estimator of the ACF sum.

    Pairwise autocorrelation sums Gamma_k = rho_{2k} + rho_{2k+1} are kept
    while positive and forced monotone non-increasing, truncating the noisy
    tail of the empirical autocorrelation.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 2:
        return float(n)
    acov = autocovariance(x)
    # Degenerate (constant up to rounding) chains count as fully independent.
    if acov[0] <= (1e-13 * (1.0 + abs(float(x.mean())))) ** 2:
        return float(n)
    rho = acov / acov[0]
    npairs = (n - 1) // 2
    tau = 0.0
    prev = np.inf
    for k in range(npairs):
        pair = rho[2 * k] + rho[2 * k + 1]
        if pair <= 0.0:
            break
        pair = min(pair, prev)
        tau += pair
        prev = pair
    tau = max(2.0 * tau - 1.0, 1.0)
    return float(n / tau)


def _kde_mode(x: np.ndarray) -> float:
    """Mode of a Gaussian KDE with Silverman bandwidth on a fine grid."""
    x = np.asarray(x, dtype=float)
    sd = x.std()
    iqr = np.subtract(*np.percentile(x, [75, 25]))
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    bw = 0.9 * spread * len(x) ** (-0.2)
    if bw <= 0.0:
        return float(x[0])
    grid = np.linspace(x.min() - bw, x.max() + bw, 512)
    dens = np.exp(-0.5 * ((grid[:, None] - x) / bw) ** 2).sum(axis=1)
    return float(grid[np.argmax(dens)])


def summarize(draws: PosteriorDraws, param: str = "d") -> PosteriorSummary:
    """Posterior mean/median/MAP, equal-tailed 95% interval and ESS.

    The MAP is the kernel-density mode of the draws; the interval endpoints
    are the empirical 2.5%/97.5% quantiles.
    """
    if param == "d":
        x = draws.d
    elif param == "c":
        if draws.c is None:
            raise InvalidInputError("these draws carry no intercept sample")
        x = draws.c
    else:
        if draws.extras is None or param not in draws.extras:
            raise InvalidInputError(f"no stored draws for parameter {param!r}")
        x = draws.extras[param]
    if len(x) < 100:
        raise InvalidInputError(f"need at least 100 draws to summarise, got {len(x)}")
    lo, med, hi = np.quantile(x, [0.025, 0.5, 0.975])
    return PosteriorSummary(
        mean=float(np.mean(x)),
        median=float(med),
        map_estimate=_kde_mode(x),
        ci_low=float(lo),
        ci_high=float(hi),
        ess=effective_sample_size(x),
        chain_count=1,
    )


class ScaleAdapter:
    """Robbins-Monro adaptation of per-block proposal scales during burn-in.

    Scalar blocks hold a float, vector blocks an array (one scale per
    coordinate).  ``update`` nudges log-scales toward the target acceptance
    with a decaying step and is a no-op once frozen.
    """

    def __init__(self, scales: dict, target: float = 0.44, rate: float = 0.6):
        self.scales = {k: (v.copy() if isinstance(v, np.ndarray) else float(v))
                       for k, v in scales.items()}
        self.target = target
        self.rate = rate
        self.frozen = False

    def freeze(self):
        self.frozen = True

    def update(self, block: str, accepted, iteration: int):
        if self.frozen:
            return
        step = min(0.5, iteration ** (-self.rate))
        cur = self.scales[block]
        move = step * (np.asarray(accepted, dtype=float) - self.target)
        if isinstance(cur, np.ndarray):
            np.multiply(cur, np.exp(move), out=cur)
            np.clip(cur, 1e-6, 1e6, out=cur)
        else:
            self.scales[block] = float(np.clip(cur * math.exp(float(move)), 1e-6, 1e6))
