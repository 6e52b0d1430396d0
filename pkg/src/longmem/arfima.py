"""ARFIMA(0,d,0) and ARFIMA(1,d,1) simulation and exact spectral densities.

The model is (1 - phi*B) (1-B)^d X_t = (1 + theta*B) eps_t with Gaussian
innovations.  Simulation builds fractional noise from the MA(inf) expansion of
(1-B)^(-d) truncated at 2n coefficients, pushes it through the ARMA(1,1)
recursion, and discards a fixed 1,000-point burn-in.  The truncation error is
O(k^(d-1)) and only affects frequencies below the observable band.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve, lfilter

from .errors import DomainError, InvalidInputError
from .spectral import TWO_PI, TimeSeries, _PI_TOL

BURN_IN = 1000


@dataclass(frozen=True)
class ArfimaParams:
    """Parameters of a stationary, invertible ARFIMA(1,d,1).

    ``d`` in (-1, 1/2), |phi| < 1, |theta| < 1, innovation variance
    sigma2 > 0.  phi = theta = 0 gives ARFIMA(0,d,0).
    """

    d: float
    phi: float = 0.0
    theta: float = 0.0
    sigma2: float = 1.0

    def __post_init__(self):
        if not -1.0 < self.d < 0.5:
            raise DomainError(f"long-memory parameter d must lie in (-1, 1/2), got {self.d}")
        if not abs(self.phi) < 1.0:
            raise InvalidInputError(f"|phi| < 1 required for stationarity, got {self.phi}")
        if not abs(self.theta) < 1.0:
            raise InvalidInputError(f"|theta| < 1 required for invertibility, got {self.theta}")
        if not self.sigma2 > 0.0:
            raise InvalidInputError(f"innovation variance must be positive, got {self.sigma2}")


def fracdiff_ma_coefficients(d: float, count: int) -> np.ndarray:
    """First ``count`` MA(inf) coefficients of (1-B)^(-d).

    psi_0 = 1 and psi_k = psi_{k-1} * (k-1+d)/k.  For d > 0 the coefficients
    are positive and decreasing from k = 1 on.
    """
    if not -1.0 < d < 0.5:
        raise DomainError(f"long-memory parameter d must lie in (-1, 1/2), got {d}")
    if count < 1:
        raise InvalidInputError(f"need count >= 1, got {count}")
    psi = np.empty(count)
    psi[0] = 1.0
    if count > 1:
        k = np.arange(1.0, count)
        psi[1:] = np.cumprod((k - 1.0 + d) / k)
    return psi


def simulate(params: ArfimaParams, n: int, seed: int) -> TimeSeries:
    """Simulate n points of the ARFIMA process, deterministic for a seed.

    Innovations are i.i.d. N(0, sigma2).  The first ``BURN_IN`` points of the
    internal trajectory are discarded so the output sits in the stationary
    regime.
    """
    if n < 4:
        raise InvalidInputError(f"need n >= 4, got {n}")
    rng = np.random.default_rng(seed)
    total = n + BURN_IN
    eps = np.sqrt(params.sigma2) * rng.standard_normal(total)
    if params.d != 0.0:
        psi = fracdiff_ma_coefficients(params.d, 2 * n)
        z = fftconvolve(eps, psi)[:total]
    else:
        z = eps
    if params.phi != 0.0 or params.theta != 0.0:
        x = lfilter([1.0, params.theta], [1.0, -params.phi], z)
    else:
        x = z
    return TimeSeries(x[BURN_IN:])


def spectral_density(params: ArfimaParams, lam):
    """Exact spectral density at frequency lambda in (0, pi].

    f(lambda) = sigma2/(2 pi) * |1 + theta e^{-i lam}|^2 / |1 - phi e^{-i lam}|^2
                * (2 sin(lam/2))^{-2d},
    using |1 - e^{-i lam}| = 2 sin(lam/2).  The origin is a pole for d > 0.
    """
    arr = np.asarray(lam, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr > _PI_TOL):
        raise DomainError("frequency must lie in (0, pi]")
    cos_lam = np.cos(arr)
    ma_mod2 = 1.0 + 2.0 * params.theta * cos_lam + params.theta**2
    ar_mod2 = 1.0 - 2.0 * params.phi * cos_lam + params.phi**2
    frac = (2.0 * np.sin(arr / 2.0)) ** (-2.0 * params.d)
    out = params.sigma2 / TWO_PI * ma_mod2 / ar_mod2 * frac
    return float(out) if np.isscalar(lam) else out
