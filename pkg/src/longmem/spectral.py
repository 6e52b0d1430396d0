"""Frequency-domain transforms backing the log-periodogram estimators.

Everything here is a pure function of its inputs: harmonic (Fourier)
frequencies, the periodogram, pooled log-periodogram responses, and the
regression design with the ``-log(4 sin^2(lambda/2))`` regressor.

The periodogram is evaluated only at the harmonic frequencies, which makes it
invariant to additive constants; no mean removal is performed (see the CLI
help).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateInputError,
    DomainError,
    InvalidBandwidthError,
    InvalidInputError,
)

TWO_PI = 2.0 * np.pi

# Domain checks for lambda <= pi tolerate one ulp of accumulated float error.
_PI_TOL = np.pi * (1.0 + 1e-12)


@dataclass(frozen=True)
class TimeSeries:
    """Equally spaced real-valued observations.

    Requires at least 4 finite values; the raw sequence is coerced to a 1-d
    float array on construction.
    """

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise InvalidInputError("time series must be one-dimensional")
        if vals.size < 4:
            raise InvalidInputError(
                f"time series must have length >= 4, got {vals.size}"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("time series contains non-finite values")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.size


def as_timeseries(obj) -> TimeSeries:
    """Coerce an array-like (or pass through a TimeSeries) with validation."""
    if isinstance(obj, TimeSeries):
        return obj
    return TimeSeries(np.asarray(obj, dtype=float))


@dataclass(frozen=True)
class Periodogram:
    """Periodogram ordinates I(lambda_j) at the harmonic frequencies.

    ``frequencies[j-1] == 2*pi*j/n`` for j = 1..floor(n/2) and ``n`` is the
    length of the originating series.
    """

    frequencies: np.ndarray
    ordinates: np.ndarray
    n: int

    def __post_init__(self):
        if len(self.frequencies) != len(self.ordinates):
            raise InvalidInputError("frequency/ordinate length mismatch")
        if len(self.frequencies) != self.n // 2:
            raise InvalidInputError("periodogram must cover j = 1..floor(n/2)")


@dataclass(frozen=True)
class RegressionSample:
    """Pooled log-periodogram responses with their regression design.

    ``responses[i] = log sum_{k=1}^{K} I(lambda_{j_i+k-K})`` on the index grid
    j = ell+K, ell+2K, ..., <= m, and ``regressors`` hold the covariate at the
    grid frequencies (sin form by default).  ``n`` is the originating series
    length, kept so downstream code knows the frequency band [2*pi/n, pi].
    """

    responses: np.ndarray
    regressors: np.ndarray
    frequencies: np.ndarray
    K: int
    ell: int
    m: int
    n: int

    def __post_init__(self):
        if not (len(self.responses) == len(self.regressors) == len(self.frequencies)):
            raise InvalidInputError("regression sample arrays must align")
        if not np.all(np.isfinite(self.responses)):
            raise InvalidInputError("regression responses must be finite")

    def __len__(self) -> int:
        return len(self.responses)

    @property
    def lambda_min(self) -> float:
        return TWO_PI / self.n

    @property
    def lambda_max(self) -> float:
        return float(np.pi)


def fourier_frequencies(n: int) -> np.ndarray:
    """Harmonic frequencies 2*pi*j/n for j = 1..floor(n/2)."""
    if n < 4:
        raise InvalidInputError(f"need n >= 4 for a usable frequency grid, got {n}")
    j = np.arange(1, n // 2 + 1, dtype=float)
    return TWO_PI * j / n


def periodogram(series) -> Periodogram:
    """Periodogram at the harmonic frequencies.

    Computed with an FFT; equals the direct trigonometric double sum
    (1/(2*pi*n)) * [(sum x_t cos(lambda_j t))^2 + (sum x_t sin(lambda_j t))^2]
    to within 1e-10 relative error.
    """
    series = as_timeseries(series)
    n = series.n
    # |FFT|^2 is shift-invariant, so the t = 1..n convention of the double sum
    # and numpy's t = 0..n-1 convention give identical ordinates.
    bins = np.fft.rfft(series.values)[1 : n // 2 + 1]
    ordinates = (bins.real**2 + bins.imag**2) / (TWO_PI * n)
    return Periodogram(fourier_frequencies(n), ordinates, n)


def regressor(lam, kind: str = "sin"):
    """Regression covariate at frequency lambda in (0, pi].

    ``kind="sin"`` gives -log(4 sin^2(lambda/2)); ``kind="log"`` gives the
    small-frequency equivalent -2 log(lambda).  Both are strictly decreasing
    on (0, pi].
    """
    arr = np.asarray(lam, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr > _PI_TOL):
        raise DomainError("frequency must lie in (0, pi]")
    if kind == "sin":
        out = -np.log(4.0 * np.sin(arr / 2.0) ** 2)
    elif kind == "log":
        out = -2.0 * np.log(arr)
    else:
        raise InvalidInputError(f"unknown regressor kind {kind!r}")
    return float(out) if np.isscalar(lam) else out


def pooled_log_periodogram(
    pg: Periodogram,
    K: int = 1,
    ell: int = 0,
    m: int | None = None,
    regressor_kind: str = "sin",
) -> RegressionSample:
    """Pooled log-periodogram responses on the grid j = ell+K, ell+2K, ..., m.

    Each response is the log of the sum of the K ordinates at indices
    j-K+1..j; with K=1, ell=0, m=floor(n/2) this is the plain log-periodogram.

    Raises
    ------
    InvalidBandwidthError
        If the grid is empty or ell + K <= m <= floor(n/2) fails.
    DegenerateInputError
        If any pooled sum is zero (exactly periodic or constant input).
    """
    half = len(pg.ordinates)
    if m is None:
        m = half
    if K < 1 or ell < 0:
        raise InvalidInputError("need pooling K >= 1 and trim ell >= 0")
    if not (ell + K <= m <= half):
        raise InvalidBandwidthError(
            f"need ell+K <= m <= floor(n/2); got ell={ell}, K={K}, m={m}, "
            f"floor(n/2)={half}"
        )
    grid = np.arange(ell + K, m + 1, K)
    if grid.size == 0:
        raise InvalidBandwidthError("pooling grid is empty")
    # Per-window summation (not a cumsum difference) so that K = 1 reproduces
    # the plain log-periodogram bit for bit.
    window = grid[:, None] - K + np.arange(K)[None, :]
    sums = pg.ordinates[window].sum(axis=1)
    if np.any(sums <= 0.0):
        raise DegenerateInputError(
            "pooled periodogram sum is zero; series is degenerate for "
            "log-periodogram regression"
        )
    freqs = pg.frequencies[grid - 1]
    return RegressionSample(
        responses=np.log(sums),
        regressors=regressor(freqs, kind=regressor_kind),
        frequencies=freqs,
        K=K,
        ell=ell,
        m=int(m),
        n=pg.n,
    )
