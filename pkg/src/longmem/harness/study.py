"""Simulation-study runner: scenario grid, per-replicate seeding, the three
estimation methods, and coverage aggregation.

Replicates are isolated (own seed, own state) and may run concurrently; the
aggregation is a deterministic fold ordered by (scenario, replicate) index, so
results do not depend on completion order or worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .. import baselines, sampler
from ..arfima import ArfimaParams, simulate
from ..chains import ChainConfig
from ..errors import InvalidInputError, LongmemError
from ..spectral import TimeSeries, periodogram, pooled_log_periodogram
from .io import SCHEMA_VERSION, STUDY_CSV_HEADER, EstimateReport, _sig6

METHODS = ("semiparametric", "ls", "parametric")

# Long-memory grid and (phi, theta) pairs of the default study design.
_D_GRID = (0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.49)
_ARMA_PAIRS = ((0.0, 0.0), (0.8, 0.1), (0.5, 0.1), (0.1, 0.5), (0.1, 0.8))


@dataclass(frozen=True)
class Scenario:
    d: float
    phi: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not -1.0 < self.d < 0.5:
            raise InvalidInputError(f"scenario d must lie in (-1, 1/2), got {self.d}")
        if not (abs(self.phi) < 1.0 and abs(self.theta) < 1.0):
            raise InvalidInputError("scenario ARMA coefficients must lie in (-1, 1)")

    @property
    def params(self) -> ArfimaParams:
        return ArfimaParams(d=self.d, phi=self.phi, theta=self.theta, sigma2=1.0)


def default_scenarios() -> tuple[Scenario, ...]:
    """The full 50-cell design: 10 d values crossed with 5 (phi, theta) pairs."""
    return tuple(
        Scenario(d=d, phi=phi, theta=theta)
        for phi, theta in _ARMA_PAIRS
        for d in _D_GRID
    )


@dataclass(frozen=True)
class StudySpec:
    """What to run: scenarios x replicates x methods at series length n."""

    scenarios: tuple[Scenario, ...] = field(default_factory=default_scenarios)
    replicates: int = 50
    n: int = 10_000
    methods: tuple[str, ...] = METHODS
    base_seed: int = 20_240_401
    chain: ChainConfig = field(default_factory=ChainConfig)
    workers: int = 1

    def __post_init__(self):
        if self.replicates < 1:
            raise InvalidInputError("need at least one replicate")
        if self.n < 64:
            raise InvalidInputError("need n >= 64 for the study")
        if not self.scenarios:
            raise InvalidInputError("scenario list is empty")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise InvalidInputError(f"unknown methods {sorted(unknown)}; valid: {METHODS}")
        if self.workers < 1:
            raise InvalidInputError("need at least one worker")


def _splitmix64(z: int) -> int:
    """One splitmix64 mixing round (the standard 64-bit finalizer)."""
    z = (z + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def replicate_seed(base_seed: int, scenario_index: int, replicate_index: int) -> int:
    """Documented splitmix-style hash of (base seed, scenario, replicate)."""
    mixed = _splitmix64(base_seed & 0xFFFFFFFFFFFFFFFF)
    mixed = _splitmix64(mixed ^ _splitmix64(scenario_index + 1))
    mixed = _splitmix64(mixed ^ _splitmix64(replicate_index + 1))
    return mixed & 0x7FFFFFFFFFFFFFFF


# ---------------------------------------------------------------------------
# per-series estimation fronts


def estimate_ls(series: TimeSeries, ell: int = 1, K: int = 1, m: int | None = None) -> EstimateReport:
    """Least-squares log-periodogram estimate with the study's default band."""
    start = time.perf_counter()
    if m is None:
        m = baselines.default_bandwidth(series.n)
    sample = pooled_log_periodogram(periodogram(series), K=K, ell=ell, m=m)
    fit = baselines.fit_ls(sample)
    return EstimateReport(
        method="ls", d_point=fit.d_hat, d_low=fit.ci_low, d_high=fit.ci_high,
        n=series.n, m=fit.m, K=fit.K, ell=fit.ell, seed=None,
        runtime_seconds=time.perf_counter() - start,
        extra={"c_hat": fit.c_hat, "se": fit.se},
    )


def estimate_semiparametric(
    series: TimeSeries,
    chain: ChainConfig,
    ell: int = 0,
    K: int = 1,
    m: int | None = None,
) -> EstimateReport:
    """Posterior mean and 95% credible interval from the mixture-model chain.

    Uses the full log-periodogram band by default (K = 1, no trimming).
    """
    start = time.perf_counter()
    sample = pooled_log_periodogram(periodogram(series), K=K, ell=ell, m=m)
    draws = sampler.run_chain(sample, chain)
    summary = sampler.summarize(draws)
    return EstimateReport(
        method="semiparametric", d_point=summary.mean,
        d_low=summary.ci_low, d_high=summary.ci_high,
        n=series.n, m=sample.m, K=sample.K, ell=sample.ell, seed=chain.seed,
        runtime_seconds=time.perf_counter() - start,
        extra={
            "posterior_median": summary.median,
            "posterior_map": summary.map_estimate,
            "ess": summary.ess,
        },
    )


def estimate_parametric(
    series: TimeSeries,
    chain: ChainConfig,
    model: str = "0d0",
) -> EstimateReport:
    """Posterior mean and 95% credible interval from the Whittle chain."""
    start = time.perf_counter()
    draws = baselines.run_param_chain(series, model, chain)
    summary = sampler.summarize(draws)
    return EstimateReport(
        method="parametric", d_point=summary.mean,
        d_low=summary.ci_low, d_high=summary.ci_high,
        n=series.n, m=series.n // 2, K=1, ell=0, seed=chain.seed,
        runtime_seconds=time.perf_counter() - start,
        extra={"model": model, "posterior_median": summary.median, "ess": summary.ess},
    )


# ---------------------------------------------------------------------------
# study execution


@dataclass(frozen=True)
class ReplicateRecord:
    scenario_index: int
    replicate_index: int
    method: str
    seed: int
    d_true: float
    d_point: float
    d_low: float
    d_high: float
    runtime_seconds: float
    error: str | None = None

    @property
    def covers(self) -> bool:
        return self.d_low <= self.d_true <= self.d_high


@dataclass(frozen=True)
class ScenarioAggregate:
    scenario: Scenario
    method: str
    mean_estimate: float
    mean_ci_low: float
    mean_ci_high: float
    coverage: float
    n_replicates: int


@dataclass(frozen=True)
class StudyResult:
    spec: StudySpec
    records: tuple[ReplicateRecord, ...]
    aggregates: tuple[ScenarioAggregate, ...]
    runtime_seconds: float

    def payload(self) -> dict:
        rows = [
            {
                "scenario_d": agg.scenario.d,
                "phi": agg.scenario.phi,
                "theta": agg.scenario.theta,
                "method": agg.method,
                "mean_estimate": agg.mean_estimate,
                "ci_lo": agg.mean_ci_low,
                "ci_hi": agg.mean_ci_high,
                "coverage": agg.coverage,
                "n_replicates": agg.n_replicates,
            }
            for agg in self.aggregates
        ]
        return _sig6(
            {
                "schema_version": SCHEMA_VERSION,
                "n": self.spec.n,
                "replicates": self.spec.replicates,
                "base_seed": self.spec.base_seed,
                "methods": list(self.spec.methods),
                "rows": rows,
                "runtime_seconds": self.runtime_seconds,
            }
        )

    def csv_rows(self):
        header = STUDY_CSV_HEADER.split(",")
        rows = [
            [
                agg.scenario.d, agg.scenario.phi, agg.scenario.theta, agg.method,
                agg.mean_estimate, agg.mean_ci_low, agg.mean_ci_high,
                agg.coverage, agg.n_replicates,
            ]
            for agg in self.aggregates
        ]
        return header, rows

    def aggregate_for(self, scenario: Scenario, method: str) -> ScenarioAggregate:
        for agg in self.aggregates:
            if agg.scenario == scenario and agg.method == method:
                return agg
        raise KeyError(f"no aggregate for {scenario} / {method}")


def _run_replicate(args) -> list[ReplicateRecord]:
    """Simulate one series and apply every requested method to it."""
    spec, scen_idx, rep_idx = args
    scenario = spec.scenarios[scen_idx]
    seed = replicate_seed(spec.base_seed, scen_idx, rep_idx)
    series = simulate(scenario.params, spec.n, seed)
    chain = replace(spec.chain, seed=seed)
    has_arma = scenario.phi != 0.0 or scenario.theta != 0.0
    out = []
    for method in spec.methods:
        try:
            if method == "ls":
                report = estimate_ls(series)
            elif method == "semiparametric":
                report = estimate_semiparametric(series, chain)
            else:
                report = estimate_parametric(series, chain, model="1d1" if has_arma else "0d0")
            record = ReplicateRecord(
                scenario_index=scen_idx, replicate_index=rep_idx, method=method,
                seed=seed, d_true=scenario.d, d_point=report.d_point,
                d_low=report.d_low, d_high=report.d_high,
                runtime_seconds=report.runtime_seconds,
            )
        except LongmemError as exc:  # record, do not abort the study
            record = ReplicateRecord(
                scenario_index=scen_idx, replicate_index=rep_idx, method=method,
                seed=seed, d_true=scenario.d, d_point=float("nan"),
                d_low=float("nan"), d_high=float("nan"),
                runtime_seconds=0.0, error=str(exc),
            )
        out.append(record)
    return out


def run_study(spec: StudySpec) -> StudyResult:
    """Run every scenario x replicate x method and aggregate coverage.

    Per-replicate failures are recorded rather than fatal; the study itself
    fails only if more than 10% of replicate-method runs fail.
    """
    start = time.perf_counter()
    tasks = [
        (spec, scen_idx, rep_idx)
        for scen_idx in range(len(spec.scenarios))
        for rep_idx in range(spec.replicates)
    ]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            grouped = list(pool.map(_run_replicate, tasks, chunksize=1))
    else:
        grouped = [_run_replicate(task) for task in tasks]

    records = tuple(rec for group in grouped for rec in group)
    failures = sum(1 for rec in records if rec.error is not None)
    if records and failures > 0.1 * len(records):
        raise LongmemError(
            f"{failures} of {len(records)} replicate runs failed; study aborted"
        )

    aggregates = []
    for scen_idx, scenario in enumerate(spec.scenarios):
        for method in spec.methods:
            ok = [
                rec for rec in records
                if rec.scenario_index == scen_idx and rec.method == method and rec.error is None
            ]
            if not ok:
                continue
            aggregates.append(
                ScenarioAggregate(
                    scenario=scenario,
                    method=method,
                    mean_estimate=float(np.mean([r.d_point for r in ok])),
                    mean_ci_low=float(np.mean([r.d_low for r in ok])),
                    mean_ci_high=float(np.mean([r.d_high for r in ok])),
                    coverage=float(np.mean([r.covers for r in ok])),
                    n_replicates=len(ok),
                )
            )
    return StudyResult(
        spec=spec,
        records=records,
        aggregates=tuple(aggregates),
        runtime_seconds=time.perf_counter() - start,
    )
