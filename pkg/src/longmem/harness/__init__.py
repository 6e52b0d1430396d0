"""Dataset ingestion, study orchestration, report emission and the CLI."""

from .io import EstimateReport, emit_report, ingest_csv, transform
from .study import (
    Scenario,
    StudyResult,
    StudySpec,
    default_scenarios,
    estimate_ls,
    estimate_parametric,
    estimate_semiparametric,
    replicate_seed,
    run_study,
)

__all__ = [
    "EstimateReport",
    "Scenario",
    "StudyResult",
    "StudySpec",
    "default_scenarios",
    "emit_report",
    "estimate_ls",
    "estimate_parametric",
    "estimate_semiparametric",
    "ingest_csv",
    "replicate_seed",
    "run_study",
    "transform",
]
