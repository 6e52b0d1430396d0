"""INI-style configuration files for the CLI.

Two sections mirror the runtime dataclasses:

    [chain]
    iterations = 20000
    burn_in = 10000
    thin = 5
    seed = 0
    h_components = 30
    kernel = double-exponential

    [study]
    n = 10000
    replicates = 50
    methods = semiparametric, ls, parametric
    base_seed = 20240401
    workers = 1
    scenarios = 0.25,0.0,0.0; 0.25,0.1,0.5

``scenarios`` holds semicolon-separated d,phi,theta triples; omit the key to
run the full 50-cell default grid.  Every default is printable with
``--print-config``.
"""

from __future__ import annotations

import configparser
from pathlib import Path

from ..chains import ChainConfig
from ..errors import InvalidInputError
from .study import Scenario, StudySpec

_CHAIN_INTS = ("iterations", "burn_in", "thin", "seed", "h_components")


def default_config_text() -> str:
    chain = ChainConfig()
    spec = StudySpec()
    lines = [
        "[chain]",
        f"iterations = {chain.iterations}",
        f"burn_in = {chain.burn_in}",
        f"thin = {chain.thin}",
        f"seed = {chain.seed}",
        f"h_components = {chain.h_components}",
        f"kernel = {chain.kernel_kind}",
        "",
        "[study]",
        f"n = {spec.n}",
        f"replicates = {spec.replicates}",
        f"methods = {', '.join(spec.methods)}",
        f"base_seed = {spec.base_seed}",
        f"workers = {spec.workers}",
        "; scenarios = d,phi,theta; d,phi,theta; ...  (default: full 50-cell grid)",
        "",
    ]
    return "\n".join(lines)


def _parser_for(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    text = Path(path).read_text(encoding="utf-8")
    parser.read_string(text)
    return parser


def load_chain_config(path=None, **overrides) -> ChainConfig:
    """ChainConfig from a config file's [chain] section plus overrides."""
    values: dict = {}
    if path is not None:
        parser = _parser_for(path)
        if parser.has_section("chain"):
            section = parser["chain"]
            for key in _CHAIN_INTS:
                if key in section:
                    values[key] = section.getint(key)
            if "kernel" in section:
                values["kernel_kind"] = section.get("kernel").strip()
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ChainConfig(**values)


def _parse_scenarios(raw: str) -> tuple[Scenario, ...]:
    scenarios = []
    for chunk in raw.replace("\n", ";").split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 3:
            raise InvalidInputError(
                f"scenario {chunk!r} must be a d,phi,theta triple"
            )
        d, phi, theta = (float(p) for p in parts)
        scenarios.append(Scenario(d=d, phi=phi, theta=theta))
    if not scenarios:
        raise InvalidInputError("scenario list is empty")
    return tuple(scenarios)


def load_study_spec(path=None, chain: ChainConfig | None = None, **overrides) -> StudySpec:
    """StudySpec from a config file's [study] section plus overrides."""
    values: dict = {}
    if path is not None:
        parser = _parser_for(path)
        if parser.has_section("study"):
            section = parser["study"]
            for key in ("n", "replicates", "base_seed", "workers"):
                if key in section:
                    values[key] = section.getint(key)
            if "methods" in section:
                values["methods"] = tuple(
                    m.strip() for m in section.get("methods").split(",") if m.strip()
                )
            if "scenarios" in section:
                values["scenarios"] = _parse_scenarios(section.get("scenarios"))
    if chain is None:
        chain = load_chain_config(path)
    values["chain"] = chain
    values.update({k: v for k, v in overrides.items() if v is not None})
    return StudySpec(**values)
