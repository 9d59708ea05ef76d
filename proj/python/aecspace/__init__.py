"""Python access to the aecspace core.

Structures travel as their serialized text and configs as YAML text, so the
module needs no wrapper classes.
"""

from pathlib import Path

from ._aecspace import (
    ConfigError,
    Error,
    ball,
    canonical,
    cauchy_limit,
    config_hash,
    encode_atomic,
    evaluate,
    export_theory,
    members,
    metric,
    parse_formula,
    run,
    validate_aec,
)


def load_config(path):
    """YAML text of a config file."""
    return Path(path).read_text()


__all__ = [
    "ConfigError",
    "Error",
    "ball",
    "canonical",
    "cauchy_limit",
    "config_hash",
    "encode_atomic",
    "evaluate",
    "export_theory",
    "load_config",
    "members",
    "metric",
    "parse_formula",
    "run",
    "validate_aec",
]
