"""Batch experiment layer: configs, seed lineage, tables, manifests, fan-out.

Everything a command-line run needs around the numerical kernels: flat
``key=value`` config files with strict field validation, per-task seeds
mixed from one master seed, CSV tables whose floats round-trip exactly,
JSON manifests with a checked schema, and an order-preserving task pool
so outputs do not depend on the degree of parallelism.
"""

from .config import ConfigError, ExperimentConfig, config_hash, parse_config
from .io import (
    MANIFEST_SCHEMA,
    SchemaError,
    build_manifest,
    format_value,
    read_csv,
    validate_manifest,
    write_csv,
    write_manifest,
)
from .pool import THREADS_ENV_VAR, resolve_threads, run_indexed
from .seeds import splitmix64, task_rng, task_seed

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "config_hash",
    "parse_config",
    "MANIFEST_SCHEMA",
    "SchemaError",
    "build_manifest",
    "format_value",
    "read_csv",
    "validate_manifest",
    "write_csv",
    "write_manifest",
    "THREADS_ENV_VAR",
    "resolve_threads",
    "run_indexed",
    "splitmix64",
    "task_rng",
    "task_seed",
]
