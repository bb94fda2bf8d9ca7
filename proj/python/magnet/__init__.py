"""Multiplicative attribute graph toolkit."""

from ._magnet import (
    Config,
    MagnetError,
    connected_components,
    effective_diameter,
    expected_edges,
    generate,
    load_config,
    parse_config,
    simplified,
    theoretical_degree_pmf,
    theory_report,
)

__all__ = [
    "Config",
    "MagnetError",
    "connected_components",
    "effective_diameter",
    "expected_edges",
    "generate",
    "load_config",
    "parse_config",
    "simplified",
    "theoretical_degree_pmf",
    "theory_report",
]
