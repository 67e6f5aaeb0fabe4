"""Numerics laboratory for quasi-metric measure spaces."""

from _qmms import (
    Space,
    ValidationError,
    chain_metric,
    covering_profile,
    doubling_constant,
    doubling_sup,
    frechet_certify,
    generate,
    generator_names,
    greedy_separated,
    h_value,
    integrability,
    interpolation_check,
    l0_distance,
    minimal_norm,
    oracle_sobolev,
    separated_bump_witness,
    snowflake,
    tail_bump_witness,
)

__all__ = [
    "Space",
    "ValidationError",
    "chain_metric",
    "covering_profile",
    "doubling_constant",
    "doubling_sup",
    "frechet_certify",
    "generate",
    "generator_names",
    "greedy_separated",
    "h_value",
    "integrability",
    "interpolation_check",
    "l0_distance",
    "minimal_norm",
    "oracle_sobolev",
    "separated_bump_witness",
    "snowflake",
    "tail_bump_witness",
]
