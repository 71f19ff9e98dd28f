"""Closed-form Berkovich spectra of constant-coefficient differential modules."""
from ultraspec.valcore import (
    INF,
    Exponent,
    FieldSpec,
    PuiseuxScalar,
    QuadScalar,
    factorial_valuation,
    omega,
    parse_exponent,
    parse_scalar,
    valuation,
)

__all__ = [
    "INF",
    "Exponent",
    "FieldSpec",
    "PuiseuxScalar",
    "QuadScalar",
    "factorial_valuation",
    "omega",
    "parse_exponent",
    "parse_scalar",
    "valuation",
]

__version__ = "0.1.0"
