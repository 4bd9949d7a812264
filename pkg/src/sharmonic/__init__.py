"""Fractional harmonic functions in the unit ball with exterior data.

Solves ``(-Delta)^s u = 0`` in ``B_1``, ``u = f`` outside, through the
Poisson-kernel integral and the chord (Malmheden-type) representation.
"""

from .datum import ExteriorDatum, parse_datum
from .kernels import KernelParams
from .quadrature import EvalResult, HypothesisError, QuadratureSpec
from .solvers import METHODS, solve

__all__ = [
    "EvalResult",
    "ExteriorDatum",
    "HypothesisError",
    "KernelParams",
    "METHODS",
    "QuadratureSpec",
    "parse_datum",
    "solve",
]
