"""Closed-form kernels for the unit ball."""

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import DomainError, ball_point, unit_direction

EXTERIOR_TOL = 1e-12


def surface_area(n):
    """``|S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)``."""
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def normalization_constant(n, s):
    """``Gamma(n/2) sin(pi s) / pi^{n/2 + 1}``, the mass normalizer of the Poisson kernel."""
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    if not 0.0 < s < 1.0:
        raise ValueError(f"fractional order must lie in (0, 1), got s = {s}")
    return math.gamma(n / 2) * math.sin(math.pi * s) / math.pi ** (n / 2 + 1)


@dataclass(frozen=True)
class KernelParams:
    n: int
    s: float
    c_ns: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "c_ns", normalization_constant(self.n, self.s))

    @property
    def area(self):
        return surface_area(self.n)


def _sq(v):
    return np.sum(v * v, axis=-1)


def poisson_kernel(x, y, params):
    """Fractional Poisson kernel ``P(x, y)`` for ``|x| < 1 < |y|``."""
    x = ball_point(x)
    y = np.asarray(y, dtype=float)
    y2 = _sq(y)
    if np.any(y2 <= 1.0 + EXTERIOR_TOL):
        raise DomainError("Poisson kernel needs |y| > 1 (undefined on the closed ball)")
    return _poisson(x, y, y2, params)


def _poisson(x, y, y2, params):
    d2 = _sq(x - y)
    ratio = (1.0 - _sq(x)) / (y2 - 1.0)
    return params.c_ns * ratio**params.s / d2 ** (params.n / 2)


def radial_kernel(x, rho, params):
    """Weight ``E(x, rho)`` of the sphere of radius ``rho`` in the chord-average formula."""
    x = ball_point(x)
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 1.0):
        raise DomainError("radial kernel needs rho > 1")
    return _radial(_sq(x), rho, rho - 1.0, params)


def _radial(x2, rho, offset, params):
    # offset = rho - 1, passed separately so nodes near rho = 1 keep full precision
    s = params.s
    return (
        params.c_ns
        * rho
        * (1.0 - x2) ** s
        / ((offset * (rho + 1.0)) ** s * (rho * rho - x2))
    )


def classical_poisson_kernel(x, w, n):
    """Harmonic Poisson kernel ``(1 - |x|^2) / (|S^{n-1}| |x - w|^n)``."""
    x = ball_point(x)
    w = unit_direction(w)
    return (1.0 - _sq(x)) / (surface_area(n) * _sq(x - w) ** (n / 2))
