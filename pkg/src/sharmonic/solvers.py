"""Evaluation of the s-harmonic extension of exterior data into the unit ball.

Four routes compute the same function:

* ``direct``: the volume integral of the fractional Poisson kernel against f;
* ``malmheden``: the radial weight E(x, rho) against the sphere average of
  chord interpolations of f(rho .) through x / rho;
* ``schwarz`` (n = 2): the same weight against f(rho .) composed with the
  reflection through x / rho;
* ``superposition``: E(x, rho) against classical harmonic extensions of
  f(rho .) evaluated at x / rho.

Angular integrals agree exactly for every rho, so the routes differ only by
sphere-rule error; radial errors are common to all of them.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .datum import ExteriorDatum
from .geometry import DomainError, _chord, _reflect, ball_point
from .kernels import KernelParams, _radial, surface_area
from .quadrature import (
    EvalResult,
    HypothesisError,
    QuadratureSpec,
    build_sphere_rule,
    circle_rule_with_breaks,
    check_growth,
    integrate_exterior,
    tail_bound,
    tensor_integrate,
)

METHODS = ("direct", "malmheden", "schwarz", "superposition")


def _prepare(f, x, params, spec):
    f.check_dimension(params.n)
    x = ball_point(x, cap=spec.x_cap)
    if x.shape != (params.n,):
        raise DomainError(f"point has dimension {x.shape[-1]}, kernel has n = {params.n}")
    check_growth(f.growth, params.s, f.support_radius)
    return x


def _tail(f, x, params, spec):
    lo, hi = f.support
    if math.isfinite(hi) and hi <= spec.r_cut:
        return 0.0
    if f.growth[0] == 0:
        return 0.0
    return tail_bound(f.growth, x, params.s, spec.r_cut, params.n).value


def _decay(f, s):
    return 2.0 * s - (f.homogeneous_degree if f.homogeneous_degree is not None else f.growth[1])


def _angle(v):
    return np.arctan2(v[..., 1], v[..., 0])


def _jump_points(f):
    return np.stack([np.cos(f.angular_breaks), np.sin(f.angular_breaks)], axis=-1)


def _chord_breaks(f, x):
    """Directions e at which a chord endpoint through x / rho crosses a jump of f."""
    if not f.angular_breaks:
        return None
    p = _jump_points(f)

    def breaks(rho):
        d = p - x / rho
        a = _angle(d)
        return np.concatenate([a, a + math.pi])

    return breaks


def _reflection_breaks(f, x):
    if not f.angular_breaks:
        return None
    p = _jump_points(f)
    return lambda rho: _angle(_reflect(x / rho, p))


def _run(integrand, f, x, params, spec, method, breaks=None, decay=None):
    result = tensor_integrate(
        integrand,
        params.n,
        params.s,
        spec,
        method=method,
        decay=_decay(f, params.s) if decay is None else decay,
        support=f.support,
        radial_breaks=f.radial_breaks,
        angular_breaks=breaks,
        align=x if params.n > 2 else None,
    )
    return replace(result, x=tuple(float(v) for v in x), tail_bound=_tail(f, x, params, spec))


def _is_center(x):
    return not np.any(np.asarray(x, dtype=float))


def mean_value_at_center(f, params, spec=QuadratureSpec()):
    """``u(0) = c(n,s) int f(y) / (|y|^n (|y|^2 - 1)^s) dy``."""
    f.check_dimension(params.n)
    n, s = params.n, params.s
    check_growth(f.growth, s, f.support_radius)

    def g(y):
        y2 = np.sum(y * y, axis=-1)
        return params.c_ns * f(y) / (y2 ** (n / 2) * (y2 - 1.0) ** s)

    result = integrate_exterior(
        g,
        spec,
        params,
        growth=(f.growth[0], f.growth[1] if f.support_radius is None else 0.0),
        support=f.support,
        radial_breaks=f.radial_breaks,
        angular_breaks=f.angular_breaks,
        method="mean_value",
    )
    x = np.zeros(n)
    return replace(result, x=tuple(x), tail_bound=_tail(f, x, params, spec))


def solve_direct(f, x, params, spec=QuadratureSpec()):
    """Poisson-kernel convolution ``int_{|y|>1} P(x, y) f(y) dy``."""
    x = _prepare(f, x, params, spec)
    if _is_center(x):
        return mean_value_at_center(f, params, spec)
    n, s = params.n, params.s
    scale = params.c_ns * (1.0 - x @ x) ** s

    def g(y):
        y2 = np.sum(y * y, axis=-1)
        d2 = np.sum((y - x) ** 2, axis=-1)
        return scale * f(y) / ((y2 - 1.0) ** s * d2 ** (n / 2))

    result = integrate_exterior(
        g,
        spec,
        params,
        growth=(f.growth[0], f.growth[1] if f.support_radius is None else 0.0),
        support=f.support,
        radial_breaks=f.radial_breaks,
        angular_breaks=f.angular_breaks,
        align=x if n > 2 else None,
        method="direct",
    )
    return replace(result, x=tuple(float(v) for v in x), tail_bound=_tail(f, x, params, spec))


def _chord_integrand(x, params, values):
    """Integrand E(x, rho) * (interpolated chord values) on the (rho, e) grid.

    ``values(rho, q)`` returns the datum at the chord endpoints ``q`` (unit
    vectors) for the sphere of radius ``rho``.
    """
    x2 = float(x @ x)

    def integrand(rho, offset, e):
        z = (x[None, :] / rho[:, None])[:, None, :]
        chord = _chord(z, e[None, :, :])
        w_minus, w_plus = chord.weights
        r = rho[:, None]
        interp = w_minus * values(r, chord.q_minus) + w_plus * values(r, chord.q_plus)
        return _radial(x2, rho, offset, params)[:, None] * interp

    return integrand


def solve_malmheden(f, x, params, spec=QuadratureSpec()):
    """Chord-average representation: E(x, rho) against interpolations of f(rho .) along chords through x / rho."""
    x = _prepare(f, x, params, spec)
    if _is_center(x):
        return mean_value_at_center(f, params, spec)
    integrand = _chord_integrand(x, params, lambda r, q: f(r[..., None] * q))
    return _run(integrand, f, x, params, spec, "malmheden", _chord_breaks(f, x))


def solve_malmheden_homogeneous(f, x, params, spec=QuadratureSpec()):
    """Chord-average representation for a positively homogeneous datum.

    The interpolation uses ``f`` on the unit sphere and the factor
    ``rho^gamma`` carries the scaling.
    """
    if f.homogeneous_degree is None:
        raise ValueError(f"{f.label} carries no homogeneity degree")
    x = _prepare(f, x, params, spec)
    if _is_center(x):
        return mean_value_at_center(f, params, spec)
    gamma = f.homogeneous_degree
    chord = _chord_integrand(x, params, lambda r, q: f.on_unit_sphere(q))

    def integrand(rho, offset, e):
        return rho[:, None] ** gamma * chord(rho, offset, e)

    return _run(integrand, f, x, params, spec, "malmheden_homog", _chord_breaks(f, x))


def solve_schwarz(f, x, params, spec=QuadratureSpec()):
    """Reflection representation (n = 2): E(x, rho) against f(rho Q^{x/rho}(e))."""
    if params.n != 2:
        raise ValueError(f"the reflection representation needs n = 2, got n = {params.n}")
    x = _prepare(f, x, params, spec)
    if _is_center(x):
        return mean_value_at_center(f, params, spec)
    x2 = float(x @ x)

    def integrand(rho, offset, e):
        z = (x[None, :] / rho[:, None])[:, None, :]
        q = _reflect(z, e[None, :, :])
        return _radial(x2, rho, offset, params)[:, None] * f(rho[:, None, None] * q)

    return _run(integrand, f, x, params, spec, "schwarz", _reflection_breaks(f, x))


# ---------------------------------------------------------------------------
# classical harmonic extension


def _classical_chord_average(g_values, x, nodes, weights, n):
    chord = _chord(x, nodes)
    w_minus, w_plus = chord.weights
    vals = w_minus * g_values(chord.q_minus) + w_plus * g_values(chord.q_plus)
    return float(np.sum(weights * vals)) / surface_area(n)


def solve_classical(g, x, n, sphere=None):
    """Harmonic extension of boundary values ``g`` at ``x`` as the average of chord interpolations."""
    x = ball_point(x)
    if x.shape != (n,):
        raise DomainError(f"point has dimension {x.shape[-1]}, expected {n}")
    sphere = build_sphere_rule(n, 6) if sphere is None else sphere
    if n > 2:
        sphere = sphere.aligned(x)
    return _classical_chord_average(g, x, sphere.nodes, sphere.weights, n)


def classical_poisson_integral(g, x, n, sphere=None):
    """Harmonic extension of ``g`` at ``x`` via the classical Poisson kernel; the cross-check of ``solve_classical``."""
    x = ball_point(x)
    sphere = build_sphere_rule(n, 6) if sphere is None else sphere
    if n > 2:
        sphere = sphere.aligned(x)
    w = sphere.nodes
    kern = (1.0 - x @ x) / np.sum((x - w) ** 2, axis=-1) ** (n / 2)
    return float(np.sum(sphere.weights * kern * g(w))) / surface_area(n)


def classical_extension(f, x, spec=QuadratureSpec()):
    """Classical harmonic extension of the trace of ``f``.

    Traces with known jump angles (n = 2) go through the Poisson integral on
    a circle rule split at the jumps; everything else uses chord averaging.
    """
    x = ball_point(x, cap=spec.x_cap)
    n = x.shape[-1]
    level = spec.sphere_level + 1
    if n == 2 and f.angular_breaks:
        return classical_poisson_integral(f.trace, x, 2, circle_rule_with_breaks(f.angular_breaks, level + 1))
    return solve_classical(f.trace, x, n, build_sphere_rule(n, level))


def solve_superposition(f, x, params, spec=QuadratureSpec()):
    """Weighted superposition ``|S^{n-1}| int_1^inf E(x, rho) u_rho(x / rho) drho``.

    ``u_rho`` is the classical harmonic extension of ``f(rho .)``, computed
    by chord averaging on one shared sphere rule.  The same extension is
    recomputed through the classical Poisson kernel and the discrepancy is
    added to the error estimate.
    """
    x = _prepare(f, x, params, spec)
    if _is_center(x):
        return mean_value_at_center(f, params, spec)
    n = params.n
    area = surface_area(n)
    x2 = float(x @ x)

    def harmonic(rho, offset, e):
        # area * (chord interpolant) integrates on the sphere to area * u_rho(x / rho)
        z = (x[None, :] / rho[:, None])[:, None, :]
        chord = _chord(z, e[None, :, :])
        w_minus, w_plus = chord.weights
        r = rho[:, None, None]
        u = w_minus * f(r * chord.q_minus) + w_plus * f(r * chord.q_plus)
        return _radial(x2, rho, offset, params)[:, None] * u

    def poisson(rho, offset, e):
        z = (x[None, :] / rho[:, None])[:, None, :]
        d2 = np.sum((z - e[None, :, :]) ** 2, axis=-1)
        kern = (1.0 - np.sum(z * z, axis=-1)) / d2 ** (n / 2)
        return _radial(x2, rho, offset, params)[:, None] * kern * f(rho[:, None, None] * e)

    result = _run(harmonic, f, x, params, spec, "superposition", _chord_breaks(f, x))
    check_spec = replace(spec, sphere_level=result.sphere_level, max_escalations=0)
    breaks = None
    if f.angular_breaks:
        fixed = tuple(f.angular_breaks)
        breaks = lambda rho: fixed  # noqa: E731
    cross = _run(poisson, f, x, params, check_spec, "superposition", breaks)
    gap = abs(result.value - cross.value)
    return replace(result, error_estimate=result.error_estimate + gap)


SOLVERS = {
    "direct": solve_direct,
    "malmheden": solve_malmheden,
    "malmheden_homog": solve_malmheden_homogeneous,
    "schwarz": solve_schwarz,
    "superposition": solve_superposition,
}


def applicable_methods(n):
    return [m for m in METHODS if m != "schwarz" or n == 2]


def solve(f, x, params, spec=QuadratureSpec(), method="malmheden"):
    try:
        solver = SOLVERS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(SOLVERS)}") from None
    return solver(f, x, params, spec)


# ---------------------------------------------------------------------------
# s -> 1


@dataclass(frozen=True)
class SweepRow:
    s: float
    value: float
    classical_value: float
    gap: float
    error_estimate: float


def s_limit_sweep(f, x, s_grid, spec=QuadratureSpec(), allow_discontinuous=False):
    """Fractional values at ``x`` along ``s_grid`` against the classical extension of the trace of f."""
    if not f.continuous and not allow_discontinuous:
        raise HypothesisError(
            f"{f.label} is discontinuous; convergence as s -> 1 needs continuous data near the ball"
        )
    x = ball_point(x, cap=spec.x_cap)
    n = x.shape[-1]
    grid = sorted(float(s) for s in s_grid)
    classical = classical_extension(f, x, spec)
    rows = []
    for s in grid:
        res = solve_malmheden(f, x, KernelParams(n, s), spec)
        rows.append(SweepRow(s, res.value, classical, abs(res.value - classical), res.error_estimate))
    return rows


__all__ = [
    "EvalResult",
    "ExteriorDatum",
    "METHODS",
    "SOLVERS",
    "SweepRow",
    "applicable_methods",
    "classical_extension",
    "classical_poisson_integral",
    "mean_value_at_center",
    "s_limit_sweep",
    "solve",
    "solve_classical",
    "solve_direct",
    "solve_malmheden",
    "solve_malmheden_homogeneous",
    "solve_schwarz",
    "solve_superposition",
]
