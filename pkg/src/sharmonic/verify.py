"""Numerical checks of the closed-form identities and of the sharp Harnack bounds."""

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import roots_legendre

from .datum import ExteriorDatum, datum_constant, random_bump
from .geometry import _chord, _jacobian, ball_point
from .kernels import KernelParams, _poisson, _radial, surface_area
from .quadrature import (
    HypothesisError,
    QuadratureSpec,
    build_radial_rule,
    build_sphere_rule,
)
from .solvers import solve

DEFAULT_RADII = (0.0, 0.3, 0.6, 0.9)
AVERAGE_RADII = (0.0, 0.5, 0.9)
AVERAGE_RHOS = (1.1, 2.0, 10.0)


@dataclass(frozen=True)
class IdentityReport:
    name: str
    max_abs_error: float
    tolerance: float
    grid: list = field(default_factory=list)

    @property
    def passed(self):
        return bool(self.max_abs_error <= self.tolerance)

    def to_dict(self):
        return {
            "name": self.name,
            "grid": self.grid,
            "max_abs_error": self.max_abs_error,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class HarnackReport:
    r: float
    lower_constant: float
    upper_constant: float
    samples: list
    violations: int
    extremal_ratio: float | None = None

    def to_dict(self):
        return asdict(self)


def harnack_constants(r, n, s):
    """``((1 - r^2)^s / (1 + r)^n, (1 - r^2)^s / (1 - r)^n)``."""
    if not 0.0 < r < 1.0:
        raise ValueError(f"r must lie in (0, 1), got {r}")
    q = (1.0 - r * r) ** s
    return q / (1.0 + r) ** n, q / (1.0 - r) ** n


def classical_harnack_constants(r, n):
    return (1.0 - r) / (1.0 + r) ** (n - 1), (1.0 + r) / (1.0 - r) ** (n - 1)


def grid_points(n, radii=DEFAULT_RADII):
    """Points ``t d`` with a fixed generic unit direction ``d``."""
    d = np.arange(1.0, n + 1.0) * (-1.0) ** np.arange(n)
    d /= np.linalg.norm(d)
    return [t * d for t in radii]


def _sphere_mean(fn, n, spec, align=None):
    """Sphere average of ``fn(nodes)`` with level escalation; returns (value, level)."""

    def at(level):
        rule = build_sphere_rule(n, level)
        if align is not None:
            rule = rule.aligned(align)
        return float(np.sum(rule.weights * fn(rule.nodes))) / surface_area(n)

    level = spec.sphere_level
    prev, value = at(level - 1) if level > 1 else math.nan, at(level)
    for _ in range(spec.max_escalations):
        if abs(value - prev) <= spec.tol * max(1.0, abs(value)):
            break
        level += 1
        prev, value = value, at(level)
    return value, level


def _tag(x):
    return [float(v) for v in np.asarray(x)]


def check_poisson_normalization(params, spec=QuadratureSpec(), x_grid=None, tolerance=1e-8):
    """``int_{|y|>1} P(x, y) dy = 1`` over a grid of points."""
    x_grid = grid_points(params.n) if x_grid is None else x_grid
    one = datum_constant(1.0)
    errors, grid = [], []
    for x in x_grid:
        res = solve(one, x, params, spec, "direct")
        errors.append(abs(res.value - 1.0))
        grid.append({"x": _tag(x), "s": params.s, "n": params.n, "error": errors[-1]})
    return IdentityReport("poisson_normalization", max(errors), tolerance, grid)


def check_E_normalization(params, spec=QuadratureSpec(), x_grid=None, tolerance=1e-8):
    """``int_1^inf E(x, rho) drho = 1 / |S^{n-1}|`` and its independence of x."""
    x_grid = grid_points(params.n) if x_grid is None else x_grid
    rule = build_radial_rule(params.s, spec)
    target = 1.0 / surface_area(params.n)
    values, grid = [], []
    for x in x_grid:
        x = ball_point(x)
        v = math.fsum(rule.weights * _radial(float(x @ x), rule.nodes, rule.offsets, params))
        values.append(v)
        grid.append({"x": _tag(x), "s": params.s, "n": params.n, "error": abs(v - target)})
    spread = max(values) - min(values)
    err = max(max(abs(v - target) for v in values), spread)
    return IdentityReport("E_normalization", err, tolerance, grid)


def average_grid(n, radii=AVERAGE_RADII, rhos=AVERAGE_RHOS):
    return [(x, rho) for x in grid_points(n, radii) for rho in rhos]


def check_kernel_average(params, spec=QuadratureSpec(), grid=None, tolerance=1e-8):
    """``E(x, rho) = rho^{n-1}`` times the average of ``P(x, .)`` over the sphere of radius rho (relative error)."""
    n = params.n
    grid = average_grid(n) if grid is None else grid
    errors, out = [], []
    for x, rho in grid:
        x = ball_point(x)

        def fn(w):
            y = rho * w
            return _poisson(x, y, np.full(len(w), rho * rho), params)

        mean, level = _sphere_mean(fn, n, spec, align=x if n > 2 else None)
        lhs = float(_radial(float(x @ x), np.array(rho), np.array(rho - 1.0), params))
        rel = abs(lhs - rho ** (n - 1) * mean) / lhs
        errors.append(rel)
        out.append({"x": _tag(x), "rho": rho, "n": n, "s": params.s, "level": level, "error": rel})
    return IdentityReport("kernel_average", max(errors), tolerance, out)


def check_sphere_average(n, grid=None, spec=QuadratureSpec(), tolerance=1e-8):
    """Average of ``|x - rho w|^{-n}`` over the unit sphere equals ``rho^{2-n} / (rho^2 - |x|^2)``."""
    grid = average_grid(n) if grid is None else grid
    errors, out = [], []
    for x, rho in grid:
        x = ball_point(x)
        fn = lambda w: np.sum((x - rho * w) ** 2, axis=-1) ** (-n / 2)  # noqa: E731
        mean, level = _sphere_mean(fn, n, spec, align=x if n > 2 else None)
        exact = rho ** (2 - n) / (rho * rho - float(x @ x))
        rel = abs(mean - exact) / exact
        errors.append(rel)
        out.append({"x": _tag(x), "rho": rho, "n": n, "level": level, "error": rel})
    return IdentityReport("sphere_average", max(errors), tolerance, out)


def default_test_functions(n):
    a = np.linspace(0.3, -0.5, n)
    return [
        ("w1^2", lambda w: w[..., 0] ** 2),
        ("exp(a.w)", lambda w: np.exp(w @ a)),
        ("cos(2 w1 + w2) w2", lambda w: np.cos(2.0 * w[..., 0] + w[..., 1]) * w[..., 1]),
    ]


def default_cov_points(n):
    base = [(0.0, 0.0), (0.3, 0.4), (-0.5, 0.2), (0.1, -0.6), (0.55, 0.3)]
    extra = [0.0, 0.2, -0.3, 0.4, 0.1]
    pts = []
    for (a, b), c in zip(base, extra):
        p = np.zeros(n)
        p[0], p[1] = a, b
        if n > 2:
            p[2] = c
        pts.append(p)
    return pts


def check_change_of_variables(x_points=None, test_functions=None, n=2, spec=QuadratureSpec(), tolerance=1e-6):
    """Both-sign surface change of variables under ``e -> Q_+-(e)`` with its Jacobian."""
    x_points = default_cov_points(n) if x_points is None else x_points
    test_functions = default_test_functions(n) if test_functions is None else test_functions
    errors, out = [], []
    for x in x_points:
        x = ball_point(x)
        align = x if n > 2 and np.any(x) else None
        for name, g in test_functions:
            direct, _ = _sphere_mean(g, n, spec)
            for sign in (1, -1):

                def mapped(e, sign=sign):
                    chord = _chord(x, e)
                    q = chord.q_plus if sign > 0 else chord.q_minus
                    return g(q) * _jacobian(x, e, sign)

                val, level = _sphere_mean(mapped, n, spec, align=align)
                err = abs(val - direct) * surface_area(n)
                errors.append(err)
                out.append({"x": _tag(x), "g": name, "sign": sign, "level": level, "error": err})
    return IdentityReport("change_of_variables", max(errors), tolerance, out)


def _uniform_in_ball(rng, n, r, count):
    d = rng.standard_normal((count, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return r * rng.uniform(size=(count, 1)) ** (1.0 / n) * d


def check_harnack(f, r, sample_count, params, spec=QuadratureSpec(), seed=0, method="direct"):
    """Two-sided Harnack bounds at random points of ``B_r`` for a nonnegative datum."""
    if not f.nonnegative:
        raise HypothesisError(f"Harnack bounds need a nonnegative datum; {f.label} is not")
    lower, upper = harnack_constants(r, params.n, params.s)
    center = solve(f, np.zeros(params.n), params, spec, method)
    rng = np.random.default_rng(seed)
    samples, violations = [], 0
    for x in _uniform_in_ball(rng, params.n, r, sample_count):
        res = solve(f, x, params, spec, method)
        slack = res.error_estimate + center.error_estimate
        if not lower * center.value - slack <= res.value <= upper * center.value + slack:
            violations += 1
        samples.append((_tag(x), res.value / center.value if center.value else math.nan))
    return HarnackReport(r, lower, upper, samples, violations)


def check_harnack_random(count, r, params, spec=QuadratureSpec(), seed=0, points_per_datum=4):
    """Harnack check over ``count`` seeded random bumps; returns the total violation count and reports."""
    rng = np.random.default_rng(seed)
    reports = []
    for k in range(count):
        f = random_bump(rng, params.n)
        reports.append(check_harnack(f, r, points_per_datum, params, spec, seed=seed + k + 1))
    return sum(rep.violations for rep in reports), reports


# ---------------------------------------------------------------------------
# extremal family


def small_ball_integral(center, radius, x, n, order=24, level=3):
    """``int_{B_radius(center)} |y - x|^{-n} dy`` by a product rule in polar coordinates about the centre."""
    t, w = roots_legendre(order)
    r = 0.5 * radius * (t + 1.0)
    wr = 0.5 * radius * w * r ** (n - 1)
    sphere = build_sphere_rule(n, level)
    y = np.asarray(center)[None, None, :] + r[:, None, None] * sphere.nodes[None, :, :]
    vals = np.sum((y - np.asarray(x)) ** 2, axis=-1) ** (-n / 2)
    return math.fsum(wr * (vals @ sphere.weights))


def extremal_solution(eps, e, x, params, order=24, level=3):
    """s-harmonic extension at ``x`` of the extremal datum, integrated on its supporting ball only."""
    e = np.asarray(e, dtype=float)
    x = np.asarray(x, dtype=float)
    center = (1.0 + eps) * e / np.linalg.norm(e)
    integral = small_ball_integral(center, eps, x, params.n, order, level)
    return params.c_ns * (1.0 - float(x @ x)) ** params.s * integral


@dataclass(frozen=True)
class ExtremalRow:
    eps: float
    lower_ratio: float
    lower_target: float
    upper_ratio: float
    upper_target: float

    @property
    def deviation(self):
        return max(
            abs(self.lower_ratio / self.lower_target - 1.0),
            abs(self.upper_ratio / self.upper_target - 1.0),
        )


def check_harnack_extremal(eps_sequence, r, e, params):
    """Ratios ``u(0)/u(-r e)`` and ``u(r e)/u(0)`` for shrinking extremal data against the sharp constants."""
    lower, upper = harnack_constants(r, params.n, params.s)
    e = np.asarray(e, dtype=float)
    e = e / np.linalg.norm(e)
    rows = []
    for eps in eps_sequence:
        u0 = extremal_solution(eps, e, np.zeros(params.n), params)
        u_minus = extremal_solution(eps, e, -r * e, params)
        u_plus = extremal_solution(eps, e, r * e, params)
        rows.append(ExtremalRow(eps, u0 / u_minus, 1.0 / lower, u_plus / u0, upper))
    return rows


# ---------------------------------------------------------------------------
# suite


def check_harnack_limit(n, count=20, tolerance=1e-14):
    """At s = 1 the fractional constants coincide with the classical Harnack constants."""
    errs, grid = [], []
    for r in np.linspace(0.025, 0.975, count):
        q = 1.0 - r * r
        frac = (q / (1.0 + r) ** n, q / (1.0 - r) ** n)
        cls = classical_harnack_constants(r, n)
        err = max(abs(a - b) / b for a, b in zip(frac, cls))
        errs.append(err)
        grid.append({"r": float(r), "n": n, "error": err})
    return IdentityReport("harnack_classical_limit", max(errs), tolerance, grid)


def run_all(n_values=(2, 3), s_values=(0.25, 0.5, 0.75), spec=QuadratureSpec(), extremal_eps=1e-3):
    reports = []
    for n in n_values:
        for rep in (
            check_sphere_average(n, spec=spec),
            check_change_of_variables(n=n, spec=spec),
            check_harnack_limit(n),
        ):
            reports.append(_suffix(rep, n))
        for s in s_values:
            params = KernelParams(n, s)
            for rep in (
                check_poisson_normalization(params, spec),
                check_E_normalization(params, spec),
                check_kernel_average(params, spec),
            ):
                reports.append(_suffix(rep, n, s))
            e = np.zeros(n)
            e[0] = 1.0
            row = check_harnack_extremal([extremal_eps], 0.5, e, params)[0]
            reports.append(
                IdentityReport(
                    f"harnack_extremal[n={n},s={s}]",
                    row.deviation,
                    1e-2,
                    [asdict(row) | {"r": 0.5}],
                )
            )
    return reports


def _suffix(report, n, s=None):
    tag = f"n={n}" if s is None else f"n={n},s={s}"
    return IdentityReport(f"{report.name}[{tag}]", report.max_abs_error, report.tolerance, report.grid)
