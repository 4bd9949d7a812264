"""Quadrature on the unit sphere, on the half-line (1, inf), and on the exterior of the ball.

Exterior integrals are computed in polar form

    int_{|y|>1} g(y) dy = int_1^inf rho^{n-1} int_{S^{n-1}} g(rho e) dH_e drho,

with a Gauss-Jacobi head on [1, 1 + delta] absorbing the endpoint factor
``(rho - 1)^{-s}``, geometrically graded Gauss-Legendre panels up to
``r_cut`` and an algebraic tail mapped onto (0, 1).
"""

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .kernels import normalization_constant, surface_area


class HypothesisError(ValueError):
    """Data violate a hypothesis under which the representation formulas hold."""


@dataclass(frozen=True)
class QuadratureSpec:
    sphere_level: int = 5
    head_order: int = 24
    panel_order: int = 16
    panels_per_decade: int = 4
    delta: float = 0.5
    r_cut: float = 100.0
    mc_samples: int | None = None
    tail_order: int = 24
    tol: float = 1e-10
    max_escalations: int = 4
    x_cap: float = 0.95

    def __post_init__(self):
        if self.sphere_level <= 0:
            raise ValueError(f"sphere_level must be positive, got {self.sphere_level}")
        if not 0.0 < self.delta <= 1.0:
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
        if self.r_cut < 10.0 or self.r_cut <= 1.0 + self.delta:
            raise ValueError(f"r_cut must be >= 10 and exceed 1 + delta, got {self.r_cut}")
        for name in ("head_order", "panel_order", "tail_order"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be >= 2")
        if self.panels_per_decade < 1:
            raise ValueError("panels_per_decade must be >= 1")
        if self.mc_samples is not None and self.mc_samples < 2:
            raise ValueError("mc_samples must be >= 2 when set")
        if self.max_escalations < 0 or self.tol <= 0:
            raise ValueError("max_escalations must be >= 0 and tol > 0")
        if not 0.0 < self.x_cap < 1.0:
            raise ValueError(f"x_cap must lie in (0, 1), got {self.x_cap}")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown quadrature keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def coarse(self):
        """Spec with roughly halved radial orders, used for a-posteriori estimates."""
        half = lambda k: max(2, k // 2)  # noqa: E731
        return QuadratureSpec(
            **{
                **self.to_dict(),
                "head_order": half(self.head_order),
                "panel_order": half(self.panel_order),
                "tail_order": half(self.tail_order),
            }
        )


# ---------------------------------------------------------------------------
# sphere rules


@dataclass(frozen=True)
class SphereRule:
    n: int
    nodes: np.ndarray
    weights: np.ndarray
    level: int
    degree: int | None = None

    def __len__(self):
        return len(self.weights)

    def integrate(self, values):
        return float(np.sum(self.weights * values))

    def aligned(self, direction):
        """Copy of the rule rotated so its pole (last coordinate axis) points along ``direction``."""
        d = np.asarray(direction, dtype=float)
        norm = np.linalg.norm(d)
        if self.n == 2 or norm == 0.0:
            return self
        d = d / norm
        v = -d.copy()
        v[-1] += 1.0
        vv = v @ v
        if vv < 1e-30:
            return self
        nodes = self.nodes - np.outer(self.nodes @ v, 2.0 * v / vv)
        return SphereRule(self.n, nodes, self.weights, self.level, self.degree)


def _circle(count):
    theta = 2.0 * np.pi * np.arange(count) / count
    nodes = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    return nodes, np.full(count, 2.0 * np.pi / count)


def _product(n, level):
    if n == 2:
        return _circle(2 ** (level + 1))
    # polar coordinate t = cos(theta) carries the weight (1 - t^2)^{(n-3)/2}
    m = 2**level
    a = (n - 3) / 2.0
    t, wt = roots_jacobi(m, a, a)
    sub_nodes, sub_w = _product(n - 1, level)
    radius = np.sqrt(1.0 - t * t)
    ring = (radius[:, None, None] * sub_nodes[None, :, :]).reshape(-1, n - 1)
    nodes = np.concatenate([ring, np.repeat(t, len(sub_w))[:, None]], axis=1)
    weights = (wt[:, None] * sub_w[None, :]).reshape(-1)
    return nodes, weights


@lru_cache(maxsize=64)
def build_sphere_rule(n, level):
    """Product rule on ``S^{n-1}``.

    n = 2 uses ``8 * 2**level`` equispaced nodes.  For n >= 3 the polar
    variable ``cos(theta)`` gets a ``2**level``-point Gauss-Jacobi rule with
    the sin-power weight of the spherical surface element, recursively down
    to a ``2**(level+1)``-node circle.
    """
    if level <= 0:
        raise ValueError(f"sphere level must be positive, got {level}")
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    if n == 2:
        count = 8 * 2**level
        nodes, weights = _circle(count)
        degree = count - 1
    else:
        nodes, weights = _product(n, level)
        degree = min(2 * 2**level - 1, 2 ** (level + 1) - 1)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return SphereRule(n, nodes, weights, level, degree)


def circle_rule_with_breaks(angles, level):
    """Circle rule that is piecewise Gauss-Legendre between the given break angles.

    Integrands with jumps at known angles are then integrated with spectral
    accuracy on each smooth arc.
    """
    if not len(angles):
        return build_sphere_rule(2, level)
    a = np.unique(np.mod(np.asarray(angles, dtype=float), 2.0 * np.pi))
    ends = np.append(a[1:], a[0] + 2.0 * np.pi)
    total = 8 * 2**level
    nodes, weights = [], []
    for lo, hi in zip(a, ends):
        width = hi - lo
        if width < 1e-14:
            continue
        order = max(8, math.ceil(total * width / (2.0 * np.pi)))
        t, w = _legendre(order)
        theta = lo + 0.5 * width * (t + 1.0)
        nodes.append(np.stack([np.cos(theta), np.sin(theta)], axis=-1))
        weights.append(0.5 * width * w)
    return SphereRule(2, np.concatenate(nodes), np.concatenate(weights), level, None)


@lru_cache(maxsize=128)
def _legendre(order):
    t, w = roots_legendre(order)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


@lru_cache(maxsize=128)
def _jacobi_head(order, s):
    # weight (1 + t)^{-s} on [-1, 1]
    t, w = roots_jacobi(order, 0.0, -s)
    return t, w


# ---------------------------------------------------------------------------
# radial rules


@dataclass(frozen=True)
class RadialRule:
    """Nodes and weights for ``int_lo^hi h(rho) drho``.

    ``head_weights`` integrate against ``(rho - 1)^{-s}``; ``weights`` are the
    effective weights for a plain integrand carrying that singularity.
    ``offsets`` hold ``rho - 1`` computed without cancellation.
    """

    s: float
    delta: float
    r_cut: float
    head_offsets: np.ndarray
    head_weights: np.ndarray
    panel_offsets: np.ndarray
    panel_weights: np.ndarray
    tail_offsets: np.ndarray
    tail_weights: np.ndarray
    panel_edges: np.ndarray = field(repr=False)

    @property
    def head_nodes(self):
        return 1.0 + self.head_offsets

    @property
    def panel_nodes(self):
        return 1.0 + self.panel_offsets

    @property
    def offsets(self):
        return np.concatenate([self.head_offsets, self.panel_offsets, self.tail_offsets])

    @property
    def nodes(self):
        return 1.0 + self.offsets

    @property
    def weights(self):
        head = self.head_weights * self.head_offsets**self.s
        return np.concatenate([head, self.panel_weights, self.tail_weights])

    def __len__(self):
        return len(self.head_offsets) + len(self.panel_offsets) + len(self.tail_offsets)


def build_radial_rule(s, spec, *, decay=None, breaks=(), support=(1.0, math.inf)):
    """Radial rule on ``(support[0], support[1])`` within (1, inf).

    ``decay`` is the exponent ``a`` in the integrand's far-field behaviour
    ``rho^{-1-a}``; it defaults to ``2 s`` (bounded data) and is only used
    when the support is unbounded.
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"fractional order must lie in (0, 1), got s = {s}")
    lo, hi = float(support[0]), float(support[1])
    lo = max(lo, 1.0)
    if not hi > lo:
        raise ValueError(f"empty radial support ({lo}, {hi})")
    inner = sorted(b for b in breaks if lo < b < hi)

    empty = np.zeros(0)
    head_off, head_w = empty, empty
    if lo == 1.0:
        stop = min([1.0 + spec.delta, hi] + inner[:1])
        width = stop - 1.0
        t, w = _jacobi_head(spec.head_order, s)
        head_off = 0.5 * width * (1.0 + t)
        head_w = w * (0.5 * width) ** (1.0 - s)
        start = stop
    else:
        start = lo

    end = min(hi, spec.r_cut) if math.isinf(hi) else hi
    edges = {start, end}
    if end > start:
        decades = math.log10((end - 1.0) / (start - 1.0))
        count = max(1, math.ceil(spec.panels_per_decade * decades - 1e-9))
        geo = (start - 1.0) * ((end - 1.0) / (start - 1.0)) ** (np.arange(count + 1) / count)
        edges.update(1.0 + geo[1:-1])
    edges.update(b for b in inner if start < b < end)
    edges = np.array(sorted(edges))
    t, w = _legendre(spec.panel_order)
    off_lo = edges[:-1] - 1.0
    width = np.diff(edges)
    panel_off = (off_lo[:, None] + 0.5 * width[:, None] * (1.0 + t[None, :])).reshape(-1)
    panel_w = (0.5 * width[:, None] * w[None, :]).reshape(-1)

    tail_off, tail_w = empty, empty
    if math.isinf(hi):
        a = 2.0 * s if decay is None else float(decay)
        if a <= 0.0:
            raise HypothesisError(
                "datum not in L^1_s: growth exponent gamma >= 2s makes the radial tail diverge"
            )
        # rho = r_cut * u^{-1/a} maps (r_cut, inf) onto u in (0, 1)
        t, w = _legendre(spec.tail_order)
        u = 0.5 * (t + 1.0)
        rho = end * u ** (-1.0 / a)
        tail_off = rho - 1.0
        tail_w = 0.5 * w * (end / a) * u ** (-1.0 / a - 1.0)

    return RadialRule(
        s=s,
        delta=(start - 1.0) if len(head_off) else 0.0,
        r_cut=end,
        head_offsets=head_off,
        head_weights=head_w,
        panel_offsets=panel_off,
        panel_weights=panel_w,
        tail_offsets=tail_off,
        tail_weights=tail_w,
        panel_edges=edges,
    )


# ---------------------------------------------------------------------------
# tail bound


@dataclass(frozen=True)
class TailBound:
    value: float


def check_growth(growth, s, support_radius=None):
    """Raise HypothesisError unless a datum with ``|f(y)| <= M |y|^gamma`` lies in L^1_s."""
    M, gamma = growth
    if support_radius is not None and math.isfinite(support_radius):
        return
    if M > 0 and gamma >= 2.0 * s:
        raise HypothesisError(
            f"datum not in L^1_s: growth gamma = {gamma:g} >= 2s = {2.0 * s:g}"
        )


def tail_bound(growth, x, s, r_cut, n):
    """Upper bound on the chord-average integrand beyond ``r_cut``.

    Uses ``|L| <= 2 M rho^gamma / sqrt(1 - |x|^2)`` together with
    ``E(x, rho) <= c (1 - |x|^2)^s C rho^{-1-2s}`` for ``rho >= r_cut``, where
    ``C = (1 - r_cut^-2)^{-s} (1 - |x|^2 r_cut^-2)^{-1}``.
    """
    M, gamma = growth
    if gamma >= 2.0 * s:
        raise HypothesisError(
            f"datum not in L^1_s: growth gamma = {gamma:g} >= 2s = {2.0 * s:g}; tail diverges"
        )
    if r_cut < 2.0:
        raise ValueError("tail bound needs r_cut >= 2")
    if M == 0:
        return TailBound(0.0)
    x2 = float(np.sum(np.asarray(x, dtype=float) ** 2))
    c_dec = (1.0 - r_cut**-2) ** (-s) / (1.0 - x2 / r_cut**2)
    value = (
        surface_area(n)
        * normalization_constant(n, s)
        * (1.0 - x2) ** (s - 0.5)
        * 2.0
        * M
        * c_dec
        * r_cut ** (gamma - 2.0 * s)
        / (2.0 * s - gamma)
    )
    return TailBound(value)


# ---------------------------------------------------------------------------
# tensor integration


@dataclass(frozen=True)
class EvalResult:
    value: float
    error_estimate: float
    method: str
    nodes_used: int
    s: float
    x: tuple | None = None
    sphere_level: int | None = None
    tail_bound: float = 0.0
    mc_value: float | None = None
    mc_stderr: float | None = None

    def to_dict(self):
        return asdict(self)


_CHUNK = 1 << 18


def _tensor_sum(integrand, rule, sphere_at):
    rho_off = rule.offsets
    rho = 1.0 + rho_off
    w_rho = rule.weights
    per_node = callable(sphere_at)
    inner = np.empty(len(rho))
    inner_abs = np.empty(len(rho))
    count = 0
    if per_node:
        for j in range(len(rho)):
            sphere = sphere_at(rho[j])
            vals = integrand(rho[j : j + 1], rho_off[j : j + 1], sphere.nodes)[0]
            inner[j] = np.sum(sphere.weights * vals)
            inner_abs[j] = np.sum(sphere.weights * np.abs(vals))
            count += len(sphere)
    else:
        sphere = sphere_at
        step = max(1, _CHUNK // len(sphere))
        for j in range(0, len(rho), step):
            vals = integrand(rho[j : j + step], rho_off[j : j + step], sphere.nodes)
            inner[j : j + step] = vals @ sphere.weights
            inner_abs[j : j + step] = np.abs(vals) @ sphere.weights
        count = len(rho) * len(sphere)
    value = math.fsum(w_rho * inner)
    scale = math.fsum(np.abs(w_rho) * inner_abs)
    return value, scale, count


def tensor_integrate(
    integrand,
    n,
    s,
    spec,
    *,
    method,
    decay=None,
    support=(1.0, math.inf),
    radial_breaks=(),
    angular_breaks=None,
    align=None,
):
    """Integrate ``int drho int_{S^{n-1}} integrand(rho, rho - 1, e) dH_e`` with estimates.

    ``integrand(rho, offset, e)`` receives radial nodes of shape (R,) and
    sphere nodes of shape (K, n) and returns an (R, K) array.
    ``angular_breaks(rho)``, for n = 2 only, lists the angles at which the
    angular integrand jumps on that circle.  The sphere level is doubled
    (at most ``spec.max_escalations`` times) while consecutive levels differ
    by more than ``spec.tol`` relative to ``max(1, |value|)``.
    """
    fine = build_radial_rule(s, spec, decay=decay, breaks=radial_breaks, support=support)
    coarse = build_radial_rule(
        s, spec.coarse(), decay=decay, breaks=radial_breaks, support=support
    )

    def sphere_at(level):
        if angular_breaks is not None:
            if n != 2:
                raise ValueError("break-aware sphere rules exist only for n = 2")
            return lambda rho: circle_rule_with_breaks(angular_breaks(rho), level)
        rule = build_sphere_rule(n, level)
        return rule.aligned(align) if align is not None else rule

    level = spec.sphere_level
    prev, _, _ = _tensor_sum(integrand, fine, sphere_at(max(1, level - 1)))
    value, scale, count = _tensor_sum(integrand, fine, sphere_at(level))
    escalations = 0
    while abs(value - prev) > spec.tol * max(1.0, abs(value)) and escalations < spec.max_escalations:
        level += 1
        escalations += 1
        prev = value
        value, scale, count = _tensor_sum(integrand, fine, sphere_at(level))
    angular_err = abs(value - prev)
    radial_val, _, _ = _tensor_sum(integrand, coarse, sphere_at(level))
    radial_err = abs(value - radial_val)
    err = angular_err + radial_err + 1e-14 * scale
    return EvalResult(
        value=value,
        error_estimate=err,
        method=method,
        nodes_used=count,
        s=s,
        sphere_level=level,
    )


def integrate_exterior(
    g,
    spec,
    params,
    *,
    growth=(0.0, 0.0),
    support=(1.0, math.inf),
    radial_breaks=(),
    angular_breaks=None,
    align=None,
    method="direct",
    seed=0,
):
    """``int_{|y| > 1} g(y) dy`` for a kernel-weighted integrand ``g``.

    ``g`` maps points of shape (..., n) to values of shape (...).  ``growth``
    ``(M, gamma)`` describes the datum multiplying the kernel and fixes the
    tail decay ``rho^{-1-(2s-gamma)}``.  ``angular_breaks`` is a fixed list
    of jump angles (n = 2).
    """
    n, s = params.n, params.s
    check_growth(growth, s, support[1])

    def integrand(rho, offset, e):
        y = rho[:, None, None] * e[None, :, :]
        return rho[:, None] ** (n - 1) * g(y)

    breaks = None
    if angular_breaks is not None and len(angular_breaks):
        fixed = tuple(angular_breaks)
        breaks = lambda rho: fixed  # noqa: E731
    result = tensor_integrate(
        integrand,
        n,
        s,
        spec,
        method=method,
        decay=2.0 * s - growth[1],
        support=support,
        radial_breaks=radial_breaks,
        angular_breaks=breaks,
        align=align,
    )
    if spec.mc_samples:
        mc, se = monte_carlo_exterior(g, n, s, spec.mc_samples, seed=seed, support=support)
        result = replace(result, mc_value=mc, mc_stderr=se)
    return result


MC_U_FLOOR = 1e-11


def monte_carlo_exterior(g, n, s, samples, seed=0, support=(1.0, math.inf)):
    """Importance-sampled estimate of ``int_{|y|>1} g(y) dy`` and its standard error.

    Radii follow the density proportional to ``1 / (rho (rho^2 - 1)^s)``:
    with ``u ~ Beta(1 - s, s)`` one has ``rho^2 - 1 = u / (1 - u)``.
    Directions are uniform on the sphere.  Draws that round to ``u = 0`` or
    ``u = 1`` (radius on the sphere or at infinity) are redrawn.
    """
    rng = np.random.default_rng(seed)
    u = rng.beta(1.0 - s, s, size=samples)
    bad = (u < MC_U_FLOOR) | (u > 1.0 - MC_U_FLOOR)
    while np.any(bad):
        u[bad] = rng.beta(1.0 - s, s, size=int(bad.sum()))
        bad = (u < MC_U_FLOOR) | (u > 1.0 - MC_U_FLOOR)
    t = u / (1.0 - u)
    rho = np.sqrt(1.0 + t)
    d = rng.standard_normal((samples, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    y = rho[:, None] * d
    density = (2.0 * math.sin(math.pi * s) / math.pi) / (rho * t**s)
    vals = np.zeros(samples)
    inside = rho < support[1]
    vals[inside] = g(y[inside]) * rho[inside] ** (n - 1) * surface_area(n) / density[inside]
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(samples))
    return mean, stderr
