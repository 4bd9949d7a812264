"""Exterior data ``f`` on the complement of the unit ball, with growth metadata.

Every datum evaluates vectorised: ``f(y)`` maps an array of shape (..., n)
to shape (...).  Values on ``|y| <= 1`` are never requested by the solvers.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

TWO_PI = 2.0 * math.pi
TRACE_OFFSET = 1e-12
ARC_ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class ExteriorDatum:
    evaluate: Callable
    growth: tuple  # (M, gamma) with |f(y)| <= M |y|^gamma
    homogeneous_degree: float | None = None
    continuous: bool = True
    support_radius: float | None = None
    inner_radius: float = 1.0
    radial_breaks: tuple = ()
    # n = 2 only: angles on every circle |y| = rho at which f jumps
    angular_breaks: tuple | None = None
    # restriction to S^{n-1} of a homogeneous datum
    angular: Callable | None = None
    nonnegative: bool = False
    dimension: int | None = None
    label: str = "datum"
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, y):
        return self.evaluate(np.asarray(y, dtype=float))

    @property
    def support(self):
        outer = math.inf if self.support_radius is None else self.support_radius
        return (self.inner_radius, outer)

    def on_unit_sphere(self, w):
        """Values of a homogeneous datum at unit vectors ``w``."""
        if self.homogeneous_degree is None:
            raise ValueError(f"{self.label} is not positively homogeneous")
        if self.angular is not None:
            return self.angular(np.asarray(w, dtype=float))
        lam = 2.0
        return self(lam * np.asarray(w, dtype=float)) / lam**self.homogeneous_degree

    def trace(self, w):
        """Boundary values on the unit sphere, taken as the limit from outside."""
        if self.angular is not None and self.homogeneous_degree is not None:
            return self.angular(np.asarray(w, dtype=float))
        return self((1.0 + TRACE_OFFSET) * np.asarray(w, dtype=float))

    def check_dimension(self, n):
        if self.dimension is not None and self.dimension != n:
            raise ValueError(f"{self.label} is defined only for n = {self.dimension}, got n = {n}")


def _norm(y):
    return np.sqrt(np.sum(y * y, axis=-1))


def direction(spec, n):
    """Unit vector from an angle in the (y1, y2) plane or from explicit components."""
    if np.ndim(spec) == 0:
        v = np.zeros(n)
        v[0], v[1] = math.cos(spec), math.sin(spec)
        return v
    v = np.asarray(spec, dtype=float)
    if v.shape != (n,):
        raise ValueError(f"direction needs {n} components, got {v.shape}")
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ValueError("direction must be nonzero")
    return v / norm


def datum_constant(c):
    c = float(c)
    return ExteriorDatum(
        evaluate=lambda y: np.full(np.shape(y)[:-1], c),
        growth=(abs(c), 0.0),
        homogeneous_degree=0.0,
        angular=lambda w: np.full(np.shape(w)[:-1], c),
        nonnegative=c >= 0,
        label=f"const:{c!r}",
    )


def datum_arc(theta0, theta1):
    """Indicator of the cone over the closed arc [theta0, theta1] (n = 2)."""
    theta0, theta1 = float(theta0), float(theta1)
    width = theta1 - theta0
    if not 0.0 <= width <= TWO_PI:
        raise ValueError(f"arc needs 0 <= theta1 - theta0 <= 2 pi, got {width}")

    def on_circle(w):
        if width >= TWO_PI:
            return np.ones(np.shape(w)[:-1])
        phase = np.mod(np.arctan2(w[..., 1], w[..., 0]) - theta0, TWO_PI)
        # closed at both ends, up to angle round-off
        phase = np.where(phase > TWO_PI - ARC_ANGLE_TOL, 0.0, phase)
        return (phase <= width + ARC_ANGLE_TOL).astype(float)

    breaks = () if width in (0.0, TWO_PI) else (theta0, theta1)
    return ExteriorDatum(
        evaluate=on_circle,
        growth=(1.0, 0.0),
        homogeneous_degree=0.0,
        continuous=width in (0.0, TWO_PI),
        angular_breaks=breaks,
        angular=on_circle,
        nonnegative=True,
        dimension=2,
        label=f"arc:{theta0!r}:{theta1!r}",
        meta={"arc_length": width},
    )


def datum_harnack_extremal(eps, e, s):
    """``(|y|^2 - 1)^s`` on the ball of radius ``eps`` centred at ``(1 + eps) e``, else 0."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    e = np.asarray(e, dtype=float)
    e = e / np.linalg.norm(e)
    center = (1.0 + eps) * e

    def f(y):
        y2 = np.sum(y * y, axis=-1)
        inside = _norm(y - center) < eps
        return np.where(inside, np.abs(y2 - 1.0) ** s, 0.0)

    outer = 1.0 + 2.0 * eps
    return ExteriorDatum(
        evaluate=f,
        growth=((outer**2 - 1.0) ** s, 0.0),
        continuous=False,
        support_radius=outer,
        nonnegative=True,
        label=f"extremal:{eps!r}",
        meta={"eps": eps, "direction": tuple(e), "center": tuple(center), "s": s},
    )


def _bump_profile(t):
    # C-infinity, supported in (-1, 1), value 1 at t = 0
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - ti * ti))
    return out


BUMP_SHARPNESS = 2.0
BUMP_PANELS = 4


def datum_bump(center_dir, inner, outer, amplitude, sharpness=BUMP_SHARPNESS):
    """Smooth bump supported in the shell ``inner < |y| < outer``.

    Radially a standard C-infinity bump; angularly the analytic factor
    ``exp(sharpness (y.d/|y| - 1))`` peaking along ``center_dir``.
    """
    if not 1.0 < inner < outer:
        raise ValueError(f"bump needs 1 < inner < outer, got {inner}, {outer}")
    d = np.asarray(center_dir, dtype=float)
    d = d / np.linalg.norm(d)
    mid, half = 0.5 * (inner + outer), 0.5 * (outer - inner)
    amplitude = float(amplitude)

    def f(y):
        r = _norm(y)
        cos = np.sum(y * d, axis=-1) / r
        return amplitude * _bump_profile((r - mid) / half) * np.exp(sharpness * (cos - 1.0))

    return ExteriorDatum(
        evaluate=f,
        growth=(abs(amplitude), 0.0),
        support_radius=float(outer),
        inner_radius=float(inner),
        radial_breaks=tuple(np.linspace(inner, outer, BUMP_PANELS + 1)),
        nonnegative=amplitude >= 0,
        label=f"bump:{','.join(repr(float(v)) for v in d)}:{inner!r}:{outer!r}:{amplitude!r}",
    )


def cosk(k):
    """Angular profile ``T_k(w_1)``; for n = 2 this is ``cos(k theta)``."""
    k = int(k)

    def profile(w):
        return np.cos(k * np.arccos(np.clip(w[..., 0], -1.0, 1.0)))

    return profile


def datum_homogeneous(gamma, angular, nonnegative=False, label=None):
    """``|y|^gamma * angular(y / |y|)``."""
    gamma = float(gamma)
    if gamma < 0:
        raise ValueError(f"homogeneity degree must be >= 0, got {gamma}")

    def f(y):
        r = _norm(y)
        return r**gamma * angular(y / r[..., None])

    return ExteriorDatum(
        evaluate=f,
        growth=(1.0, gamma),
        homogeneous_degree=gamma,
        angular=angular,
        nonnegative=nonnegative,
        label=label or f"homog:{gamma!r}",
    )


def linear_combination(coeffs, data):
    """Datum ``sum_i coeffs[i] * data[i]`` with merged metadata."""
    coeffs = [float(c) for c in coeffs]
    data = list(data)
    if len(coeffs) != len(data) or not data:
        raise ValueError("need one coefficient per datum")

    def f(y):
        return sum(c * d(y) for c, d in zip(coeffs, data))

    gamma = max(d.growth[1] for d in data)
    M = sum(abs(c) * d.growth[0] for c, d in zip(coeffs, data))
    supports = [d.support_radius for d in data]
    degrees = {d.homogeneous_degree for d in data}
    homog = degrees.pop() if len(degrees) == 1 else None
    angular = None
    if homog is not None and all(d.angular is not None for d in data):
        angular = lambda w: sum(c * d.angular(w) for c, d in zip(coeffs, data))  # noqa: E731
    ang_breaks = [d.angular_breaks for d in data if d.angular_breaks]
    dims = {d.dimension for d in data if d.dimension is not None}
    return ExteriorDatum(
        evaluate=f,
        growth=(M, gamma),
        homogeneous_degree=homog,
        continuous=all(d.continuous for d in data),
        support_radius=None if None in supports else max(supports),
        inner_radius=min(d.inner_radius for d in data),
        radial_breaks=tuple(sorted({b for d in data for b in d.radial_breaks})),
        angular_breaks=tuple(sorted({b for bs in ang_breaks for b in bs})) if ang_breaks else None,
        angular=angular,
        nonnegative=all(c >= 0 and d.nonnegative for c, d in zip(coeffs, data)),
        dimension=dims.pop() if len(dims) == 1 else None,
        label="+".join(f"{c!r}*{d.label}" for c, d in zip(coeffs, data)),
    )


def random_bump(rng, n, inner=(1.05, 2.0), width=(0.3, 2.0), amplitude=(0.1, 2.0)):
    """Nonnegative bump with random direction, shell and amplitude."""
    d = rng.standard_normal(n)
    lo = rng.uniform(*inner)
    return datum_bump(d / np.linalg.norm(d), lo, lo + rng.uniform(*width), rng.uniform(*amplitude))


# ---------------------------------------------------------------------------
# DSL

DSL_FORMS = (
    "const:<c>",
    "arc:<theta0>:<theta1>",
    "extremal:<eps>:<dir>",
    "bump:<dir>:<inner>:<outer>:<amplitude>",
    "homog:<gamma>:cosk:<k>",
    "homog:<gamma>:const",
)


def _parse_dir(token, n):
    parts = token.split(",")
    if len(parts) == 1:
        return direction(float(parts[0]), n)
    return direction([float(p) for p in parts], n)


def parse_datum(text, n=2, s=None):
    """Build a datum from a DSL string.

    <dir> is an angle in radians in the (y1, y2) plane or comma-separated
    components.  ``extremal`` needs the fractional order ``s``.
    """
    head, _, rest = text.strip().partition(":")
    args = rest.split(":") if rest else []
    try:
        if head == "const" and len(args) == 1:
            return datum_constant(float(args[0]))
        if head == "arc" and len(args) == 2:
            if n != 2:
                raise ValueError("arc datum is defined only for n = 2")
            return datum_arc(float(args[0]), float(args[1]))
        if head == "extremal" and len(args) == 2:
            if s is None:
                raise ValueError("extremal datum needs the fractional order s")
            return datum_harnack_extremal(float(args[0]), _parse_dir(args[1], n), s)
        if head == "bump" and len(args) == 4:
            return datum_bump(
                _parse_dir(args[0], n), float(args[1]), float(args[2]), float(args[3])
            )
        if head == "homog" and len(args) >= 2:
            gamma = float(args[0])
            if args[1] == "cosk" and len(args) == 3:
                k = int(args[2])
                return datum_homogeneous(gamma, cosk(k), nonnegative=k == 0, label=text)
            if args[1] == "const" and len(args) == 2:
                one = lambda w: np.ones(np.shape(w)[:-1])  # noqa: E731
                return datum_homogeneous(gamma, one, nonnegative=True, label=text)
    except ValueError as exc:
        raise ValueError(f"invalid datum {text!r}: {exc}") from None
    raise ValueError(f"invalid datum {text!r}; expected one of {', '.join(DSL_FORMS)}")
