import json
import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import gamma as Gamma

from sharmonic.kernels import KernelParams, poisson_kernel, radial_kernel, surface_area
from sharmonic.quadrature import (
    HypothesisError,
    QuadratureSpec,
    build_radial_rule,
    build_sphere_rule,
    check_growth,
    circle_rule_with_breaks,
    integrate_exterior,
    tail_bound,
)

from strategies import unit_vectors


def sphere_moment(alpha):
    """Exact integral of prod w_i^alpha_i over S^{n-1}."""
    alpha = np.asarray(alpha)
    if np.any(alpha % 2):
        return 0.0
    b = (alpha + 1) / 2
    return 2 * np.prod(Gamma(b)) / Gamma(b.sum())


# ---------------------------------------------------------------- sphere


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("level", [1, 2, 4])
def test_sphere_rule_measure_and_nodes(n, level):
    rule = build_sphere_rule(n, level)
    assert rule.weights.sum() == pytest.approx(surface_area(n), rel=1e-12)
    assert np.allclose(np.linalg.norm(rule.nodes, axis=1), 1.0, atol=1e-12)
    assert np.all(rule.weights > 0)


def test_sphere_rule_examples():
    r3 = build_sphere_rule(3, 3)
    assert r3.integrate(r3.nodes[:, 2] ** 2) == pytest.approx(4 * math.pi / 3, rel=1e-13)
    r2 = build_sphere_rule(2, 2)
    assert r2.integrate(r2.nodes[:, 0] ** 2) == pytest.approx(math.pi, rel=1e-13)


@pytest.mark.parametrize("n,level", [(2, 1), (2, 3), (3, 2), (3, 3)])
def test_sphere_rule_polynomial_exactness(n, level):
    rule = build_sphere_rule(n, level)
    for alpha in product(range(rule.degree + 1), repeat=n):
        if sum(alpha) > rule.degree:
            continue
        got = rule.integrate(np.prod(rule.nodes ** np.array(alpha), axis=1))
        assert got == pytest.approx(sphere_moment(alpha), abs=1e-12 * surface_area(n))


@given(unit_vectors(3))
def test_aligned_rule_keeps_exactness(d):
    rule = build_sphere_rule(3, 2).aligned(d)
    assert np.allclose(np.linalg.norm(rule.nodes, axis=1), 1.0)
    assert rule.integrate(rule.nodes[:, 0] ** 2 * rule.nodes[:, 1] ** 2) == pytest.approx(
        sphere_moment((2, 2, 0)), abs=1e-12
    )
    # the pole of the aligned rule is along d
    assert np.max(rule.nodes @ d) > np.max(build_sphere_rule(3, 2).nodes[:, 2]) - 1e-12


def test_sphere_rule_rejects_level():
    with pytest.raises(ValueError):
        build_sphere_rule(2, 0)


def test_circle_rule_with_breaks_piecewise():
    rule = circle_rule_with_breaks((0.3, 2.0), 2)
    theta = np.arctan2(rule.nodes[:, 1], rule.nodes[:, 0])
    phase = np.mod(theta - 0.3, 2 * math.pi)
    f = np.where(phase <= 1.7, np.cos(theta), 0.0)
    assert rule.integrate(f) == pytest.approx(math.sin(2.0) - math.sin(0.3), abs=1e-14)
    assert rule.weights.sum() == pytest.approx(2 * math.pi, rel=1e-14)


# ---------------------------------------------------------------- radial


@pytest.mark.parametrize("s", [0.1, 0.25, 0.5, 0.75, 0.9])
@pytest.mark.parametrize("delta", [0.25, 0.5, 1.0])
def test_head_rule_constant(s, delta):
    rule = build_radial_rule(s, QuadratureSpec(delta=delta))
    assert rule.head_weights.sum() == pytest.approx(delta ** (1 - s) / (1 - s), rel=1e-12)


def test_head_rule_linear_example():
    rule = build_radial_rule(0.5, QuadratureSpec(delta=1.0))
    exact, _ = quad(lambda r: r, 1.0, 2.0, weight="alg", wvar=(-0.5, 0.0))
    assert exact == pytest.approx(8 / 3, rel=1e-13)
    assert rule.head_weights @ rule.head_nodes == pytest.approx(8 / 3, rel=1e-12)


def test_head_rule_polynomial_exactness():
    s, delta = 0.3, 0.5
    spec = QuadratureSpec(delta=delta, head_order=8)
    rule = build_radial_rule(s, spec)
    for k in range(2 * spec.head_order):
        exact = delta ** (k + 1 - s) / (k + 1 - s)  # int_0^delta t^{k-s} dt
        assert rule.head_weights @ rule.head_offsets**k == pytest.approx(exact, rel=1e-12)


def test_panels_cover_without_gaps():
    spec = QuadratureSpec()
    rule = build_radial_rule(0.5, spec)
    edges = rule.panel_edges
    assert edges[0] == pytest.approx(1 + spec.delta) and edges[-1] == pytest.approx(spec.r_cut)
    assert np.all(np.diff(edges) > 0)
    assert np.all(rule.offsets > 0)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("xr", [0.0, 0.6, 0.9])
def test_radial_rule_E_normalization(n, s, xr):
    p = KernelParams(n, s)
    x = np.zeros(n)
    x[0] = xr
    rule = build_radial_rule(s, QuadratureSpec())
    val = math.fsum(rule.weights * radial_kernel(x, rule.nodes, p))
    assert val == pytest.approx(1 / p.area, abs=1e-8)


@pytest.mark.parametrize("n,s,xr", [(2, 0.5, 0.6), (3, 0.25, 0.9), (2, 0.75, 0.0)])
def test_radial_rule_convergence(n, s, xr):
    p = KernelParams(n, s)
    x = np.zeros(n)
    x[0] = xr
    errs = []
    for ppd in (1, 2, 4, 8):
        rule = build_radial_rule(s, QuadratureSpec(panel_order=2, panels_per_decade=ppd))
        errs.append(abs(math.fsum(rule.weights * radial_kernel(x, rule.nodes, p)) - 1 / p.area))
    for a, b in zip(errs, errs[1:]):
        assert b <= a / 4 or b < 1e-10


def test_radial_rule_finite_support_and_breaks():
    rule = build_radial_rule(0.5, QuadratureSpec(), breaks=(1.2, 1.7), support=(1.0, 2.0))
    assert len(rule.tail_offsets) == 0
    assert {1.2, 1.7, 2.0} <= set(np.round(rule.panel_edges, 14))
    assert rule.nodes.max() < 2.0
    shifted = build_radial_rule(0.5, QuadratureSpec(), support=(1.5, 3.0))
    assert len(shifted.head_offsets) == 0 and shifted.nodes.min() > 1.5


# ---------------------------------------------------------------- spec


def test_spec_roundtrip(tmp_path):
    spec = QuadratureSpec(sphere_level=3, mc_samples=1000, delta=0.25)
    assert QuadratureSpec.from_dict(spec.to_dict()) == spec
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec.to_dict()))
    assert QuadratureSpec.from_json(path) == spec


@pytest.mark.parametrize(
    "bad", [{"delta": 0.0}, {"delta": 1.5}, {"r_cut": 5.0}, {"head_order": 1}, {"sphere_level": 0}, {"bogus": 1}]
)
def test_spec_validation(bad):
    with pytest.raises((ValueError, TypeError)):
        QuadratureSpec.from_dict(bad)


def test_spec_coarse():
    c = QuadratureSpec().coarse()
    assert (c.head_order, c.panel_order, c.tail_order) == (12, 8, 12)


# ---------------------------------------------------------------- tail


def test_tail_bound_examples():
    assert tail_bound((0.0, 0.0), np.zeros(2), 0.5, 100.0, 2).value == 0.0
    p = KernelParams(2, 0.5)
    bound = tail_bound((1.0, 0.0), np.zeros(2), 0.5, 100.0, 2).value
    # int_100^inf 2 pi E(0, rho) d rho = 2 pi c arcsin(1/100) for s = 1/2
    remainder = 2 * math.pi * p.c_ns * math.asin(1 / 100)
    assert remainder < bound
    c_dec = (1 - 100.0**-2) ** -0.5
    assert bound <= 2 * math.pi * p.c_ns * 2 * c_dec / 100 * (1 + 1e-12)


@given(st.floats(0.05, 0.95), st.floats(0.0, 0.9), st.floats(0.0, 0.85))
def test_tail_bound_monotone_and_rigorous(s, xr, frac):
    gamma = frac * 2 * s
    x = np.array([xr, 0.0])
    bounds = [tail_bound((1.0, gamma), x, s, r, 2).value for r in (10.0, 100.0, 1000.0)]
    assert bounds[0] > bounds[1] > bounds[2] > 0
    p = KernelParams(2, s)
    q = 1 - xr * xr
    true, _ = quad(
        lambda r: 2 * math.pi * radial_kernel(x, r, p) * 2 * r**gamma / math.sqrt(q), 100.0, np.inf, epsrel=1e-10
    )
    assert true <= bounds[1] * (1 + 1e-9)


def test_growth_hypothesis():
    with pytest.raises(HypothesisError, match="L\\^1_s"):
        check_growth((1.0, 1.5), 0.5)
    with pytest.raises(HypothesisError):
        tail_bound((1.0, 1.0), np.zeros(2), 0.5, 100.0, 2)
    check_growth((1.0, 1.5), 0.5, support_radius=3.0)


# ---------------------------------------------------------------- exterior


@pytest.mark.parametrize("n", [2, 3])
def test_integrate_poisson_center(n):
    p = KernelParams(n, 0.5)
    res = integrate_exterior(lambda y: poisson_kernel(np.zeros(n), y, p), QuadratureSpec(), p)
    assert res.value == pytest.approx(1.0, abs=1e-8)
    assert res.error_estimate >= abs(res.value - 1.0)


def test_integrate_poisson_off_center():
    p = KernelParams(3, 0.75)
    x = np.array([0.0, 0.36, 0.48])
    res = integrate_exterior(lambda y: poisson_kernel(x, y, p), QuadratureSpec(), p, align=x)
    assert res.value == pytest.approx(1.0, abs=1e-6)
    assert res.error_estimate >= abs(res.value - 1.0)


def test_integrate_annulus_indicator():
    p = KernelParams(2, 0.5)
    g = lambda y: poisson_kernel(np.zeros(2), y, p) * (np.sum(y * y, axis=-1) < 4.0)  # noqa: E731
    res = integrate_exterior(g, QuadratureSpec(), p, support=(1.0, 2.0))
    # c 2 pi int_1^2 dr / (r sqrt(r^2 - 1)) = c 2 pi arcsec 2
    expected = p.c_ns * 2 * math.pi * math.acos(0.5)
    assert res.value == pytest.approx(expected, rel=1e-10)
    assert expected == pytest.approx(2 / 3, rel=1e-14)


@pytest.mark.parametrize("n,s", [(2, 0.25), (2, 0.75), (3, 0.5)])
def test_monte_carlo_within_four_sigma(n, s):
    p = KernelParams(n, s)
    x = np.zeros(n)
    x[0] = 0.4
    spec = QuadratureSpec(mc_samples=20000)
    res = integrate_exterior(lambda y: poisson_kernel(x, y, p), spec, p, seed=7)
    assert res.mc_stderr > 0
    assert abs(res.mc_value - res.value) <= 4 * res.mc_stderr


def test_integration_is_deterministic():
    p = KernelParams(3, 0.25)
    x = np.array([0.1, -0.5, 0.2])
    a = integrate_exterior(lambda y: poisson_kernel(x, y, p), QuadratureSpec(), p)
    b = integrate_exterior(lambda y: poisson_kernel(x, y, p), QuadratureSpec(), p)
    assert a == b
