import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sharmonic.datum import cosk, datum_bump, datum_constant, datum_homogeneous
from sharmonic.geometry import (
    DomainError,
    affine_interp,
    ball_point,
    chord_points,
    chord_roots,
    jacobian_det,
    malmheden_interp,
    reflect,
    unit_direction,
)

from strategies import ball_points, dims, unit_vectors


def test_chord_roots_center():
    for n in (2, 3, 4):
        e = np.eye(n)[-1]
        assert chord_roots(np.zeros(n), e) == pytest.approx((-1.0, 1.0), abs=1e-15)


def test_chord_roots_examples():
    x = np.array([0.5, 0.0])
    assert chord_roots(x, np.array([1.0, 0.0])) == pytest.approx((-1.5, 0.5), abs=1e-15)
    h = math.sqrt(3) / 2
    assert chord_roots(x, np.array([0.0, 1.0])) == pytest.approx((-h, h), abs=1e-15)


@given(st.data())
def test_chord_roots_match_polynomial_oracle(data):
    n = data.draw(dims)
    x, e = data.draw(ball_points(n)), data.draw(unit_vectors(n))
    # |x + r e|^2 = 1 is r^2 + 2 (x.e) r + |x|^2 - 1 = 0
    expected = np.sort(np.roots([1.0, 2.0 * x @ e, x @ x - 1.0]).real)
    assert np.allclose(chord_roots(x, e), expected, atol=1e-12)


def test_chord_points_examples():
    c = chord_points(np.zeros(3), np.array([0.0, 0.6, 0.8]))
    assert np.allclose(c.q_plus, [0.0, 0.6, 0.8]) and np.allclose(c.q_minus, [0.0, -0.6, -0.8])
    c = chord_points(np.array([0.5, 0.0]), np.array([1.0, 0.0]))
    assert np.allclose(c.q_plus, [1.0, 0.0]) and np.allclose(c.q_minus, [-1.0, 0.0])


@given(st.data())
def test_chord_points_lie_on_sphere_and_line(data):
    n = data.draw(dims)
    x, e = data.draw(ball_points(n)), data.draw(unit_vectors(n))
    c = chord_points(x, e)
    assert np.linalg.norm(c.q_plus) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(c.q_minus) == pytest.approx(1.0, abs=1e-12)
    assert c.r_minus < 0.0 < c.r_plus
    w_minus, w_plus = c.weights
    assert w_minus + w_plus == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(w_minus * c.q_minus + w_plus * c.q_plus, x, atol=1e-12)


def test_chord_points_broadcast():
    xs = np.array([[0.1, 0.2], [0.0, -0.5]])
    es = np.array([[1.0, 0.0], [0.6, 0.8]])
    c = chord_points(xs, es)
    for i in range(2):
        ci = chord_points(xs[i], es[i])
        assert np.allclose(c.q_plus[i], ci.q_plus) and np.allclose(c.r_minus[i], ci.r_minus)


def test_reflect_examples():
    w = np.array([0.0, 0.6, 0.8])
    assert np.allclose(reflect(np.zeros(3), w), -w)
    assert np.allclose(reflect(np.array([0.5, 0.0]), np.array([1.0, 0.0])), [-1.0, 0.0])


@given(st.data())
def test_reflect_is_involution_through_x(data):
    n = data.draw(dims)
    x, w = data.draw(ball_points(n)), data.draw(unit_vectors(n))
    q = reflect(x, w)
    assert np.linalg.norm(q) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(reflect(x, q), w, atol=1e-10)
    # x lies on the segment from w to its reflection
    d1, d2 = x - w, q - x
    assert np.linalg.norm(d1 * np.linalg.norm(d2) - d2 * np.linalg.norm(d1)) < 1e-10
    assert d1 @ d2 >= 0.0


def test_affine_interp_examples():
    a, b = np.array([-1.0, 0.0]), np.array([1.0, 0.0])
    assert affine_interp(0.0, 4.0, a, b, np.array([0.5, 0.0])) == pytest.approx(3.0)
    assert affine_interp(2.0, 5.0, a, b, a) == pytest.approx(2.0)
    assert affine_interp(2.0, 5.0, a, b, np.zeros(2)) == pytest.approx(3.5)


def test_affine_interp_rejects_off_segment():
    a, b = np.array([-1.0, 0.0]), np.array([1.0, 0.0])
    with pytest.raises(DomainError):
        affine_interp(0.0, 1.0, a, b, np.array([0.0, 0.1]))
    with pytest.raises(DomainError):
        affine_interp(0.0, 1.0, a, b, np.array([2.0, 0.0]))


@given(st.data())
def test_affine_interp_is_linear_along_chord(data):
    n = data.draw(dims)
    x, e = data.draw(ball_points(n, 0.8)), data.draw(unit_vectors(n))
    c = chord_points(x, e)
    lin = np.arange(1, n + 1, dtype=float)
    got = affine_interp(lin @ c.q_minus + 0.5, lin @ c.q_plus + 0.5, c.q_minus, c.q_plus, x)
    assert got == pytest.approx(lin @ x + 0.5, abs=1e-10)


def test_malmheden_interp_constant_and_center():
    one = datum_constant(1.0)
    e = np.array([0.6, 0.8])
    for rho in (1.01, 2.0, 50.0):
        assert malmheden_interp(one, np.array([0.3, -0.2]), e, np.array(rho)) == pytest.approx(1.0)
    f = datum_bump(np.array([1.0, 0.0]), 1.2, 3.0, 2.0)
    rho = 1.7
    expected = 0.5 * (f(rho * e) + f(-rho * e))
    assert malmheden_interp(f, np.zeros(2), e, np.array(rho)) == pytest.approx(expected, rel=1e-14)


@given(st.data())
def test_malmheden_interp_homogeneous_scaling(data):
    n = data.draw(dims)
    x, e = data.draw(ball_points(n)), data.draw(unit_vectors(n))
    rho = data.draw(st.floats(1.05, 20.0))
    gamma = 0.4
    f = datum_homogeneous(gamma, cosk(2))
    # f(rho q) = rho^gamma f(q): the chord at x/rho interpolates f on the unit sphere
    c = chord_points(x / rho, e)
    w_minus, w_plus = c.weights
    unit = w_minus * f.on_unit_sphere(c.q_minus) + w_plus * f.on_unit_sphere(c.q_plus)
    assert malmheden_interp(f, x, e, np.array(rho)) == pytest.approx(rho**gamma * unit, rel=1e-10, abs=1e-12)


def test_jacobian_examples():
    assert jacobian_det(np.zeros(3), np.array([0.0, 0.0, 1.0]), +1) == pytest.approx(1.0)
    assert jacobian_det(np.zeros(2), np.array([1.0, 0.0]), -1) == pytest.approx(1.0)
    assert jacobian_det(np.array([0.5, 0.0]), np.array([0.0, 1.0]), +1) == pytest.approx(1.0)


@given(st.data())
def test_jacobian_positive(data):
    n = data.draw(dims)
    x, e = data.draw(ball_points(n)), data.draw(unit_vectors(n))
    assert jacobian_det(x, e, +1) > 0 and jacobian_det(x, e, -1) > 0


def test_domain_checks():
    with pytest.raises(DomainError):
        ball_point(np.array([1.0, 0.0]))
    with pytest.raises(DomainError):
        ball_point(np.array([0.96, 0.0]), cap=0.95)
    with pytest.raises(DomainError):
        unit_direction(np.array([1.0, 1.0]))
