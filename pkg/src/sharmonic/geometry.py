"""Chord geometry in the unit ball.

Every function here broadcasts over leading axes: points and directions are
arrays whose last axis is the ambient dimension.
"""

from dataclasses import dataclass

import numpy as np

SPHERE_TOL = 1e-10
DEGENERATE_TOL = 1e-12


class DomainError(ValueError):
    """A point or direction lies outside the set an operation is defined on."""


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def ball_point(x, cap=1.0):
    """Return ``x`` as a float array after checking ``|x| < cap``."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] < 2:
        raise DomainError(f"ball point needs dimension >= 2, got shape {x.shape}")
    norm = np.sqrt(_dot(x, x))
    if cap >= 1.0:
        if np.any(norm >= 1.0):
            raise DomainError(f"point not in the open unit ball: |x| = {np.max(norm):.17g}")
    elif np.any(norm > cap):
        raise DomainError(
            f"|x| = {np.max(norm):.17g} exceeds the evaluation cap {cap}"
        )
    return x


def unit_direction(e, tol=SPHERE_TOL):
    e = np.asarray(e, dtype=float)
    norm = np.sqrt(_dot(e, e))
    if np.any(np.abs(norm - 1.0) > tol):
        raise DomainError(f"direction is not on the unit sphere: |e| = {norm}")
    return e


def _roots(x, e):
    xe = _dot(x, e)
    disc = xe * xe - _dot(x, x) + 1.0
    root = np.sqrt(disc)
    return -xe - root, -xe + root


def chord_roots(x, e):
    """Signed distances ``(r_minus, r_plus)`` from ``x`` to the sphere along ``e``.

    ``x + r e`` lies on the unit sphere exactly for the two roots of
    ``|x + r e|^2 = 1``; ``r_minus < 0 < r_plus`` because ``x`` is interior.
    """
    x = ball_point(x)
    e = unit_direction(e)
    return _roots(x, e)


@dataclass(frozen=True)
class ChordData:
    r_minus: np.ndarray
    r_plus: np.ndarray
    q_minus: np.ndarray
    q_plus: np.ndarray

    @property
    def weights(self):
        """Interpolation weights ``(w_minus, w_plus)`` of the chord endpoints at x."""
        return _chord_weights(self.r_minus, self.r_plus)


def _chord_weights(r_minus, r_plus):
    length = r_plus - r_minus
    return r_plus / length, -r_minus / length


def _chord(x, e):
    r_minus, r_plus = _roots(x, e)
    q_minus = x + r_minus[..., None] * e
    q_plus = x + r_plus[..., None] * e
    return ChordData(r_minus, r_plus, q_minus, q_plus)


def chord_points(x, e):
    """Intersections ``Q_-`` and ``Q_+`` of the line ``x + t e`` with the unit sphere."""
    x = ball_point(x)
    e = unit_direction(e)
    return _chord(x, e)


def _reflect(x, w):
    d = x - w
    coef = 2.0 * _dot(d, w) / _dot(d, d)
    return w - coef[..., None] * d


def reflect(x, w):
    """Second intersection with the sphere of the chord from ``w`` through ``x``."""
    x = ball_point(x)
    w = unit_direction(w)
    d = x - w
    if np.any(_dot(d, d) < DEGENERATE_TOL**2):
        raise DomainError("reflection through a point coinciding with the sphere point")
    return _reflect(x, w)


def affine_interp(fa, fb, a, b, x):
    """Value at ``x`` of the affine function on segment [a, b] taking ``fa``, ``fb``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    ab = b - a
    length = np.sqrt(_dot(ab, ab))
    if np.any(length < DEGENERATE_TOL):
        raise DomainError("degenerate chord: |b - a| below 1e-12")
    e = ab / length[..., None]
    t = _dot(x - a, e) / length
    off = (x - a) - (t * length)[..., None] * e
    if np.any(np.sqrt(_dot(off, off)) > SPHERE_TOL) or np.any(t < -SPHERE_TOL) or np.any(
        t > 1 + SPHERE_TOL
    ):
        raise DomainError("interpolation point is not on the segment [a, b]")
    return t * np.asarray(fb) + (_dot(b - x, e) / length) * np.asarray(fa)


def _interp_on_chord(chord, f_minus, f_plus):
    w_minus, w_plus = chord.weights
    return w_minus * f_minus + w_plus * f_plus


def malmheden_interp(f, x, e, rho):
    """Chord interpolation of the rescaled datum ``f(rho .)`` evaluated at ``x / rho``.

    The chord through ``x / rho`` in direction ``e`` meets the unit sphere in
    ``Q_-`` and ``Q_+``; the datum is sampled at ``rho Q_-`` and ``rho Q_+``,
    both on the sphere of radius ``rho``, so the exterior datum is never
    evaluated inside the closed unit ball.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 1.0):
        raise DomainError("rescaling radius must exceed 1")
    x = ball_point(x)
    e = unit_direction(e)
    r = rho[..., None]
    chord = _chord(x / r, e)
    return _interp_on_chord(chord, f(r * chord.q_minus), f(r * chord.q_plus))


def jacobian_det(x, e, sign):
    """Surface Jacobian of ``e -> Q_sign(e)`` on the unit sphere; ``sign`` is +1 or -1."""
    x = ball_point(x)
    e = unit_direction(e)
    return _jacobian(x, e, sign)


def _jacobian(x, e, sign):
    r_minus, r_plus = _roots(x, e)
    r = r_plus if sign > 0 else r_minus
    n = x.shape[-1]
    return (sign * r) ** n / (1.0 - _dot(x, x) - r * _dot(x, e))
