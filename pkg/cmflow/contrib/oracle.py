#-----------------------------------------------------------------------------
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
#-----------------------------------------------------------------------------
"""
Convex bodies with closed-form support functions and the prescriptions they
generate.
"""
import numpy as _np
from numpy.polynomial import legendre as _legendre
from scipy import optimize as _optimize
from scipy import special as _special

from cmflow.core import (AXISYM, ConfigurationError, ConvergenceError,
    ConvexityLostError)
from cmflow.convexity import convexity_margin, pk_field
from cmflow.continuation import solve_translation

#: Body kinds understood by `BodySpec` and their required parameters.
BODY_KINDS = {
    'sphere': ('radius',),
    'translated_sphere': ('radius', 'center'),
    'ellipsoid': ('axes',),
    'harmonic_perturbed': ('radius', 'degree', 'amplitude'),
    'axisym_profile': ('coefficients',),
}

#: Optional parameters and their defaults.
BODY_DEFAULTS = {
    'harmonic_perturbed': {'order': 0},
}


class BodySpec(object):
    """
    A convex body described by a closed-form support function.

    Kinds and parameters:

    - ``sphere``: ``radius``.
    - ``translated_sphere``: ``radius``, ``center`` (a point of R^(n+1)).
    - ``ellipsoid``: ``axes``, the n + 1 semi-axes.
    - ``harmonic_perturbed``: ``radius`` * (1 + ``amplitude`` * Y), Y the
      zonal harmonic of ``degree`` (``order`` 0) or, on FullS2 grids,
      P_l^m(cos theta) cos(m phi) for ``order`` m > 0.
    - ``axisym_profile``: sum of ``coefficients[j]`` * P_j(cos theta).
    """
    __slots__ = ('kind', 'params')

    def __init__(self, kind, **params):
        """
        Constructor.

        :param kind: one of the keys of `BODY_KINDS`.

        :param params: the parameters of the body.
        """
        if kind not in BODY_KINDS:
            raise ConfigurationError('unknown body kind %r, expected one of %s'
                % (kind, ', '.join(sorted(BODY_KINDS))))
        missing = [p for p in BODY_KINDS[kind] if p not in params]
        if missing:
            raise ConfigurationError('body %r is missing %s'
                % (kind, ', '.join(missing)))
        allowed = set(BODY_KINDS[kind]) | set(BODY_DEFAULTS.get(kind, {}))
        unknown = sorted(set(params) - allowed)
        if unknown:
            raise ConfigurationError('body %r does not take %s'
                % (kind, ', '.join(unknown)))
        merged = dict(BODY_DEFAULTS.get(kind, {}))
        merged.update(params)
        self.kind = kind
        self.params = merged

    def replace(self, **changes):
        """:return: a copy of this spec with some parameters changed."""
        params = dict(self.params)
        params.update(changes)
        return BodySpec(self.kind, **params)

    def support(self, grid):
        """
        :param grid: a `Grid`.

        :return: the closed-form support function sampled on ``grid``. No
            convexity check is made.
        """
        return grid.from_function(lambda u: _SUPPORT[self.kind](grid, u, **self.params))

    def __eq__(self, other):
        try:
            return (self.kind, self.params) == (other.kind, other.params)
        except AttributeError:
            return NotImplemented

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __repr__(self):
        args = ', '.join('%s=%r' % item for item in sorted(self.params.items()))
        return 'BodySpec(%r, %s)' % (self.kind, args)


def _positive(name, value):
    if value <= 0:
        raise ConfigurationError('%s must be positive, got %r' % (name, value))
    return float(value)


def _sphere(grid, u, radius):
    return _np.full(len(u), _positive('radius', radius))


def _translated_sphere(grid, u, radius, center):
    center = _np.asarray(center, dtype=float)
    if center.shape != (grid.n + 1,):
        raise ConfigurationError('center must have %d components, got %r'
            % (grid.n + 1, tuple(center)))
    return _positive('radius', radius) + grid.linear_function(center).values


def _ellipsoid(grid, u, axes):
    axes = _np.asarray(axes, dtype=float)
    if axes.shape != (grid.n + 1,) or axes.min() <= 0.0:
        raise ConfigurationError('ellipsoid needs %d positive semi-axes, got %r'
            % (grid.n + 1, tuple(axes)))
    if grid.geometry == AXISYM and not _np.allclose(axes[:-1], axes[0]):
        raise ConfigurationError('%s grids need an ellipsoid of revolution '
            'about the last axis, got %r' % (grid.family_name, tuple(axes)))
    return _np.sqrt(((axes * u) ** 2).sum(axis=1))


def _harmonic(grid, u, degree, order):
    n = grid.n
    x = _np.clip(u[:, n], -1.0, 1.0)
    if order == 0:
        return _special.eval_gegenbauer(degree, (n - 1) / 2.0, x)
    if grid.geometry == AXISYM:
        raise ConfigurationError('%s grids only carry zonal harmonics, got '
            'order %r' % (grid.family_name, order))
    if not 0 < order <= degree:
        raise ConfigurationError('order must lie in [0, %d], got %r'
            % (degree, order))
    phi = _np.arctan2(u[:, 1], u[:, 0])
    return _special.lpmv(order, degree, x) * _np.cos(order * phi)


def _harmonic_perturbed(grid, u, radius, degree, amplitude, order=0):
    radius = _positive('radius', radius)
    return radius * (1.0 + amplitude * _harmonic(grid, u, int(degree), int(order)))


def _axisym_profile(grid, u, coefficients):
    return _legendre.legval(u[:, grid.n], _np.asarray(coefficients, dtype=float))


_SUPPORT = {
    'sphere': _sphere,
    'translated_sphere': _translated_sphere,
    'ellipsoid': _ellipsoid,
    'harmonic_perturbed': _harmonic_perturbed,
    'axisym_profile': _axisym_profile,
}


def gen_body(spec, grid):
    """
    :param spec: a `BodySpec`.

    :param grid: a `Grid`.

    :return: the sampled support function of the body.

    :raise ConvexityLostError: if the sampled support function is not
        strictly convex; the error carries the margin.
    """
    s = spec.support(grid)
    margin = convexity_margin(s)
    if margin <= 0.0:
        raise ConvexityLostError('%r is not strictly convex on %r (margin '
            '%.6g)' % (spec, grid, margin), margin=margin)
    return s


def forward_map(s, k):
    """
    :param s: a strictly convex support function `ScalarField`.

    :param k: order, 1 <= k <= n.

    :return: phi = p_k of the body, a positive `ScalarField`.
    """
    margin = convexity_margin(s)
    if margin <= 0.0:
        raise ConvexityLostError('support function is not strictly convex '
            '(margin %.6g)' % margin, margin=margin)
    return pk_field(s, k)


def ellipsoid_minkowski_prescription(axes, grid):
    """
    Closed-form p_n of the ellipsoid with the given semi-axes,
    (a_1 ... a_(n+1))^2 / s^(n+2). Only a cross-check for `forward_map`.
    """
    s = BodySpec('ellipsoid', axes=axes).support(grid)
    return s ** (-(grid.n + 2.0)) * float(_np.prod(axes)) ** 2


def _margin_at(spec, grid, amplitude):
    return convexity_margin(spec.replace(amplitude=amplitude).support(grid))


def amplitude_for_margin(spec, grid, target, max_doublings=60):
    """
    The perturbation amplitude at which a harmonic perturbed body reaches a
    given convexity margin, by root bracketing.

    :param spec: a ``harmonic_perturbed`` `BodySpec` (its amplitude is
        ignored).

    :param grid: the `Grid` the margin is measured on.

    :param target: the margin wanted, below the margin of the unperturbed
        sphere.

    :return: the smallest positive amplitude with that margin.

    :raise ConvergenceError: if no bracket is found.
    """
    if spec.kind != 'harmonic_perturbed':
        raise ValueError('amplitude_for_margin needs a harmonic_perturbed '
            'body, got %r' % (spec.kind,))
    base = _margin_at(spec, grid, 0.0)
    if not target < base:
        raise ValueError('target margin %r must lie below the unperturbed '
            'margin %.6g' % (target, base))

    def excess(amplitude):
        return _margin_at(spec, grid, amplitude) - target

    low, high = 0.0, 1e-3
    for _ in range(max_doublings):
        if excess(high) < 0.0:
            break
        low, high = high, 2.0 * high
    else:
        raise ConvergenceError('no amplitude brings the margin of %r down to '
            '%g' % (spec, target))
    return _optimize.brentq(excess, low, high, xtol=1e-15, rtol=4 * _np.finfo(float).eps)


def degenerate_prescription(spec, k, grid, scale=1.0):
    """
    A weakly admissible prescription phi = (f - <u, z>)^(-k). f is the
    harmonic perturbed support function whose radii form has smallest
    eigenvalue zero on ``grid``; z is chosen by `solve_translation` so that
    int u phi vanishes.

    The critical amplitude is located on ``grid`` itself, not on a refined
    reference grid: the prescription is weak at exactly the nodes the flow
    evaluates, and on a finer grid its margin may differ by the
    discretisation error of the radii form.

    :param spec: a ``harmonic_perturbed`` `BodySpec`.

    :param k: order of the problem.

    :param grid: the evaluation `Grid`.

    :param scale: multiplies the critical amplitude. Values below 1 give
        strictly admissible prescriptions, 0 the unperturbed one.

    :return: phi as a `ScalarField` with int u phi = 0.
    """
    amplitude = amplitude_for_margin(spec, grid, 0.0)
    f = spec.replace(amplitude=scale * amplitude).support(grid)
    if f.min() <= 0.0:
        raise ConvexityLostError('degenerate body does not contain the origin '
            '(min support %.6g)' % f.min(), margin=f.min())
    z = solve_translation(f, k)
    return (f - grid.linear_function(z)) ** (-float(k))


def harmonic_prescription(coefficients, grid):
    """
    :return: phi = sum of ``coefficients[j]`` times the zonal harmonic of
        degree j in cos(theta), sampled on ``grid``.
    """
    alpha = (grid.n - 1) / 2.0
    coefficients = [float(c) for c in coefficients]

    def evaluate(u):
        x = _np.clip(u[:, grid.n], -1.0, 1.0)
        return sum(c * _special.eval_gegenbauer(j, alpha, x)
            for j, c in enumerate(coefficients))

    return grid.from_function(evaluate)
