#-----------------------------------------------------------------------------
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
#-----------------------------------------------------------------------------
"""Sphere grids, sampled fields, quadrature and covariant derivatives."""

import numpy as _np

from cmflow.core import (FULL_S2, AXISYM, ConfigurationError,
    GridMismatchError)
from cmflow.strategy import fulls2 as _fulls2, axisym as _axisym

_STRATEGIES = {
    FULL_S2: _fulls2,
    AXISYM: _axisym,
}


def geometry_module(geometry):
    """
    :param geometry: a geometry identifier, e.g. ``'FullS2'`` or ``'axisym'``
        (case insensitive).

    :return: the strategy module implementing it.
    """
    try:
        return _STRATEGIES[str(geometry).lower()]
    except KeyError:
        raise ConfigurationError('unknown geometry %r, expected one of %s'
            % (geometry, ', '.join(m.family_name for m in _STRATEGIES.values())))


class Grid(object):
    """
    A discretisation of S^n: Gauss nodes in cos(theta), uniform nodes in phi
    (FullS2 only), positive quadrature weights and derivative stencils.

    Grids are immutable; two grids with equal keys are interchangeable.
    """
    __slots__ = ('_module', 'n', 'ntheta', 'nphi', 'theta', 'phi', 'weights',
        'node_count', '_arrays', '_lin_gram', '__weakref__')

    def __init__(self, geometry, ntheta, nphi=None, n=2):
        """
        Constructor.

        :param geometry: ``'fulls2'`` or ``'axisym'``.

        :param ntheta: number of polar nodes.

        :param nphi: number of azimuthal nodes (FullS2 only).

        :param n: dimension of the sphere (must be 2 for FullS2).
        """
        module = geometry_module(geometry)
        module.validate(n, ntheta, nphi)
        self._module = module
        self.n = int(n)
        self.ntheta = int(ntheta)
        self.nphi = int(nphi) if module is _fulls2 else None
        self._arrays = module.layout(self.n, self.ntheta, self.nphi)
        self.theta = self._arrays['theta']
        self.phi = self._arrays['phi']
        self.weights = self._arrays['weights']
        self.node_count = len(self.weights)
        axes = list(self._arrays['active_axes'])
        b = self._arrays['basis'][:, axes]
        self._lin_gram = (b * self.weights[:, None]).T.dot(b)

    @property
    def geometry(self):
        """the geometry identifier of this grid"""
        return self._module.geometry

    @property
    def family_name(self):
        """a friendly name of the geometry"""
        return self._module.family_name

    @property
    def area(self):
        """the measure |S^n| of the sphere"""
        return self._arrays['area']

    @property
    def basis(self):
        """
        the coordinate functions u_1 .. u_(n+1) at every node, shape
        (N, n + 1). Axisymmetric grids only carry the axial column.
        """
        return self._arrays['basis']

    @property
    def active_axes(self):
        """indices of the ambient axes a field on this grid can move along"""
        return self._arrays['active_axes']

    @property
    def stiffness(self):
        """per-node bound on the spectral radius of the discrete Hessian"""
        return self._arrays['stiffness']

    def key(self):
        """
        :return: a key tuple that uniquely identifies this grid.
        """
        return self.geometry, self.n, self.ntheta, self.nphi

    def __hash__(self):
        return hash(self.key())

    def __eq__(self, other):
        try:
            return self.key() == other.key()
        except AttributeError:
            return NotImplemented

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __repr__(self):
        if self.nphi is None:
            return "Grid('%s', ntheta=%d, n=%d)" % (self.family_name,
                self.ntheta, self.n)
        return "Grid('%s', ntheta=%d, nphi=%d)" % (self.family_name,
            self.ntheta, self.nphi)

    def field(self, values):
        """:return: a `ScalarField` on this grid."""
        return ScalarField(self, values)

    def constant(self, value):
        """:return: the constant `ScalarField` with the given value."""
        return ScalarField(self, _np.full(self.node_count, float(value)))

    def from_function(self, func):
        """
        :param func: a callable taking an (N, n + 1) array of unit normals
            and returning N values. On axisymmetric grids the normals are
            (sin theta, 0, ..., 0, cos theta).

        :return: the sampled `ScalarField`.
        """
        return ScalarField(self, func(self.unit_normals()))

    def unit_normals(self):
        """:return: a unit normal representing every node, shape (N, n + 1)."""
        if self._module is _fulls2:
            return self.basis.copy()
        u = _np.zeros((self.node_count, self.n + 1))
        u[:, 0] = _np.sin(self.theta)
        u[:, self.n] = _np.cos(self.theta)
        return u

    def check(self, field):
        """
        :raise GridMismatchError: if ``field`` does not live on this grid.
        """
        grid = getattr(field, 'grid', None)
        if grid is None or grid.key() != self.key():
            raise GridMismatchError('field lives on %r, expected %r'
                % (grid, self))

    def integrate(self, field):
        """
        :param field: a `ScalarField` on this grid.

        :return: the quadrature sum of the values times the node weights.
        """
        self.check(field)
        return float(_np.dot(self.weights, field.values))

    def moment(self, field):
        """
        :return: the vector of integrals of u_i times ``field``, shape (n + 1,).
        """
        self.check(field)
        return (self.basis * (self.weights * field.values)[:, None]).sum(axis=0)

    def linear_function(self, z):
        """
        :param z: a point of R^(n+1). On axisymmetric grids only its axial
            component may be non-zero.

        :return: the field <u, z>.
        """
        z = self._point(z)
        return ScalarField(self, self.basis.dot(z))

    def _point(self, z):
        z = _np.asarray(z, dtype=float).reshape(-1)
        if z.shape != (self.n + 1,):
            raise ValueError('expected a point of R^%d, got shape %r'
                % (self.n + 1, z.shape))
        inactive = [i for i in range(self.n + 1) if i not in self.active_axes]
        if inactive and _np.any(z[inactive] != 0.0):
            raise ValueError('%s grids only represent translations along the '
                'symmetry axis, got %r' % (self.family_name, tuple(z)))
        return z

    def split_linear(self, field):
        """
        Split a field into its degree-one part <u, z> (L2 projection, exact in
        the quadrature) and the remainder.

        :return: a tuple (remainder values, z).
        """
        self.check(field)
        axes = list(self.active_axes)
        b = self.basis[:, axes]
        rhs = (b * (self.weights * field.values)[:, None]).sum(axis=0)
        coeffs = _np.linalg.solve(self._lin_gram, rhs)
        z = _np.zeros(self.n + 1)
        z[axes] = coeffs
        linear = self.basis.dot(z)
        return field.values - linear, z

    def antipodal_index(self):
        """:return: the index of the node at -u for every node."""
        return self._module.antipodal_index(self)

    def polar_filter(self, field):
        """
        :return: ``field`` with azimuthal modes above each ring's resolution
            damped towards its stiffness limit (identity on axisymmetric
            grids).
        """
        self.check(field)
        return ScalarField(self, self._module.polar_filter(self, field.values))


class ScalarField(object):
    """
    Samples of a real function at the nodes of a `Grid`.

    Fields have value semantics: arithmetic returns new fields and the
    values array is never shared with the caller.
    """
    __slots__ = ('grid', 'values')

    def __init__(self, grid, values):
        """
        Constructor.

        :param grid: the `Grid` the samples belong to.

        :param values: one real per node, in node order.
        """
        values = _np.array(values, dtype=float).reshape(-1)
        if values.shape[0] != grid.node_count:
            raise GridMismatchError('expected %d values for %r, got %d'
                % (grid.node_count, grid, values.shape[0]))
        if not _np.all(_np.isfinite(values)):
            raise ValueError('field values must be finite')
        self.grid = grid
        self.values = values

    def _coerce(self, other):
        if isinstance(other, ScalarField):
            self.grid.check(other)
            return other.values
        return other

    def __add__(self, other):
        return ScalarField(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ScalarField(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return ScalarField(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return ScalarField(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return ScalarField(self.grid, self.values / self._coerce(other))

    def __neg__(self):
        return ScalarField(self.grid, -self.values)

    def __pow__(self, exponent):
        return ScalarField(self.grid, self.values ** exponent)

    def __len__(self):
        return self.grid.node_count

    def min(self):
        """:return: the smallest sample."""
        return float(self.values.min())

    def max(self):
        """:return: the largest sample."""
        return float(self.values.max())

    def mean(self):
        """:return: the quadrature mean over the sphere."""
        return self.grid.integrate(self) / self.grid.area

    def copy(self):
        """:return: an independent copy of this field."""
        return ScalarField(self.grid, self.values)

    def __repr__(self):
        return 'ScalarField(%r, min=%.6g, max=%.6g)' % (self.grid,
            self.values.min(), self.values.max())


class CovariantDerivatives(object):
    """
    Gradient and Hessian of a field in the round metric.

    On FullS2 grids ``gradient`` holds coordinate components
    (d_theta s, d_phi s) and ``hessian`` the coordinate components
    (theta-theta, theta-phi, phi-phi). On axisymmetric grids ``gradient`` is
    s' and ``hessian`` the eigenframe pair (s'', s' cot(theta)).
    """
    __slots__ = ('grid', 'gradient', 'hessian')

    def __init__(self, grid, gradient=None, hessian=None):
        self.grid = grid
        self.gradient = gradient
        self.hessian = hessian

    def grad_norm2(self):
        """:return: |grad s|^2 per node."""
        return self.grid._module.grad_norm2(self.grid, self.gradient)

    def ambient_gradient(self):
        """:return: the gradient as vectors of R^(n+1), shape (N, n + 1)."""
        return self.grid._module.ambient_gradient(self.grid, self.gradient)

    def trace(self):
        """:return: the Laplace-Beltrami values tr_g hess s per node."""
        return self.grid._module.hessian_trace(self.grid, self.hessian)


def build_grid(geometry, ntheta, nphi=None, n=None):
    """
    :param geometry: ``'fulls2'`` or ``'axisym'``.

    :param ntheta: number of polar nodes, at least 4.

    :param nphi: number of azimuthal nodes, even and at least 8 (FullS2).

    :param n: sphere dimension. Defaults to 2.

    :return: a new `Grid`.
    """
    return Grid(geometry, ntheta, nphi, 2 if n is None else n)


def integrate(field):
    """:return: the quadrature integral of ``field`` over its sphere."""
    return field.grid.integrate(field)


def covariant_gradient(field):
    """
    :param field: a `ScalarField`.

    :return: `CovariantDerivatives` with the gradient part filled in. The
        degree-one part of the field is differentiated exactly.
    """
    grid = field.grid
    module = grid._module
    rest, z = grid.split_linear(field)
    grad = module.gradient(grid, rest) + module.linear_gradient(grid, z)
    return CovariantDerivatives(grid, gradient=grad)


def covariant_hessian(field):
    """
    :param field: a `ScalarField`.

    :return: `CovariantDerivatives` with the Hessian part filled in. The
        degree-one part of the field contributes exactly -<u, z> g-bar.
    """
    grid = field.grid
    module = grid._module
    rest, z = grid.split_linear(field)
    hess = module.hessian(grid, rest) + module.linear_hessian(grid, grid.basis.dot(z))
    return CovariantDerivatives(grid, hessian=hess)
