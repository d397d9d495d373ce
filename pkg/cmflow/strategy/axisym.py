#-----------------------------------------------------------------------------
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
#-----------------------------------------------------------------------------
"""
Axially symmetric profiles on S^n.

Functions depend on the polar angle theta only. The radii form then has the
radial eigenvalue s'' + s (multiplicity 1) and the tangential eigenvalue
s' cot(theta) + s (multiplicity n - 1).
"""

import numpy as _np

from cmflow.core import AXISYM, ConfigurationError
from cmflow.strategy import (
    GHOST_ROWS as _GHOST_ROWS, sphere_area as _sphere_area,
    gauss_nodes as _gauss_nodes, theta_stencils as _theta_stencils,
    extend_rows as _extend_rows, apply_stencil as _apply_stencil)

#: The geometry identifier handled by this module.
geometry = AXISYM

#: A friendly name for this geometry.
family_name = 'Axisym'

#: Smallest accepted number of theta nodes.
min_ntheta = 4

#: Number of independent components of the (diagonal) Hessian.
hessian_size = 2


def validate(n, ntheta, nphi):
    """
    :raise ConfigurationError: if the resolution or dimension is unsupported.
    """
    if n is None or n < 2:
        raise ConfigurationError('%s grids need n >= 2, got %r'
            % (family_name, n))
    if ntheta is None or ntheta < min_ntheta:
        raise ConfigurationError('ntheta must be >= %d, got %r'
            % (min_ntheta, ntheta))


def layout(n, ntheta, nphi):
    """
    :return: a dictionary of the node arrays of an axisymmetric grid.
    """
    theta, wx = _gauss_nodes(ntheta, n)
    #   The zonal weights integrate against sin^(n-1); the remaining factor is
    #   the measure of the S^(n-1) orbit.
    orbit = _sphere_area(n - 1)
    basis = _np.zeros((ntheta, n + 1))
    basis[:, n] = _np.cos(theta)
    d1, d2 = _theta_stencils(theta)
    cot_t = _np.cos(theta) / _np.sin(theta)
    stiffness = _np.abs(d2).sum(axis=1) + (n - 1) * _np.abs(cot_t) * _np.abs(d1).sum(axis=1)
    return {
        'theta': theta,
        'phi': None,
        'weights': wx * orbit,
        'basis': basis,
        'active_axes': (n,),
        'area': _sphere_area(n),
        'd1': d1,
        'd2': d2,
        'cutoffs': None,
        'stiffness': stiffness,
    }


def _extended(values):
    #   Even extension across both poles.
    top = values[_GHOST_ROWS - 1::-1]
    bottom = values[:-_GHOST_ROWS - 1:-1]
    return _extend_rows(values, top, bottom)


def _derivatives(grid, values):
    ext = _extended(_np.asarray(values, dtype=float))
    return (_apply_stencil(grid._arrays['d1'], ext),
            _apply_stencil(grid._arrays['d2'], ext))


def _cot(grid):
    return _np.cos(grid.theta) / _np.sin(grid.theta)


def gradient(grid, values):
    """:return: the profile derivative s' per node, shape (N, 1)."""
    s1, _ = _derivatives(grid, values)
    return s1[:, None]


def linear_gradient(grid, z):
    """:return: exact derivative of z_axis * cos(theta), shape (N, 1)."""
    return (-z[grid.n] * _np.sin(grid.theta))[:, None]


def grad_norm2(grid, grad):
    """:return: the squared g-bar norm of profile gradients."""
    return grad[:, 0] ** 2


def ambient_gradient(grid, grad):
    """
    :return: the gradients as vectors of R^(n+1). Only the axial component is
        kept, the orbit-averaged remainder vanishes.
    """
    out = _np.zeros((grid.node_count, grid.n + 1))
    out[:, grid.n] = -_np.sin(grid.theta) * grad[:, 0]
    return out


def hessian(grid, values):
    """
    :return: the Hessian in its g-bar orthonormal eigenframe, the pair
        (s'', s' cot(theta)) per node, shape (N, 2).
    """
    s1, s2 = _derivatives(grid, values)
    return _np.stack([s2, s1 * _cot(grid)], axis=-1)


def linear_hessian(grid, linear_values):
    """:return: the exact Hessian -<u, z> g-bar of a linear function."""
    return _np.stack([-linear_values, -linear_values], axis=-1)


def hessian_trace(grid, hess):
    """:return: the g-bar trace s'' + (n - 1) s' cot(theta)."""
    return hess[:, 0] + (grid.n - 1) * hess[:, 1]


def metric(grid):
    """:return: g-bar in the orthonormal eigenframe, (1, 1) per node."""
    return _np.ones((grid.node_count, 2))


def radii_form(grid, hess, values):
    """:return: the pair (lambda_rad, lambda_tan) per node, shape (N, 2)."""
    return hess + _np.asarray(values)[:, None]


def radii_eigenvalues(grid, form):
    """:return: ascending eigenvalues with multiplicities, shape (N, n)."""
    lam = _np.empty((grid.node_count, grid.n))
    lam[:, 0] = form[:, 0]
    lam[:, 1:] = form[:, 1:2]
    return _np.sort(lam, axis=1)


def antipodal_index(grid):
    """:return: for every node the index of the node at theta -> pi - theta."""
    return _np.arange(grid.ntheta)[::-1].copy()


def polar_filter(grid, values):
    """Profiles carry no azimuthal modes; returned unchanged."""
    return _np.asarray(values, dtype=float).copy()
