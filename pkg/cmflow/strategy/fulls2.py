#-----------------------------------------------------------------------------
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
#-----------------------------------------------------------------------------
"""Full (theta, phi) grid on the two-sphere."""

import numpy as _np

from cmflow.core import FULL_S2, ConfigurationError
from cmflow.strategy import (
    GHOST_ROWS as _GHOST_ROWS, sphere_area as _sphere_area,
    gauss_nodes as _gauss_nodes, theta_stencils as _theta_stencils,
    extend_rows as _extend_rows, apply_stencil as _apply_stencil,
    phi_derivatives as _phi_derivatives, polar_cutoffs as _polar_cutoffs,
    filter_rings as _filter_rings, sym2_eigenvalues as _sym2_eigenvalues)

#: The geometry identifier handled by this module.
geometry = FULL_S2

#: A friendly name for this geometry.
family_name = 'FullS2'

#: Smallest accepted number of theta nodes.
min_ntheta = 4

#: Smallest accepted number of phi nodes.
min_nphi = 8

#: Number of independent components of the coordinate Hessian.
hessian_size = 3


def validate(n, ntheta, nphi):
    """
    :raise ConfigurationError: if the resolution or dimension is unsupported.
    """
    if n != 2:
        raise ConfigurationError('%s grids only exist for n = 2, not n = %r'
            % (family_name, n))
    if ntheta is None or ntheta < min_ntheta:
        raise ConfigurationError('ntheta must be >= %d, got %r'
            % (min_ntheta, ntheta))
    if nphi is None or nphi < min_nphi or nphi % 2:
        raise ConfigurationError('nphi must be even and >= %d, got %r'
            % (min_nphi, nphi))


def layout(n, ntheta, nphi):
    """
    :return: a dictionary of the node arrays of a FullS2 grid, flattened in
        theta-major order.
    """
    theta, wx = _gauss_nodes(ntheta, n)
    phi = 2.0 * _np.pi * _np.arange(nphi) / nphi
    wphi = 2.0 * _np.pi / nphi
    tt, pp = _np.meshgrid(theta, phi, indexing='ij')
    st = _np.sin(tt)
    basis = _np.stack([st * _np.cos(pp), st * _np.sin(pp), _np.cos(tt)], axis=-1)
    d1, d2 = _theta_stencils(theta)
    cutoffs = _polar_cutoffs(theta, nphi)
    sin_t = _np.sin(theta)
    cot_t = _np.cos(theta) / sin_t
    stiffness = (_np.abs(d2).sum(axis=1) + _np.abs(cot_t) * _np.abs(d1).sum(axis=1)
        + cutoffs ** 2 / sin_t ** 2)
    return {
        'theta': theta,
        'phi': phi,
        'weights': _np.repeat(wx * wphi, nphi),
        'basis': basis.reshape(-1, 3),
        'active_axes': (0, 1, 2),
        'area': _sphere_area(n),
        'd1': d1,
        'd2': d2,
        'cutoffs': cutoffs,
        'stiffness': _np.repeat(stiffness, nphi),
    }


def _grid2d(grid, values):
    return _np.asarray(values, dtype=float).reshape(grid.ntheta, grid.nphi)


def _extended(grid, values2d):
    #   Continue each meridian through the pole onto the opposite meridian.
    shifted = _np.roll(values2d, grid.nphi // 2, axis=1)
    top = shifted[_GHOST_ROWS - 1::-1]
    bottom = shifted[:-_GHOST_ROWS - 1:-1]
    return _extend_rows(values2d, top, bottom)


def _partials(grid, values):
    v = _grid2d(grid, values)
    v_p, v_pp = _phi_derivatives(v)
    ext = _extended(grid, v)
    v_t = _apply_stencil(grid._arrays['d1'], ext)
    v_tt = _apply_stencil(grid._arrays['d2'], ext)
    v_tp = _apply_stencil(grid._arrays['d1'], _extended(grid, v_p))
    return v, v_t, v_p, v_tt, v_tp, v_pp


def _trig(grid):
    t = grid.theta[:, None]
    return _np.sin(t), _np.cos(t)


def gradient(grid, values):
    """
    :return: coordinate components (d_theta s, d_phi s) per node, shape (N, 2).
    """
    _, v_t, v_p, _, _, _ = _partials(grid, values)
    return _np.stack([v_t.ravel(), v_p.ravel()], axis=-1)


def linear_gradient(grid, z):
    """
    :return: exact coordinate gradient of <u, z>, shape (N, 2).
    """
    tt = _np.repeat(grid.theta, grid.nphi)
    pp = _np.tile(grid.phi, grid.ntheta)
    e_theta = _np.stack([_np.cos(tt) * _np.cos(pp), _np.cos(tt) * _np.sin(pp),
        -_np.sin(tt)], axis=-1)
    e_phi = _np.stack([-_np.sin(pp), _np.cos(pp), _np.zeros_like(pp)], axis=-1)
    return _np.stack([e_theta.dot(z), _np.sin(tt) * e_phi.dot(z)], axis=-1)


def grad_norm2(grid, grad):
    """:return: the squared g-bar norm of coordinate gradients."""
    st2 = _np.repeat(_np.sin(grid.theta) ** 2, grid.nphi)
    return grad[:, 0] ** 2 + grad[:, 1] ** 2 / st2


def ambient_gradient(grid, grad):
    """:return: the gradients as tangent vectors of R^3, shape (N, 3)."""
    tt = _np.repeat(grid.theta, grid.nphi)
    pp = _np.tile(grid.phi, grid.ntheta)
    e_theta = _np.stack([_np.cos(tt) * _np.cos(pp), _np.cos(tt) * _np.sin(pp),
        -_np.sin(tt)], axis=-1)
    e_phi = _np.stack([-_np.sin(pp), _np.cos(pp), _np.zeros_like(pp)], axis=-1)
    return grad[:, :1] * e_theta + (grad[:, 1] / _np.sin(tt))[:, None] * e_phi


def hessian(grid, values):
    """
    :return: coordinate Hessian components (theta-theta, theta-phi, phi-phi),
        shape (N, 3).
    """
    v, v_t, v_p, v_tt, v_tp, v_pp = _partials(grid, values)
    st, ct = _trig(grid)
    h_tt = v_tt
    h_tp = v_tp - (ct / st) * v_p
    h_pp = v_pp + st * ct * v_t
    return _np.stack([h_tt.ravel(), h_tp.ravel(), h_pp.ravel()], axis=-1)


def linear_hessian(grid, linear_values):
    """:return: the exact Hessian -<u, z> g-bar of a linear function."""
    st2 = _np.repeat(_np.sin(grid.theta) ** 2, grid.nphi)
    zero = _np.zeros_like(linear_values)
    return _np.stack([-linear_values, zero, -linear_values * st2], axis=-1)


def hessian_trace(grid, hess):
    """:return: the g-bar trace of coordinate Hessians."""
    st2 = _np.repeat(_np.sin(grid.theta) ** 2, grid.nphi)
    return hess[:, 0] + hess[:, 2] / st2


def metric(grid):
    """:return: coordinate components (1, 0, sin^2 theta) of g-bar, shape (N, 3)."""
    st2 = _np.repeat(_np.sin(grid.theta) ** 2, grid.nphi)
    return _np.stack([_np.ones_like(st2), _np.zeros_like(st2), st2], axis=-1)


def radii_form(grid, hess, values):
    """:return: coordinate components of r = hess + s g-bar, shape (N, 3)."""
    return hess + _np.asarray(values)[:, None] * metric(grid)


def radii_eigenvalues(grid, form):
    """
    Eigenvalues of r relative to g-bar, via the orthonormal frame
    (e_theta, e_phi / sin theta).

    :return: ascending eigenvalues, shape (N, 2).
    """
    st = _np.repeat(_np.sin(grid.theta), grid.nphi)
    lo, hi = _sym2_eigenvalues(form[:, 0], form[:, 1] / st, form[:, 2] / st ** 2)
    return _np.stack([lo, hi], axis=-1)


def antipodal_index(grid):
    """:return: for every node the flat index of the node at -u."""
    i = _np.arange(grid.ntheta)[:, None]
    j = _np.arange(grid.nphi)[None, :]
    anti = (grid.ntheta - 1 - i) * grid.nphi + (j + grid.nphi // 2) % grid.nphi
    return anti.ravel()


def polar_filter(grid, values):
    """:return: values with azimuthal modes above each ring's cutoff damped."""
    v = _grid2d(grid, values)
    return _filter_rings(v, grid._arrays['cutoffs']).ravel()
