#-----------------------------------------------------------------------------
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
#-----------------------------------------------------------------------------
"""
Radii of curvature of convex bodies given by their support functions.

For a support function s the form r = hess(s) + s g-bar has the principal
radii of curvature as its eigenvalues relative to g-bar. p_k denotes their
k-th elementary symmetric polynomial.
"""
import numpy as _np

from cmflow.core import ConvexityLostError
from cmflow.grid import ScalarField


class RadiiForm(object):
    """
    The radii form r at every node of a grid.

    ``components`` holds coordinate components (theta-theta, theta-phi,
    phi-phi) on FullS2 grids and the eigenpair (lambda_rad, lambda_tan) on
    axisymmetric grids; ``metric`` holds g-bar in the same layout.
    """
    __slots__ = ('grid', 'components', 'metric')

    def __init__(self, grid, components):
        self.grid = grid
        self.components = components
        self.metric = grid._module.metric(grid)

    def __repr__(self):
        return 'RadiiForm(%r)' % (self.grid,)


class RadiiSpectrum(object):
    """
    Principal radii lambda_1 <= ... <= lambda_n at every node, an array of
    shape (N, n).
    """
    __slots__ = ('grid', 'eigenvalues')

    def __init__(self, grid, eigenvalues):
        self.grid = grid
        self.eigenvalues = eigenvalues

    @property
    def smallest(self):
        """the smallest radius at every node"""
        return self.eigenvalues[:, 0]

    @property
    def largest(self):
        """the largest radius at every node"""
        return self.eigenvalues[:, -1]

    def __repr__(self):
        return 'RadiiSpectrum(%r, min=%.6g, max=%.6g)' % (self.grid,
            self.eigenvalues.min(), self.eigenvalues.max())


class CurvatureView(object):
    """
    Principal curvatures kappa_i = 1 / lambda_i (descending), their sum H and
    the speed function F = (sigma_n / sigma_(n-k))^(1/k) at every node.
    """
    __slots__ = ('grid', 'k', 'kappa', 'mean_curvature', 'speed')

    def __init__(self, grid, k, kappa, mean_curvature, speed):
        self.grid = grid
        self.k = k
        self.kappa = kappa
        self.mean_curvature = mean_curvature
        self.speed = speed

    @property
    def kappa_min(self):
        """the smallest principal curvature at every node"""
        return self.kappa[:, -1]

    @property
    def kappa_max(self):
        """the largest principal curvature at every node"""
        return self.kappa[:, 0]


def elementary_symmetric(values, k):
    """
    :param values: array of shape (..., n).

    :param k: order, 0 <= k <= n.

    :return: the k-th elementary symmetric polynomial over the last axis.
    """
    values = _np.asarray(values, dtype=float)
    n = values.shape[-1]
    if not 0 <= k <= n:
        raise ValueError('k must lie in [0, %d], got %r' % (n, k))
    e = [_np.ones(values.shape[:-1])] + [_np.zeros(values.shape[:-1])] * k
    for j in range(n):
        x = values[..., j]
        for d in range(min(j + 1, k), 0, -1):
            e[d] = e[d] + x * e[d - 1]
    return e[k]


def radii_form(s):
    """
    :param s: a support function `ScalarField`.

    :return: the `RadiiForm` r = hess(s) + s g-bar. The degree-one part of s
        is removed first, so translations of the body leave r unchanged.
    """
    grid = s.grid
    module = grid._module
    rest, _ = grid.split_linear(s)
    hess = module.hessian(grid, rest)
    return RadiiForm(grid, module.radii_form(grid, hess, rest))


def radii_spectrum(r):
    """
    :param r: a `RadiiForm`.

    :return: the `RadiiSpectrum` of r relative to g-bar, ascending per node.
        Negative eigenvalues are reported, not rejected.
    """
    grid = r.grid
    return RadiiSpectrum(grid, grid._module.radii_eigenvalues(grid, r.components))


def radii_eigenvalues(s):
    """:return: the `RadiiSpectrum` of the support function ``s``."""
    return radii_spectrum(radii_form(s))


def elem_sym(spectrum, k):
    """
    :param spectrum: a `RadiiSpectrum`, or an array whose last axis holds
        the eigenvalues.

    :param k: order, 1 <= k <= n.

    :return: p_k as a `ScalarField` (for a `RadiiSpectrum`) or as an array.
    """
    values = getattr(spectrum, 'eigenvalues', spectrum)
    n = _np.shape(values)[-1]
    if not 1 <= k <= n:
        raise ValueError('k must lie in [1, %d], got %r' % (n, k))
    pk = elementary_symmetric(values, k)
    if isinstance(spectrum, RadiiSpectrum):
        return ScalarField(spectrum.grid, pk)
    if _np.ndim(pk) == 0:
        return float(pk)
    return pk


def pk_field(s, k):
    """:return: p_k of the radii of ``s`` as a `ScalarField`."""
    return elem_sym(radii_eigenvalues(s), k)


def curvature_view(spectrum, k):
    """
    :param spectrum: a `RadiiSpectrum`.

    :param k: order, 1 <= k <= n.

    :return: the `CurvatureView`. F equals p_k^(-1/k) node by node.

    :raise ConvexityLostError: if any radius is not positive.
    """
    lam = spectrum.eigenvalues
    n = lam.shape[-1]
    if not 1 <= k <= n:
        raise ValueError('k must lie in [1, %d], got %r' % (n, k))
    smallest = float(lam.min())
    if smallest <= 0.0:
        raise ConvexityLostError('principal radius %.6g is not positive'
            % smallest, margin=smallest)
    kappa = 1.0 / lam
    sigma_n = elementary_symmetric(kappa, n)
    sigma_nk = elementary_symmetric(kappa, n - k)
    speed = (sigma_n / sigma_nk) ** (1.0 / k)
    return CurvatureView(spectrum.grid, k, kappa, kappa.sum(axis=-1), speed)


def convexity_margin(s):
    """
    :param s: a support function `ScalarField`.

    :return: the smallest eigenvalue of r over all nodes.
    """
    return float(radii_eigenvalues(s).smallest.min())
