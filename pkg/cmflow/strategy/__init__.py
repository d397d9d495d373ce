#-----------------------------------------------------------------------------
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
#-----------------------------------------------------------------------------
"""
Shared discretisation logic for the various sphere geometries.
"""
import math as _math

import numpy as _np
from numpy.polynomial import legendre as _legendre
from scipy import fft as _fft
from scipy import special as _special

#: Number of points in every theta stencil.
STENCIL_WIDTH = 5

#: Number of ghost rows added beyond each pole.
GHOST_ROWS = STENCIL_WIDTH // 2


def sphere_area(n):
    """
    :param n: dimension of the sphere S^n.

    :return: the surface measure |S^n| = 2 pi^((n+1)/2) / Gamma((n+1)/2).
    """
    return 2.0 * _math.pi ** ((n + 1) / 2.0) / _math.gamma((n + 1) / 2.0)


def gauss_nodes(ntheta, n):
    """
    Gauss nodes in x = cos(theta) for the zonal measure sin^(n-1)(theta) d theta.

    For n = 2 these are the Gauss-Legendre points, for n > 2 the
    Gauss-Gegenbauer points with parameter (n - 1) / 2, so that polynomials in
    cos(theta) up to degree 2 * ntheta - 1 integrate exactly.

    :param ntheta: number of nodes.

    :param n: dimension of the sphere.

    :return: a tuple (theta, weights) with theta ascending in (0, pi) and
        weights summing to the integral of (1 - x^2)^((n-2)/2) over [-1, 1].
    """
    if n == 2:
        x, w = _legendre.leggauss(ntheta)
    else:
        x, w = _special.roots_gegenbauer(ntheta, (n - 1) / 2.0)
    order = _np.argsort(-x)
    x = x[order]
    w = w[order]
    theta = _np.arccos(x)
    #   Nodes come in pairs x, -x; symmetrise to make the antipodal map exact.
    theta = 0.5 * (theta + (_np.pi - theta[::-1]))
    w = 0.5 * (w + w[::-1])
    return theta, w


def fornberg_weights(x0, x, m):
    """
    Finite difference weights on arbitrarily spaced nodes (Fornberg's
    recursion).

    :param x0: the point the derivatives are taken at.

    :param x: sequence of node positions.

    :param m: highest derivative order required.

    :return: an array c of shape (m + 1, len(x)) where c[d] holds the weights
        of the d-th derivative.
    """
    x = _np.asarray(x, dtype=float)
    npts = len(x)
    c = _np.zeros((m + 1, npts))
    c1 = 1.0
    c4 = x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, npts):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for d in range(mn, 0, -1):
                    c[d, i] = c1 * (d * c[d - 1, i - 1] - c5 * c[d, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for d in range(mn, 0, -1):
                c[d, j] = (c4 * c[d, j] - d * c[d - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


def extended_theta(theta):
    """
    :param theta: ascending interior nodes.

    :return: the nodes continued through both poles, GHOST_ROWS on each side
        (-theta reflected at 0, 2 pi - theta reflected at pi).
    """
    top = -theta[:GHOST_ROWS][::-1]
    bottom = 2.0 * _np.pi - theta[-GHOST_ROWS:][::-1]
    return _np.concatenate([top, theta, bottom])


def theta_stencils(theta):
    """
    :param theta: ascending interior nodes.

    :return: a tuple (d1, d2) of arrays with shape (ntheta, STENCIL_WIDTH)
        holding first and second derivative weights for every node, to be
        applied to the rows of an extended array (see `extend_rows`).
    """
    ext = extended_theta(theta)
    ntheta = len(theta)
    d1 = _np.empty((ntheta, STENCIL_WIDTH))
    d2 = _np.empty((ntheta, STENCIL_WIDTH))
    for i in range(ntheta):
        c = fornberg_weights(theta[i], ext[i:i + STENCIL_WIDTH], 2)
        d1[i] = c[1]
        d2[i] = c[2]
    return d1, d2


def extend_rows(values, ghost_top, ghost_bottom):
    """
    Stack ghost rows onto an array indexed by theta along axis 0.

    :param values: array with ntheta rows.

    :param ghost_top: the values of the rows continued through theta = 0, in
        order of the extended nodes (furthest first).

    :param ghost_bottom: the values continued through theta = pi, nearest
        first.
    """
    return _np.concatenate([ghost_top, values, ghost_bottom], axis=0)


def apply_stencil(weights, extended):
    """
    :param weights: stencil weights, shape (ntheta, STENCIL_WIDTH).

    :param extended: array with ntheta + 2 * GHOST_ROWS rows.

    :return: the weighted sums, an array with ntheta rows.
    """
    ntheta = weights.shape[0]
    trailing = (slice(None),) + (None,) * (extended.ndim - 1)
    out = _np.zeros((ntheta,) + extended.shape[1:])
    for j in range(STENCIL_WIDTH):
        out += weights[:, j][trailing] * extended[j:j + ntheta]
    return out


def azimuthal_wavenumbers(nphi):
    """:return: the non-negative integer wavenumbers of a real FFT of length nphi."""
    return _np.round(_fft.rfftfreq(nphi, d=1.0 / nphi))


def phi_derivatives(values):
    """
    Spectral derivatives along the periodic azimuth (last axis).

    :param values: real array with nphi samples along the last axis, nphi even.

    :return: a tuple (first, second) of derivative arrays. The Nyquist mode
        is dropped from the first derivative and kept in the second.
    """
    nphi = values.shape[-1]
    m = azimuthal_wavenumbers(nphi)
    coeffs = _fft.rfft(values, axis=-1)
    d1 = 1j * m * coeffs
    d1[..., -1] = 0.0
    d2 = -(m ** 2) * coeffs
    first = _fft.irfft(d1, n=nphi, axis=-1)
    second = _fft.irfft(d2, n=nphi, axis=-1)
    return first, second


def polar_cutoffs(theta, nphi):
    """
    :return: the largest azimuthal wavenumber the polar filter leaves
        undamped on each ring, max(2, ceil(nphi / 2 * sin(theta))).
    """
    cut = _np.ceil(0.5 * nphi * _np.sin(theta))
    return _np.maximum(cut, 2.0)


def filter_rings(values, cutoffs):
    """
    Damp the azimuthal Fourier modes above each ring's cutoff: mode m is
    scaled by (cutoff / m)^2, which caps its stiffness at that of the cutoff
    mode. The scaling is invertible, so the result vanishes only where
    ``values`` does.

    :param values: real array of shape (ntheta, nphi).

    :param cutoffs: per-ring largest wavenumber left untouched.
    """
    nphi = values.shape[-1]
    m = azimuthal_wavenumbers(nphi)
    coeffs = _fft.rfft(values, axis=-1)
    ratio = cutoffs[:, None] / _np.maximum(m[None, :], 1.0)
    coeffs *= _np.minimum(ratio, 1.0) ** 2
    return _fft.irfft(coeffs, n=nphi, axis=-1)


def sym2_eigenvalues(a, b, c):
    """
    Closed-form eigenvalues of the symmetric matrices [[a, b], [b, c]].

    :return: a tuple (lower, upper), elementwise ascending.
    """
    mean = 0.5 * (a + c)
    radius = _np.hypot(0.5 * (a - c), b)
    return mean - radius, mean + radius
