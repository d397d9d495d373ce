#-----------------------------------------------------------------------------
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
#-----------------------------------------------------------------------------
"""
Quantities monitored along the flow: the conserved and monotone integrals,
the limit constant gamma and residual, pinching, widths, volume and centroid.
"""
import numpy as _np
from scipy.special import comb as _comb

from cmflow.core import InadmissiblePrescriptionError, Subscriber
from cmflow.convexity import (radii_eigenvalues, radii_form, radii_spectrum,
    curvature_view)
from cmflow.flow import (conserved_integral, centroid, recenter, global_term,
    enclosed_volume, _pk_values)

#: Floor applied to the upper Hessian bound of the speed function.
BETA_FLOOR = 1e-12

#: Fixed part of the CSV header; centroid columns follow.
BASE_COLUMNS = ('t', 'mu', 'conserved', 'weighted_mean', 'gamma',
    'residual_linf', 'pinch_margin', 'kappa_min', 'kappa_max', 'w_minus',
    'w_plus', 'volume')


def header(n):
    """
    :param n: sphere dimension.

    :return: the column names of a diagnostics table for bodies in R^(n+1).
    """
    return list(BASE_COLUMNS) + ['centroid_%d' % (i + 1) for i in range(n + 1)]


class DiagnosticsRecord(object):
    """One row of the diagnostics time series."""
    __slots__ = BASE_COLUMNS + ('centroid',)

    def __init__(self, **fields):
        for name in self.__slots__:
            setattr(self, name, fields[name])

    def as_row(self):
        """:return: the record as a list of floats in CSV column order."""
        row = [float(getattr(self, name)) for name in BASE_COLUMNS]
        row.extend(float(c) for c in self.centroid)
        return row

    def __repr__(self):
        return ('DiagnosticsRecord(t=%.6g, mu=%.6g, gamma=%.6g, '
            'residual=%.3e, pinch=%.3e)' % (self.t, self.mu, self.gamma,
            self.residual_linf, self.pinch_margin))


class DiagnosticsRecorder(Subscriber):
    """A concrete Subscriber keeping every record it receives."""

    def __init__(self):
        self.records = []

    def update(self, data):
        self.records.append(data)


def conserved_quantity(state):
    """:return: int s p_k, invariant along the flow and under translations."""
    return conserved_integral(state.s, state.k)


def weighted_mean(state, phi):
    """
    :return: int s~ phi over the sphere, s~ the support function of the body
        translated to have its centroid at the origin.
    """
    return state.grid.integrate(recenter(state).s * phi)


def weighted_mean_rate(state, phi):
    """
    :return: d/dt int s phi = mu int phi^((k-1)/k) - int phi p_k^(-1/k).
        Never positive; zero exactly when p_k / phi is constant.
    """
    grid = state.grid
    k = state.k
    pk, _ = _pk_values(state.s, k)
    mu = global_term(state, phi)
    rate = (mu * _np.dot(grid.weights, phi.values ** ((k - 1.0) / k))
        - _np.dot(grid.weights, phi.values * pk ** (-1.0 / k)))
    return float(rate)


def gamma_value(state, phi):
    """:return: gamma = int s~ p_k / int s~ phi on the recentered body."""
    centered = recenter(state)
    grid = state.grid
    pk, _ = _pk_values(centered.s, state.k)
    num = _np.dot(grid.weights, centered.s.values * pk)
    den = grid.integrate(centered.s * phi)
    return float(num / den)


def residual(state, phi):
    """:return: sup |p_k / (gamma phi) - 1| over the nodes."""
    pk, _ = _pk_values(state.s, state.k)
    gamma = gamma_value(state, phi)
    return float(_np.max(_np.abs(pk / (gamma * phi.values) - 1.0)))


def pinching_ratio(state):
    """:return: min over nodes of kappa_min / H."""
    view = curvature_view(radii_eigenvalues(state.s), state.k)
    return float(_np.min(view.kappa_min / view.mean_curvature))


def pinching_margin(state, epsilon0):
    """
    :return: min over nodes of (kappa_min - epsilon0 H) / H. Non-negative
        while the pinching h_ij >= epsilon0 H g_ij holds.
    """
    return pinching_ratio(state) - epsilon0


def epsilon0_recipe(initial, f):
    """
    A constructive pinching constant for the flow started at ``initial``
    with speed function f = phi^(-1/k):

        alpha = 1 + min(min eig hess f / f),  beta = max eig hess f,
        eps0 = min(0.99 pinch(initial), 0.9 alpha / (n (1 + beta / min f))).

    :raise InadmissiblePrescriptionError: unless hess f + f g-bar > 0.
    """
    lam = radii_spectrum(radii_form(f)).eigenvalues
    f_vals = f.values
    lowest = lam[:, 0]
    if lowest.min() <= 0.0:
        raise InadmissiblePrescriptionError('hess f + f g is not positive '
            'definite (min eigenvalue %.6g)' % lowest.min())
    alpha = float(_np.min(lowest / f_vals))
    beta = max(BETA_FLOOR, float(_np.max(lam[:, -1] - f_vals)))
    n = initial.n
    cap = 0.9 * alpha / (n * (1.0 + beta / f_vals.min()))
    return min(0.99 * pinching_ratio(initial), cap)


def widths(state):
    """
    :return: the minimum and maximum width (w-, w+) of s(u) + s(-u). The
        antipodal map is exact on the grid.
    """
    s = state.s.values
    w = s + s[state.grid.antipodal_index()]
    return float(w.min()), float(w.max())


def volume(state):
    """:return: the enclosed volume 1/(n+1) int s p_n."""
    return enclosed_volume(state.s)


def support_bounds(state):
    """
    Bounds controlled along the flow for the recentered body.

    :return: a dict with ``min_support`` and ``max_support`` of s~, the
        in-radius lower bound ``inner_radius`` = w- / (n + 2), the outer
        radius bound ``outer_radius`` = (n + 1) w+ / (n + 2) and
        ``conserved_radius`` b = (int s p_k / (C(n, k) |S^n|))^(1/(k+1)),
        the radius of the sphere with the same conserved integral; b <= max s~.
    """
    centered = recenter(state)
    n = state.n
    w_minus, w_plus = widths(centered)
    b = (conserved_quantity(state) / (_comb(n, state.k) * state.grid.area)) ** (
        1.0 / (state.k + 1))
    return {
        'min_support': centered.s.min(),
        'max_support': centered.s.max(),
        'inner_radius': w_minus / (n + 2.0),
        'outer_radius': (n + 1.0) * w_plus / (n + 2.0),
        'conserved_radius': b,
    }


def record(state, phi, epsilon0):
    """
    :return: the `DiagnosticsRecord` of ``state`` for the prescription phi.
    """
    lam = radii_eigenvalues(state.s)
    view = curvature_view(lam, state.k)
    c = centroid(state.s)
    w_minus, w_plus = widths(state)
    return DiagnosticsRecord(
        t=state.t,
        mu=global_term(state, phi),
        conserved=conserved_quantity(state),
        weighted_mean=weighted_mean(state, phi),
        gamma=gamma_value(state, phi),
        residual_linf=residual(state, phi),
        pinch_margin=float(_np.min(view.kappa_min / view.mean_curvature)) - epsilon0,
        kappa_min=float(view.kappa_min.min()),
        kappa_max=float(view.kappa_max.max()),
        w_minus=w_minus,
        w_plus=w_plus,
        volume=volume(state),
        centroid=tuple(float(x) for x in c),
    )
