#-----------------------------------------------------------------------------
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
#-----------------------------------------------------------------------------
"""
The constrained curvature flow in support function form,

    ds/dt = mu(t) phi^(-1/k) - p_k^(-1/k),
    mu(t) = int p_k^((k-1)/k) / int phi^(-1/k) p_k,

which keeps int s p_k fixed and drives p_k towards a multiple of phi.
"""
import logging as _logging

import numpy as _np

from cmflow.core import (ConvexityLostError, StepFailureError, P_FLOOR,
    InadmissiblePrescriptionError)
from cmflow.grid import ScalarField, covariant_gradient
from cmflow.convexity import radii_eigenvalues, elementary_symmetric

log = _logging.getLogger(__name__)

#: Stability interval of the classical RK4 scheme on the negative real axis.
RK4_STABILITY = 2.785

#: Growth factor applied to the previous step size.
DT_GROWTH = 1.2

#: Relative slack allowed on the monotone functional per step.
MONOTONE_SLACK = 1e-10

#: Margin floor, relative to the mean of the support function.
MARGIN_FLOOR = 1e-6


class FlowState(object):
    """
    A snapshot of the flow: the support function s at time t after
    ``step_index`` accepted steps, the global term of the last evaluation,
    the last accepted step size (``None`` before the first step) and the
    pinching constant of its run, once one is fixed.
    """
    __slots__ = ('s', 't', 'step_index', 'last_mu', 'k', 'n', 'dt', 'epsilon0')

    def __init__(self, s, k, t=0.0, step_index=0, last_mu=float('nan'), dt=None,
            epsilon0=None):
        """
        Constructor.

        :param s: support function `ScalarField`.

        :param k: order of the prescribed symmetric function, 1 <= k <= n.

        :param t: flow time.

        :param step_index: number of accepted steps so far.

        :param last_mu: last global term evaluated.

        :param dt: last accepted step size.

        :param epsilon0: pinching constant fixed at the start of the run.
        """
        n = s.grid.n
        if not 1 <= k <= n:
            raise ValueError('k must lie in [1, %d], got %r' % (n, k))
        self.s = s
        self.k = int(k)
        self.n = n
        self.t = float(t)
        self.step_index = int(step_index)
        self.last_mu = float(last_mu)
        self.dt = None if dt is None else float(dt)
        self.epsilon0 = None if epsilon0 is None else float(epsilon0)

    @property
    def grid(self):
        """the grid the support function lives on"""
        return self.s.grid

    def evolve(self, s, **changes):
        """:return: a copy of this state with a new support function."""
        kwargs = dict(t=self.t, step_index=self.step_index,
            last_mu=self.last_mu, dt=self.dt, epsilon0=self.epsilon0)
        kwargs.update(changes)
        return FlowState(s, self.k, **kwargs)

    def __repr__(self):
        return 'FlowState(t=%.6g, step=%d, k=%d, n=%d, mu=%.6g)' % (self.t,
            self.step_index, self.k, self.n, self.last_mu)


class StepReport(object):
    """
    Outcome of one call to `step`: the step size used, the relative drift of
    int s p_k, the change of the monotone functional, the number of
    rejected attempts and whether the step was accepted.
    """
    __slots__ = ('dt', 'drift', 'monotone_delta', 'rejections', 'accepted')

    def __init__(self, dt, drift, monotone_delta, rejections, accepted=True):
        self.dt = dt
        self.drift = drift
        self.monotone_delta = monotone_delta
        self.rejections = rejections
        self.accepted = accepted

    def __repr__(self):
        return ('StepReport(dt=%.3e, drift=%.3e, monotone_delta=%.3e, '
            'rejections=%d, accepted=%r)' % (self.dt, self.drift,
            self.monotone_delta, self.rejections, self.accepted))


def speed_field(phi, k):
    """
    :param phi: the prescription, a positive `ScalarField`.

    :return: f = phi^(-1/k).

    :raise InadmissiblePrescriptionError: if phi is not positive.
    """
    if phi.min() <= 0.0:
        raise InadmissiblePrescriptionError('prescription must be positive, '
            'minimum is %.6g' % phi.min())
    return phi ** (-1.0 / k)


def _pk_values(s, k):
    lam = radii_eigenvalues(s).eigenvalues
    pk = elementary_symmetric(lam, k)
    low = float(pk.min())
    if low <= P_FLOOR:
        raise ConvexityLostError('p_%d dropped to %.6g' % (k, low),
            margin=float(lam.min()))
    return pk, lam


def _rate(s, k, f):
    #   ds/dt, the global term and p_k for the support function s.
    grid = s.grid
    pk, _ = _pk_values(s, k)
    numerator = _np.dot(grid.weights, pk ** ((k - 1.0) / k))
    denominator = _np.dot(grid.weights, f.values * pk)
    mu = numerator / denominator
    return mu * f.values - pk ** (-1.0 / k), mu, pk


def global_term(state, phi):
    """
    :param state: a strictly convex `FlowState`.

    :param phi: the prescription `ScalarField`.

    :return: mu = int p_k^((k-1)/k) / int phi^(-1/k) p_k.
    """
    state.grid.check(phi)
    _, mu, _ = _rate(state.s, state.k, speed_field(phi, state.k))
    return float(mu)


def time_derivative(state, phi):
    """
    :param state: a strictly convex `FlowState`.

    :param phi: the prescription `ScalarField`.

    :return: ds/dt as a `ScalarField`. By the choice of mu,
        int ds/dt p_k vanishes up to round-off.
    """
    state.grid.check(phi)
    rate, _, _ = _rate(state.s, state.k, speed_field(phi, state.k))
    return ScalarField(state.grid, rate)


def conserved_integral(s, k):
    """:return: int s p_k, the quantity the flow preserves."""
    pk, _ = _pk_values(s, k)
    return float(_np.dot(s.grid.weights, s.values * pk))


def enclosed_volume(s):
    """:return: V = 1/(n+1) int s p_n."""
    lam = radii_eigenvalues(s).eigenvalues
    if lam.min() <= 0.0:
        raise ConvexityLostError('support function is not strictly convex',
            margin=float(lam.min()))
    pn = _np.prod(lam, axis=1)
    return float(_np.dot(s.grid.weights, s.values * pn)) / (s.grid.n + 1)


def boundary_points(s):
    """
    :return: the boundary points x(u) = s(u) u + grad s(u) with outer normal
        u, shape (N, n + 1).
    """
    grid = s.grid
    grad = covariant_gradient(s).ambient_gradient()
    return grid.basis * s.values[:, None] + grad


def centroid(s):
    """
    Centroid of the body with support function s, by the divergence theorem:

        C = int x(u) s p_n / ((n + 2) V).

    :param s: a strictly convex support function `ScalarField`.

    :return: a point of R^(n+1).
    """
    grid = s.grid
    lam = radii_eigenvalues(s).eigenvalues
    if lam.min() <= 0.0:
        raise ConvexityLostError('support function is not strictly convex',
            margin=float(lam.min()))
    pn = _np.prod(lam, axis=1)
    density = grid.weights * s.values * pn
    volume = density.sum() / (grid.n + 1)
    moments = (boundary_points(s) * density[:, None]).sum(axis=0)
    return moments / ((grid.n + 2) * volume)


def recenter(state):
    """
    :return: the state translated so that its body's centroid is the origin,
        s(u) - <u, C>.
    """
    c = centroid(state.s)
    shifted = state.s - state.grid.linear_function(c)
    return state.evolve(shifted)


def monotone_functional(s, phi):
    """
    :return: int s phi. The flow rate r has int r phi <= 0 by Hoelder's
        inequality in the quadrature; `step` rejects the rare filtered
        step that raises it. It equals int s~ phi for
        the recentered s~ whenever int u phi = 0.
    """
    return s.grid.integrate(s * phi)


def stable_dt(state, cfl_safety=0.5):
    """
    Step size bound for the explicit scheme from the linearised operator:
    the diffusion coefficient (1/k) p_k^(-(k+1)/k) p_(k-1) times the grid
    stiffness, against the RK4 stability interval.

    :param state: a strictly convex `FlowState`.

    :param cfl_safety: fraction of the stability limit used.
    """
    k = state.k
    pk, lam = _pk_values(state.s, k)
    pkm1 = elementary_symmetric(lam, k - 1)
    diffusion = pk ** (-(k + 1.0) / k) * pkm1 / k
    rho = float(_np.max(diffusion * state.grid.stiffness))
    return cfl_safety * RK4_STABILITY / rho


def _filtered_rate(s, k, f):
    #   mu f - p_k^(-1/k) with both terms polar filtered and mu chosen so that
    #   int rate p_k still vanishes. Zero exactly when the unfiltered rate is.
    grid = s.grid
    pk, _ = _pk_values(s, k)
    ff = grid._module.polar_filter(grid, f.values)
    fg = grid._module.polar_filter(grid, pk ** (-1.0 / k))
    mu = _np.dot(grid.weights, fg * pk) / _np.dot(grid.weights, ff * pk)
    return mu * ff - fg, mu


def _rk4(s, k, f, dt):
    grid = s.grid

    def rate(values):
        return _filtered_rate(ScalarField(grid, values), k, f)

    k1, mu = rate(s.values)
    k2, _ = rate(s.values + 0.5 * dt * k1)
    k3, _ = rate(s.values + 0.5 * dt * k2)
    k4, _ = rate(s.values + dt * k3)
    values = s.values + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return ScalarField(grid, values), mu


def step(state, phi, dt, margin_floor=None, dt_min=1e-14,
        monotone_slack=MONOTONE_SLACK, retry=True):
    """
    Advance the flow by one classical Runge-Kutta step, halving and retrying
    while the result loses convexity (margin below ``margin_floor``) or
    increases the monotone functional beyond ``monotone_slack``.

    :param state: a strictly convex `FlowState`.

    :param phi: the prescription `ScalarField`.

    :param dt: the step size to try first.

    :param margin_floor: smallest accepted convexity margin. Default:
        1e-6 times the mean of s.

    :param dt_min: step sizes below this raise `StepFailureError`.

    :param retry: if False, a failed attempt is not retried; the input
        state is returned with a report whose ``accepted`` flag is False.

    :return: a tuple (new `FlowState`, `StepReport`).
    """
    if dt <= 0.0:
        raise ValueError('dt must be positive, got %r' % (dt,))
    grid = state.grid
    grid.check(phi)
    k = state.k
    f = speed_field(phi, k)
    s = state.s
    if margin_floor is None:
        margin_floor = MARGIN_FLOOR * s.mean()
    q_old = conserved_integral(s, k)
    j_old = monotone_functional(s, phi)
    rejections = 0
    while True:
        if dt < dt_min:
            raise StepFailureError('step size underflow (dt=%.3e) at t=%.6g'
                % (dt, state.t))
        try:
            s_new, mu = _rk4(s, k, f, dt)
            margin = float(radii_eigenvalues(s_new).smallest.min())
            if margin < margin_floor:
                raise ConvexityLostError('margin %.3e below floor' % margin,
                    margin=margin)
            j_new = monotone_functional(s_new, phi)
        except (ConvexityLostError, ValueError) as exc:
            #   ValueError: a stage produced non-finite values.
            log.debug('rejected dt=%.3e at t=%.6g: %s', dt, state.t, exc)
            if not retry:
                return state, StepReport(dt, 0.0, 0.0, 1, accepted=False)
            rejections += 1
            dt *= 0.5
            continue
        if j_new - j_old > monotone_slack * abs(j_old):
            log.debug('rejected dt=%.3e at t=%.6g: functional rose by %.3e',
                dt, state.t, j_new - j_old)
            if not retry:
                return state, StepReport(dt, 0.0, j_new - j_old, 1,
                    accepted=False)
            rejections += 1
            dt *= 0.5
            continue
        break
    q_new = conserved_integral(s_new, k)
    report = StepReport(dt, (q_new - q_old) / q_old, j_new - j_old, rejections)
    new_state = state.evolve(s_new, t=state.t + dt,
        step_index=state.step_index + 1, last_mu=mu, dt=dt)
    log.debug('step %d: t=%.6g dt=%.3e drift=%.3e', new_state.step_index,
        new_state.t, dt, report.drift)
    return new_state, report
