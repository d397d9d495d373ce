#-----------------------------------------------------------------------------
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
#-----------------------------------------------------------------------------
"""
Weakly admissible prescriptions, solved as a limit of strictly admissible
ones.

For tau in [0, 1) the body L_tau with support function
(1 - tau) + tau phi^(-1/k) is translated by the point z_tau that makes

    phi_tau = ((1 - tau) + tau phi^(-1/k) - <u, z_tau>)^(-k)

satisfy int u phi_tau = 0. The radii form of phi_tau^(-1/k) is
(1 - tau) g-bar + tau r(phi^(-1/k)), positive definite for tau < 1 even when
phi is only weakly admissible.
"""
import logging as _logging

import numpy as _np
from scipy.special import comb as _comb

from cmflow.core import (ConvergenceError, ConvexityLostError,
    InadmissiblePrescriptionError, StepFailureError)
from cmflow.convexity import convexity_margin
from cmflow.flow import FlowState, speed_field
from cmflow.flow.engine import run_flow
from cmflow import diagnostics as _diagnostics

log = _logging.getLogger(__name__)

#: Classification labels returned by `admissibility_check`.
STRICT = 'strict'
WEAK = 'weak'
INADMISSIBLE = 'inadmissible'

#: Default tolerance of the integral condition |int u phi| / int phi.
INT_TOL = 1e-8

#: Default convexity tolerance, relative to the mean of phi^(-1/k).
CONV_TOL_SCALE = 1e-8


class Admissibility(object):
    """
    Outcome of `admissibility_check`: the classification, the smallest
    eigenvalue of the radii form of phi^(-1/k), the relative integral
    imbalance |int u phi| / int phi and the tolerances applied.
    """
    __slots__ = ('classification', 'margin', 'integral_ratio', 'conv_tol',
        'int_tol')

    def __init__(self, classification, margin, integral_ratio, conv_tol, int_tol):
        self.classification = classification
        self.margin = margin
        self.integral_ratio = integral_ratio
        self.conv_tol = conv_tol
        self.int_tol = int_tol

    @property
    def admissible(self):
        """True for strict and weak prescriptions"""
        return self.classification != INADMISSIBLE

    def as_dict(self):
        """:return: the fields as a plain dictionary."""
        return dict((name, getattr(self, name)) for name in self.__slots__)

    def __str__(self):
        return '%s (margin=%.6g, |int u phi|/int phi=%.3e)' % (
            self.classification, self.margin, self.integral_ratio)

    def __repr__(self):
        return 'Admissibility(%r, margin=%.6g, integral_ratio=%.3e)' % (
            self.classification, self.margin, self.integral_ratio)


class ContinuationStage(object):
    """One converged stage of a continuation run."""
    __slots__ = ('tau', 'z', 'z_norm', 'gamma', 'residual', 'solution', 'steps')

    def __init__(self, tau, z, gamma, residual, solution, steps):
        self.tau = tau
        self.z = z
        self.z_norm = float(_np.linalg.norm(z))
        self.gamma = gamma
        self.residual = residual
        self.solution = solution
        self.steps = steps

    def __repr__(self):
        return 'ContinuationStage(tau=%.6g, |z|=%.3e, gamma=%.6g, residual=%.3e)' % (
            self.tau, self.z_norm, self.gamma, self.residual)


class ContinuationResult(object):
    """
    The stages of a continuation run together with the last stage's
    solution, its residual against phi itself and its convexity margin.
    """
    __slots__ = ('stages', 'solution', 'residual', 'margin', 'z_bound')

    def __init__(self, stages, solution, residual, margin, z_bound):
        self.stages = stages
        self.solution = solution
        self.residual = residual
        self.margin = margin
        self.z_bound = z_bound

    @property
    def taus(self):
        """the tau values of the stages"""
        return [stage.tau for stage in self.stages]

    @property
    def z_trajectory(self):
        """the translation points z_tau, one per stage"""
        return [stage.z for stage in self.stages]

    def __repr__(self):
        return 'ContinuationResult(stages=%d, residual=%.3e, margin=%.6g)' % (
            len(self.stages), self.residual, self.margin)


def make_phi_tau(phi, tau, z, k):
    """
    :param phi: the prescription `ScalarField`.

    :param tau: homotopy parameter, 0 <= tau < 1.

    :param z: a point of R^(n+1) interior to L_tau.

    :param k: order of the problem.

    :return: phi_tau as a `ScalarField`.

    :raise InadmissiblePrescriptionError: if z is not interior to L_tau.
    """
    if not 0.0 <= tau < 1.0:
        raise ValueError('tau must lie in [0, 1), got %r' % (tau,))
    grid = phi.grid
    base = (1.0 - tau) + tau * speed_field(phi, k) - grid.linear_function(z)
    if base.min() <= 0.0:
        raise InadmissiblePrescriptionError('z=%r lies outside L_tau for '
            'tau=%g (min support %.6g)' % (tuple(z), tau, base.min()))
    return base ** (-float(k))


def _entropy(values, weights, k):
    if k == 1:
        return -float(_np.dot(weights, _np.log(values)))
    return float(_np.dot(weights, values ** (1.0 - k))) / (k - 1.0)


def solve_translation(s_L, k, max_iter=100, tol=1e-10):
    """
    Find the interior point z of the body with support function s_L where
    int u (s_L - <u, z>)^(-k) vanishes, by damped Newton iteration on the
    strictly convex entropy -int log s (k = 1) or int s^(1-k) / (k - 1).

    :param s_L: a positive support function `ScalarField`.

    :param k: order of the problem.

    :param max_iter: Newton iteration limit.

    :param tol: tolerance on |int u s^(-k)| / int s^(-k).

    :return: z, a point of R^(n+1).

    :raise ConvergenceError: if the iteration does not converge.
    """
    grid = s_L.grid
    if s_L.min() <= 0.0:
        raise InadmissiblePrescriptionError('support function must be '
            'positive, minimum is %.6g' % s_L.min())
    axes = list(grid.active_axes)
    b = grid.basis[:, axes]
    w = grid.weights
    v = _np.zeros(len(axes))
    s = s_L.values.copy()
    objective = _entropy(s, w, k)
    for iteration in range(max_iter + 1):
        sk = s ** (-float(k))
        gradient = b.T.dot(w * sk)
        scale = float(_np.dot(w, sk))
        norm = float(_np.linalg.norm(gradient)) / scale
        log.debug('translation solve %d: |grad|=%.3e min s=%.6g',
            iteration, norm, s.min())
        if norm <= tol:
            z = _np.zeros(grid.n + 1)
            z[axes] = v
            return z
        if iteration == max_iter:
            break
        jacobian = k * (b * (w * s ** (-k - 1.0))[:, None]).T.dot(b)
        delta = -_np.linalg.solve(jacobian, gradient)
        floor = 0.1 * s.min()
        alpha = 1.0
        while True:
            trial = s_L.values - b.dot(v + alpha * delta)
            if trial.min() >= floor:
                trial_objective = _entropy(trial, w, k)
                if trial_objective <= objective:
                    break
            alpha *= 0.5
            if alpha < 1e-12:
                raise ConvergenceError('translation line search stalled at '
                    '|grad|=%.3e' % norm)
        v = v + alpha * delta
        s = trial
        objective = trial_objective
    raise ConvergenceError('translation solve did not converge in %d '
        'iterations (|grad|=%.3e)' % (max_iter, norm))


def admissibility_check(phi, k, conv_tol=None, int_tol=INT_TOL):
    """
    Classify a prescription.

    strict: the radii form of phi^(-1/k) has smallest eigenvalue above
    ``conv_tol`` and |int u phi| / int phi <= ``int_tol``. weak: the smallest
    eigenvalue lies in [-conv_tol, conv_tol] and the integral condition
    holds. Anything else is inadmissible.

    :param phi: the prescription `ScalarField`.

    :param k: order of the problem.

    :param conv_tol: convexity tolerance. Default: 1e-8 times the mean of
        phi^(-1/k).

    :param int_tol: tolerance of the integral condition.

    :return: an `Admissibility` instance.

    :raise InadmissiblePrescriptionError: if phi is not positive.
    """
    grid = phi.grid
    f = speed_field(phi, k)
    if conv_tol is None:
        conv_tol = CONV_TOL_SCALE * f.mean()
    margin = convexity_margin(f)
    ratio = float(_np.linalg.norm(grid.moment(phi))) / grid.integrate(phi)
    if ratio > int_tol:
        label = INADMISSIBLE
    elif margin > conv_tol:
        label = STRICT
    elif margin >= -conv_tol:
        label = WEAK
    else:
        label = INADMISSIBLE
    return Admissibility(label, margin, ratio, float(conv_tol), float(int_tol))


def tau_schedule(tau0=0.5, rho=0.5, delta=1e-3):
    """
    :return: the ascending stages tau_j = 1 - (1 - tau0) rho^j below
        1 - delta, followed by 1 - delta itself.
    """
    if not 0.0 <= tau0 < 1.0:
        raise ValueError('tau0 must lie in [0, 1), got %r' % (tau0,))
    if not 0.0 < rho < 1.0:
        raise ValueError('rho must lie in (0, 1), got %r' % (rho,))
    if not 0.0 < delta < 1.0:
        raise ValueError('delta must lie in (0, 1), got %r' % (delta,))
    end = 1.0 - delta
    taus = []
    gap = 1.0 - tau0
    while 1.0 - gap < end:
        taus.append(1.0 - gap)
        gap *= rho
    taus.append(end)
    return taus


def _initial_sphere(phi_tau, k):
    #   The sphere whose p_k equals the mean of phi_tau.
    n = phi_tau.grid.n
    radius = (phi_tau.mean() / _comb(n, k)) ** (1.0 / k)
    return phi_tau.grid.constant(radius)


def continuation_run(phi, k, schedule=None, initial=None, residual_tol=1e-3,
        t_max=200.0, max_steps=200000, subscribers=(), **options):
    """
    Solve p_k = phi_tau for every tau of ``schedule``, each stage warm
    started from the solution of the previous one.

    :param phi: a weakly (or strictly) admissible prescription.

    :param k: order of the problem.

    :param schedule: ascending tau values. Default: `tau_schedule()`.

    :param initial: starting support function of the first stage. Default:
        the sphere with p_k equal to the mean of the first phi_tau.

    :param options: keyword arguments passed on to `run_flow`.

    :return: a `ContinuationResult`.

    :raise ConvergenceError: naming tau if any stage fails.
    """
    if schedule is None:
        schedule = tau_schedule()
    schedule = list(schedule)
    if not schedule:
        raise ValueError('empty tau schedule')
    f = speed_field(phi, k)
    z_bound = 1.0 + f.max()
    stages = []
    s = initial
    for tau in schedule:
        s_L = (1.0 - tau) + tau * f
        z = solve_translation(s_L, k)
        if _np.linalg.norm(z) > z_bound:
            log.warning('|z_tau|=%.6g exceeds %.6g at tau=%g',
                _np.linalg.norm(z), z_bound, tau)
        phi_tau = make_phi_tau(phi, tau, z, k)
        if s is None:
            s = _initial_sphere(phi_tau, k)
        try:
            result = run_flow(FlowState(s, k), phi_tau,
                residual_tol=residual_tol, t_max=t_max, max_steps=max_steps,
                subscribers=subscribers, **options)
        except ConvergenceError as exc:
            raise ConvergenceError('stage tau=%g failed: %s' % (tau, exc),
                state=exc.state, tau=tau)
        except (ConvexityLostError, StepFailureError) as exc:
            raise ConvergenceError('stage tau=%g failed: %s' % (tau, exc),
                tau=tau)
        stage = ContinuationStage(tau, z, result.gamma, result.residual,
            result.solution, result.state.step_index)
        log.info('tau=%.6g |z|=%.3e gamma=%.6g residual=%.3e steps=%d',
            tau, stage.z_norm, stage.gamma, stage.residual, stage.steps)
        stages.append(stage)
        s = result.solution
    final = stages[-1].solution
    final_state = FlowState(final, k)
    res = _diagnostics.residual(final_state, phi)
    margin = convexity_margin(final)
    log.info('continuation finished: residual against phi %.3e, margin %.6g',
        res, margin)
    return ContinuationResult(stages, final, res, margin, z_bound)
