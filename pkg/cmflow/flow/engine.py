#-----------------------------------------------------------------------------
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
#-----------------------------------------------------------------------------
"""Driving the constrained flow to its limit."""
import logging as _logging

from cmflow.core import (Publisher, ConfigurationError, ConvexityLostError,
    ConvergenceError, InadmissiblePrescriptionError)
from cmflow.grid import ScalarField
from cmflow.convexity import convexity_margin
from cmflow.flow import (FlowState, DT_GROWTH, speed_field, global_term,
    conserved_integral, recenter, stable_dt, step)
from cmflow import diagnostics as _diagnostics

log = _logging.getLogger(__name__)

#: Recentering modes understood by `FlowEngine`.
RECENTERING_MODES = ('diagnostic', 'periodic')


class FlowResult(object):
    """
    Outcome of a converged run.

    ``state`` is the final state translated to centroid zero, ``solution``
    the rescaled support function gamma^(-1/k) s~ with p_k = phi.
    """
    __slots__ = ('state', 'solution', 'gamma', 'mu', 'residual', 'status',
        'mu_min', 'mu_max', 'conserved_drift', 'epsilon0', 'records')

    def __init__(self, **fields):
        for name in self.__slots__:
            setattr(self, name, fields.get(name))

    def __repr__(self):
        return ('FlowResult(status=%r, t=%.6g, gamma=%.6g, mu=%.6g, '
            'residual=%.3e)' % (self.status, self.state.t, self.gamma,
            self.mu, self.residual))


class FlowEngine(Publisher):
    """
    Owns one `FlowState` and advances it with step size control. Every
    ``every_steps`` accepted steps a `DiagnosticsRecord` is published to the
    attached subscribers.
    """

    def __init__(self, state, phi, epsilon0=None, cfl_safety=0.5, dt0=None,
            recentering='diagnostic', recenter_every=0, every_steps=10):
        """
        Constructor.

        :param state: a strictly convex initial `FlowState`.

        :param phi: the prescription, a positive `ScalarField` on the same grid.

        :param epsilon0: pinching constant used for the pinching margin.
            Taken from ``state`` when it carries one (a resumed run),
            otherwise computed from the initial state and phi.

        :param cfl_safety: fraction of the stable step used.

        :param dt0: first step size (capped by the stable step). Default: the
            stable step.

        :param recentering: ``'diagnostic'`` leaves the state untranslated,
            ``'periodic'`` recenters it every ``recenter_every`` steps.

        :param every_steps: diagnostics cadence in accepted steps.
        """
        super(FlowEngine, self).__init__()
        if recentering not in RECENTERING_MODES:
            raise ConfigurationError('recentering.mode must be one of %s, '
                'got %r' % (', '.join(RECENTERING_MODES), recentering))
        if recentering == 'periodic' and recenter_every < 1:
            raise ConfigurationError('recentering.every must be >= 1 for '
                'periodic recentering, got %r' % (recenter_every,))
        if every_steps < 1:
            raise ConfigurationError('output.every_steps must be >= 1, got %r'
                % (every_steps,))
        state.grid.check(phi)
        margin = convexity_margin(state.s)
        if margin <= 0.0:
            raise ConvexityLostError('initial body is not strictly convex '
                '(margin %.6g)' % margin, margin=margin)
        f = speed_field(phi, state.k)
        if epsilon0 is None:
            epsilon0 = state.epsilon0
        if epsilon0 is None:
            try:
                epsilon0 = _diagnostics.epsilon0_recipe(state, f)
            except InadmissiblePrescriptionError as exc:
                epsilon0 = 0.99 * _diagnostics.pinching_ratio(state)
                log.warning('%s; pinching constant falls back to %.6g',
                    exc, epsilon0)
        self.phi = phi
        self.epsilon0 = float(epsilon0)
        self.cfl_safety = float(cfl_safety)
        self.dt0 = dt0
        self.recentering = recentering
        self.recenter_every = int(recenter_every)
        self.every_steps = int(every_steps)
        self.records = []
        self._state = state.evolve(state.s, epsilon0=self.epsilon0)
        self._conserved0 = conserved_integral(state.s, state.k)
        mu = global_term(state, phi)
        self.mu_min = mu
        self.mu_max = mu
        self._last_emitted = None

    @property
    def state(self):
        """the current `FlowState`"""
        return self._state

    def next_dt(self):
        """
        :return: the step size for the next attempt, the stable step capped
            by growth over the previous accepted step.
        """
        dt_cfl = stable_dt(self._state, self.cfl_safety)
        previous = self._state.dt
        if previous is None:
            return dt_cfl if self.dt0 is None else min(float(self.dt0), dt_cfl)
        return min(dt_cfl, previous * DT_GROWTH)

    def emit(self):
        """Publish the `DiagnosticsRecord` of the current state."""
        rec = _diagnostics.record(self._state, self.phi, self.epsilon0)
        self.records.append(rec)
        self._last_emitted = self._state.step_index
        self.notify(rec)
        return rec

    def advance(self):
        """
        Take one accepted step.

        :return: the `StepReport` of the step.
        """
        state, report = step(self._state, self.phi, self.next_dt())
        self.mu_min = min(self.mu_min, state.last_mu)
        self.mu_max = max(self.mu_max, state.last_mu)
        if (self.recentering == 'periodic'
                and state.step_index % self.recenter_every == 0):
            state = recenter(state)
            log.info('recentered at step %d (t=%.6g)', state.step_index, state.t)
        self._state = state
        if state.step_index % self.every_steps == 0:
            self.emit()
        return report

    def residual(self):
        """:return: sup |p_k / (gamma phi) - 1| for the current state."""
        return _diagnostics.residual(self._state, self.phi)

    def run(self, residual_tol=1e-3, t_max=200.0, max_steps=200000):
        """
        Advance until the residual drops to ``residual_tol``.

        :return: a `FlowResult`.

        :raise ConvergenceError: if t passes ``t_max`` or ``max_steps`` steps
            are taken first. The exception carries the last state.
        """
        if residual_tol <= 0.0:
            raise ValueError('residual_tol must be positive, got %r'
                % (residual_tol,))
        if self._last_emitted is None:
            self.emit()
        while True:
            res = self.residual()
            if res <= residual_tol:
                break
            state = self._state
            if state.t > t_max:
                raise ConvergenceError('t_max=%g reached with residual %.3e'
                    % (t_max, res), state=state)
            if state.step_index >= max_steps:
                raise ConvergenceError('max_steps=%d reached with residual '
                    '%.3e' % (max_steps, res), state=state)
            self.advance()
        if self._last_emitted != self._state.step_index:
            self.emit()
        return self.result(res)

    def result(self, res=None):
        """:return: the `FlowResult` for the current state."""
        state = self._state
        k = state.k
        if res is None:
            res = self.residual()
        centered = recenter(state)
        gamma = _diagnostics.gamma_value(state, self.phi)
        mu = global_term(state, self.phi)
        drift = (conserved_integral(state.s, k) - self._conserved0) / self._conserved0
        log.info('converged at t=%.6g after %d steps: gamma=%.6g mu=%.6g '
            'residual=%.3e', state.t, state.step_index, gamma, mu, res)
        return FlowResult(
            state=centered,
            solution=centered.s * gamma ** (-1.0 / k),
            gamma=gamma,
            mu=mu,
            residual=res,
            status='converged',
            mu_min=self.mu_min,
            mu_max=self.mu_max,
            conserved_drift=drift,
            epsilon0=self.epsilon0,
            records=list(self.records),
        )


def run_flow(initial, phi, k=None, residual_tol=1e-3, t_max=200.0,
        max_steps=200000, subscribers=(), **options):
    """
    Run the flow from ``initial`` until p_k / phi is constant to
    ``residual_tol``.

    :param initial: a `FlowState`, or a support function `ScalarField`
        together with ``k``.

    :param phi: the prescription `ScalarField`.

    :param subscribers: `Subscriber` objects receiving diagnostics records.

    :param options: further keyword arguments of `FlowEngine`.

    :return: a `FlowResult`.
    """
    if isinstance(initial, ScalarField):
        if k is None:
            raise ValueError('k is required when starting from a support function')
        initial = FlowState(initial, k)
    elif k is not None and k != initial.k:
        raise ValueError('k=%r does not match the initial state (k=%d)'
            % (k, initial.k))
    engine = FlowEngine(initial, phi, **options)
    for subscriber in subscribers:
        engine.attach(subscriber)
    return engine.run(residual_tol=residual_tol, t_max=t_max,
        max_steps=max_steps)
