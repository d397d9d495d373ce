import logging
import math

import numpy as np
import pytest

from cmflow.core import ConfigurationError, ConvergenceError, ConvexityLostError
from cmflow.grid import build_grid
from cmflow.flow import FlowState, conserved_integral
from cmflow.flow.engine import FlowEngine, run_flow
from cmflow.diagnostics import DiagnosticsRecorder, pinching_ratio
from cmflow.contrib.oracle import BodySpec


@pytest.fixture(scope='module')
def converged():
    grid = build_grid('FullS2', 16, 32)
    s = BodySpec('ellipsoid', axes=(1.1, 1.0, 0.95)).support(grid)
    recorder = DiagnosticsRecorder()
    result = run_flow(s, grid.constant(2.0), k=1, residual_tol=1e-3,
        subscribers=[recorder])
    return s, result, recorder


def test_run_converges_to_sphere(converged):
    s, result, _ = converged
    assert result.status == 'converged'
    assert result.residual <= 1e-3
    radius = math.sqrt(conserved_integral(s, 1) / (8 * math.pi))
    values = result.state.s.values
    assert abs(result.state.s.mean() - radius) <= 1e-3 * radius
    assert values.max() - values.min() <= 5e-3 * radius
    assert abs(result.mu - 1.0 / result.gamma) <= 1e-3 * result.mu
    assert abs(result.conserved_drift) <= 1e-4
    #   p_1 = 2 is solved by the unit sphere
    assert np.allclose(result.solution.values, 1.0, atol=5e-3)


def test_run_diagnostics(converged):
    _, result, recorder = converged
    records = result.records
    assert len(records) >= 2
    assert recorder.records == records
    assert records[0].t == 0.0
    assert records[-1].t == result.state.t
    for before, after in zip(records, records[1:]):
        assert after.t > before.t
        assert after.weighted_mean <= before.weighted_mean + 1e-10 * abs(before.weighted_mean)
    assert min(r.pinch_margin for r in records) >= -1e-6
    assert result.mu_min > 0
    assert result.mu_min <= result.mu_max


def test_run_reports_nonconvergence():
    grid = build_grid('FullS2', 12, 24)
    s = BodySpec('ellipsoid', axes=(1.2, 1.0, 0.9)).support(grid)
    with pytest.raises(ConvergenceError) as info:
        run_flow(s, grid.constant(2.0), k=1, t_max=1e-3)
    assert info.value.state is not None
    assert info.value.state.t > 1e-3

    with pytest.raises(ConvergenceError):
        run_flow(s, grid.constant(2.0), k=1, max_steps=2)


def test_engine_configuration():
    grid = build_grid('FullS2', 8, 16)
    state = FlowState(grid.constant(1.0), 1)
    phi = grid.constant(2.0)
    with pytest.raises(ConfigurationError):
        FlowEngine(state, phi, recentering='sometimes')
    with pytest.raises(ConfigurationError):
        FlowEngine(state, phi, recentering='periodic', recenter_every=0)
    with pytest.raises(ConfigurationError):
        FlowEngine(state, phi, every_steps=0)
    with pytest.raises(ValueError):
        run_flow(grid.constant(1.0), phi)
    with pytest.raises(ValueError):
        run_flow(state, phi, k=2)

    bumpy = BodySpec('harmonic_perturbed', radius=1.0, degree=3, amplitude=0.6)
    with pytest.raises(ConvexityLostError):
        FlowEngine(FlowState(bumpy.support(grid), 1), phi)


def test_step_size_control():
    grid = build_grid('FullS2', 8, 16)
    state = FlowState(grid.constant(1.0), 1)
    engine = FlowEngine(state, grid.constant(2.0), dt0=1e-6)
    assert engine.next_dt() == 1e-6
    engine.advance()
    assert engine.state.dt == 1e-6
    assert engine.next_dt() == pytest.approx(1.2e-6)

    engine = FlowEngine(state, grid.constant(2.0), dt0=1e6)
    assert engine.next_dt() < 1.0


def test_periodic_recentering():
    grid = build_grid('FullS2', 12, 24)
    ball = BodySpec('translated_sphere', radius=1.0, center=(0.2, 0.0, -0.1))
    state = FlowState(ball.support(grid), 1)
    engine = FlowEngine(state, grid.constant(2.0), recentering='periodic',
        recenter_every=1, every_steps=2)
    engine.advance()
    assert np.allclose(engine.state.s.values, 1.0, atol=1e-9)
    assert engine.records == []
    engine.advance()
    assert len(engine.records) == 1


def test_epsilon0_fallback(caplog):
    grid = build_grid('FullS2', 12, 24)
    #   phi^(-1) = 1 + 0.6 P_3 is not the support function of a convex body
    phi = grid.from_function(lambda u: 1.0 / (1.0 + 0.6 * (2.5 * u[:, 2] ** 3
        - 1.5 * u[:, 2])))
    state = FlowState(grid.constant(1.0), 1)
    with caplog.at_level(logging.WARNING, logger='cmflow.flow.engine'):
        engine = FlowEngine(state, phi)
    assert engine.epsilon0 == pytest.approx(0.99 * pinching_ratio(state))
    assert 'falls back' in caplog.text

    explicit = FlowEngine(state, phi, epsilon0=0.1)
    assert explicit.epsilon0 == 0.1
