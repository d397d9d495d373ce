import numpy as np
import pytest

from cmflow.grid import build_grid
from cmflow.flow import FlowState, recenter
from cmflow.flow.engine import run_flow
from cmflow.contrib.oracle import BodySpec, amplitude_for_margin, forward_map


def sup_error(a, b):
    return float(np.max(np.abs((a - b).values)))


@pytest.fixture(scope='module')
def minkowski():
    grid = build_grid('FullS2', 12, 24)
    s_true = BodySpec('ellipsoid', axes=(1.2, 1.0, 0.9)).support(grid)
    phi = forward_map(s_true, 2)
    result = run_flow(grid.constant(1.0), phi, k=2, residual_tol=5e-4,
        t_max=100.0, every_steps=100)
    return grid, s_true, phi, result


def test_minkowski_recovery(minkowski):
    _, s_true, _, result = minkowski
    assert result.status == 'converged'
    assert result.residual <= 5e-4
    assert sup_error(result.solution, s_true) <= 5e-3
    assert abs(result.mu - result.gamma ** -0.5) <= 1e-3 * result.mu
    assert min(r.pinch_margin for r in result.records) >= -1e-6


def test_solution_unique_up_to_translation(minkowski):
    grid, _, phi, first = minkowski
    other = (BodySpec('ellipsoid', axes=(1.1, 1.0, 0.95)).support(grid)
        + grid.linear_function([0.1, -0.05, 0.2]))
    second = run_flow(other, phi, k=2, residual_tol=5e-4, t_max=100.0,
        every_steps=100)
    assert sup_error(first.solution, second.solution) <= 1e-3


def test_christoffel_recovery():
    grid = build_grid('FullS2', 12, 24)
    spec = BodySpec('harmonic_perturbed', radius=1.0, degree=2, order=2,
        amplitude=0.0)
    spec = spec.replace(amplitude=amplitude_for_margin(spec, grid, 0.8))
    s_true = recenter(FlowState(spec.support(grid), 1)).s
    result = run_flow(grid.constant(1.0), forward_map(s_true, 1), k=1,
        residual_tol=5e-4, t_max=100.0, every_steps=100)
    assert result.residual <= 5e-4
    assert sup_error(result.solution, s_true) <= 5e-3


def test_axisym_recovery():
    grid = build_grid('Axisym', 16, n=3)
    s_true = BodySpec('ellipsoid', axes=(1.0, 1.0, 1.0, 0.85)).support(grid)
    result = run_flow(grid.constant(1.0), forward_map(s_true, 2), k=2,
        residual_tol=1e-3, t_max=100.0, every_steps=100)
    assert result.status == 'converged'
    assert result.state.grid is grid
    assert sup_error(result.solution, s_true) <= 1e-2
