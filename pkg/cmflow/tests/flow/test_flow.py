import numpy as np
import pytest

from cmflow.core import StepFailureError, InadmissiblePrescriptionError
from cmflow.grid import build_grid
from cmflow.convexity import radii_eigenvalues, elementary_symmetric
from cmflow.flow import (FlowState, speed_field, global_term, time_derivative,
    conserved_integral, centroid, recenter, monotone_functional, stable_dt,
    step)
from cmflow.contrib.oracle import BodySpec


def ellipsoid_state(grid, k=1, axes=(1.1, 1.0, 0.95)):
    return FlowState(BodySpec('ellipsoid', axes=axes).support(grid), k)


def test_flow_state():
    grid = build_grid('FullS2', 8, 16)
    state = FlowState(grid.constant(1.0), 2)
    assert state.n == 2
    assert state.grid is grid
    assert state.dt is None
    moved = state.evolve(grid.constant(2.0), t=0.5, step_index=3)
    assert (moved.t, moved.step_index, moved.k) == (0.5, 3, 2)
    assert state.t == 0.0
    with pytest.raises(ValueError):
        FlowState(grid.constant(1.0), 3)
    with pytest.raises(ValueError):
        FlowState(grid.constant(1.0), 0)


def test_speed_field_rejects_nonpositive():
    grid = build_grid('FullS2', 8, 16)
    assert np.allclose(speed_field(grid.constant(4.0), 2).values, 0.5)
    with pytest.raises(InadmissiblePrescriptionError):
        speed_field(grid.constant(0.0), 1)


def test_global_term_on_spheres():
    grid = build_grid('FullS2', 12, 24)
    #   the sphere of radius 1.5 solves p_k = phi
    for k, phi_value in ((1, 3.0), (2, 2.25)):
        phi = grid.constant(phi_value)
        for radius in (1.0, 1.5, 3.0):
            state = FlowState(grid.constant(radius), k)
            assert global_term(state, phi) == pytest.approx(1.5 / radius, rel=1e-12)
            rate = time_derivative(state, phi)
            assert np.max(np.abs(rate.values)) < 1e-12


def test_rate_preserves_conserved_integral():
    grid = build_grid('FullS2', 16, 32)
    for k in (1, 2):
        state = ellipsoid_state(grid, k, axes=(1.3, 1.0, 0.8))
        phi = grid.from_function(lambda u: 1.0 + 0.2 * u[:, 2] ** 2)
        rate = time_derivative(state, phi)
        lam = radii_eigenvalues(state.s).eigenvalues
        p = elementary_symmetric(lam, k)
        scale = np.dot(grid.weights, p ** ((k - 1.0) / k))
        assert abs(np.dot(grid.weights, rate.values * p)) <= 1e-12 * scale


def test_sphere_is_a_fixed_point():
    grid = build_grid('FullS2', 12, 24)
    state = FlowState(grid.constant(1.0), 1)
    phi = grid.constant(2.0)
    new, report = step(state, phi, stable_dt(state))
    assert np.allclose(new.s.values, 1.0, atol=1e-12)
    assert report.rejections == 0
    assert new.step_index == 1
    assert new.t == pytest.approx(report.dt)
    assert new.dt == report.dt
    assert new.last_mu == pytest.approx(1.0)


def test_translation_equivariance():
    grid = build_grid('FullS2', 12, 24)
    phi = grid.constant(2.0)
    shift = grid.linear_function([0.2, -0.1, 0.15])
    a = ellipsoid_state(grid)
    b = a.evolve(a.s + shift)
    for _ in range(20):
        dt = stable_dt(a)
        a, _ = step(a, phi, dt)
        b, _ = step(b, phi, dt)
    assert np.allclose((b.s - shift).values, a.s.values, atol=1e-10)


def test_conservation_and_monotonicity():
    grid = build_grid('FullS2', 16, 32)
    phi = grid.from_function(lambda u: 2.0 + 0.3 * u[:, 2] ** 2)
    state = ellipsoid_state(grid)
    q0 = conserved_integral(state.s, 1)
    j = monotone_functional(state.s, phi)
    for _ in range(20):
        state, report = step(state, phi, stable_dt(state))
        assert report.monotone_delta <= 1e-10 * abs(j)
        j = monotone_functional(state.s, phi)
    assert abs(conserved_integral(state.s, 1) - q0) <= 1e-4 * q0


def test_centroid_and_recenter():
    grid = build_grid('FullS2', 16, 32)
    s = BodySpec('ellipsoid', axes=(1.2, 1.0, 0.9)).support(grid)
    assert np.allclose(centroid(s), 0.0, atol=1e-10)

    z = np.array([0.3, -0.2, 0.1])
    ball = BodySpec('translated_sphere', radius=1.5, center=z).support(grid)
    assert np.allclose(centroid(ball), z, atol=1e-9)
    centered = recenter(FlowState(ball, 2))
    assert np.allclose(centered.s.values, 1.5, atol=1e-9)


def test_conserved_integral_translation_invariant():
    grid = build_grid('FullS2', 16, 32)
    s = BodySpec('ellipsoid', axes=(1.2, 1.0, 0.9)).support(grid)
    moved = s + grid.linear_function([0.4, 0.1, -0.3])
    for k in (1, 2):
        assert conserved_integral(moved, k) == pytest.approx(
            conserved_integral(s, k), rel=1e-11)


def test_stable_dt_scaling():
    grid = build_grid('FullS2', 12, 24)
    for k in (1, 2):
        small = stable_dt(FlowState(grid.constant(1.0), k))
        large = stable_dt(FlowState(grid.constant(2.0), k))
        assert large / small == pytest.approx(4.0, rel=1e-12)
        half = stable_dt(FlowState(grid.constant(1.0), k), cfl_safety=0.25)
        assert half == pytest.approx(small / 2)


def test_step_errors_and_rejections():
    grid = build_grid('FullS2', 12, 24)
    phi = grid.constant(1.0)
    state = ellipsoid_state(grid, axes=(2.0, 1.0, 0.5))
    with pytest.raises(ValueError):
        step(state, phi, 0.0)
    with pytest.raises(StepFailureError):
        step(state, phi, 1e-3, dt_min=1.0)

    new, report = step(state, phi, 50.0)
    assert report.rejections >= 1
    assert report.dt < 50.0
    assert new.t == pytest.approx(report.dt)
    assert report.accepted

    same, report = step(state, phi, 50.0, retry=False)
    assert same is state
    assert not report.accepted
    assert report.rejections == 1
    assert report.dt == 50.0


def conserved_drift_until(ntheta, t_end):
    grid = build_grid('FullS2', ntheta, 2 * ntheta)
    phi = grid.constant(2.0)
    state = ellipsoid_state(grid, axes=(1.3, 1.0, 0.8))
    q0 = conserved_integral(state.s, 1)
    while state.t < t_end - 1e-12:
        state, _ = step(state, phi, min(stable_dt(state), t_end - state.t))
    return abs(conserved_integral(state.s, 1) - q0) / q0


def test_conserved_drift_refinement():
    coarse = conserved_drift_until(12, 0.25)
    fine = conserved_drift_until(24, 0.25)
    assert coarse <= 1e-4
    assert fine <= coarse / 3.5 or fine <= 1e-12
