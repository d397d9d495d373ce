import io
import json

import numpy as np
import pytest

from cmflow.core import ConfigurationError, ConvexityLostError, SnapshotError
from cmflow.grid import build_grid
from cmflow.flow import FlowState
from cmflow.flow.engine import FlowEngine, run_flow
from cmflow.diagnostics import header, record
from cmflow.contrib.oracle import BodySpec
from cmflow.io import (DiagnosticsCSVWriter, write_diagnostics,
    read_diagnostics, write_snapshot, load_snapshot, write_samples,
    load_samples, write_summary, export_mesh, read_mesh_vertices)


def ellipsoid(grid, axes=(1.2, 1.0, 0.9)):
    return BodySpec('ellipsoid', axes=axes).support(grid)


def test_csv_header_only():
    buf = io.StringIO()
    writer = DiagnosticsCSVWriter(buf, 2)
    writer.close()
    assert buf.getvalue() == ','.join(header(2)) + '\n'


def test_csv_round_trip(tmp_path):
    grid = build_grid('FullS2', 12, 24)
    state = FlowState(ellipsoid(grid), 1)
    rec = record(state, grid.from_function(lambda u: 2.0 + u[:, 2] ** 2), 0.1)
    path = str(tmp_path / 'diagnostics.csv')
    write_diagnostics([rec], path)
    with open(path) as fh:
        lines = fh.read().splitlines()
    assert len(lines) == 2
    assert len(lines[1].split(',')) == 15

    names, rows = read_diagnostics(path)
    assert names == header(2)
    assert rows == [rec.as_row()]

    empty = str(tmp_path / 'empty.csv')
    write_diagnostics([], empty)
    assert read_diagnostics(empty) == (header(2), [])


def test_snapshot_round_trip(tmp_path):
    grid = build_grid('FullS2', 8, 16)
    state = FlowState(ellipsoid(grid), 2, t=0.25, step_index=7, last_mu=1.5,
        dt=1e-3, epsilon0=0.2)
    first = str(tmp_path / 'a.json')
    second = str(tmp_path / 'b.json')
    write_snapshot(state, first)
    loaded = load_snapshot(first, grid=grid, k=2)
    assert np.all(loaded.s.values == state.s.values)
    assert (loaded.t, loaded.step_index, loaded.last_mu, loaded.dt,
        loaded.epsilon0) == (0.25, 7, 1.5, 1e-3, 0.2)
    write_snapshot(loaded, second)
    with open(first, 'rb') as a, open(second, 'rb') as b:
        assert a.read() == b.read()

    with open(first) as fh:
        document = json.load(fh)
    assert document['format'] == 'cmflow-snapshot'
    assert document['version'] == 1
    assert document['geometry'] == 'fulls2'
    assert len(document['values']) == grid.node_count

    fresh = FlowState(grid.constant(1.0), 1)
    write_snapshot(fresh, first)
    reloaded = load_snapshot(first)
    assert np.isnan(reloaded.last_mu)
    assert reloaded.dt is None
    assert reloaded.epsilon0 is None


def test_snapshot_mismatch(tmp_path):
    grid = build_grid('FullS2', 8, 16)
    path = str(tmp_path / 'state.json')
    write_snapshot(FlowState(grid.constant(1.0), 1), path)
    with pytest.raises(SnapshotError):
        load_snapshot(path, grid=build_grid('FullS2', 10, 16))
    with pytest.raises(SnapshotError):
        load_snapshot(path, k=2)

    garbage = tmp_path / 'garbage.json'
    garbage.write_text('not json')
    with pytest.raises(SnapshotError):
        load_snapshot(str(garbage))
    garbage.write_text('{"format": "other"}')
    with pytest.raises(SnapshotError):
        load_snapshot(str(garbage))
    garbage.write_text('{"format": "cmflow-snapshot", "version": 99}')
    with pytest.raises(SnapshotError):
        load_snapshot(str(garbage))


def test_resume_is_deterministic(tmp_path):
    grid = build_grid('FullS2', 12, 24)
    phi = grid.from_function(lambda u: 2.0 + 0.2 * u[:, 2] ** 2)
    start = FlowState(ellipsoid(grid), 1)

    straight = FlowEngine(start, phi, epsilon0=0.1)
    for _ in range(3):
        straight.advance()

    first = FlowEngine(start, phi, epsilon0=0.1)
    first.advance()
    path = str(tmp_path / 'state.json')
    write_snapshot(first.state, path)
    resumed = FlowEngine(load_snapshot(path, grid=grid, k=1), phi, epsilon0=0.1)
    resumed.advance()
    resumed.advance()

    assert resumed.state.step_index == 3
    assert resumed.state.t == straight.state.t
    assert np.all(resumed.state.s.values == straight.state.s.values)


def test_resume_keeps_pinching_constant(tmp_path):
    grid = build_grid('FullS2', 12, 24)
    phi = grid.from_function(lambda u: 2.0 + 0.2 * u[:, 2] ** 2)
    straight = FlowEngine(FlowState(ellipsoid(grid), 1), phi, epsilon0=0.123,
        every_steps=1)
    for _ in range(3):
        straight.advance()

    path = str(tmp_path / 'state.json')
    write_snapshot(straight.state, path)
    resumed = FlowEngine(load_snapshot(path, grid=grid, k=1), phi)
    assert resumed.epsilon0 == 0.123
    assert resumed.emit().pinch_margin == straight.records[-1].pinch_margin


def test_samples(tmp_path):
    grid = build_grid('Axisym', 10, n=3)
    field = grid.from_function(lambda u: 1.0 + u[:, 3] ** 2)
    path = str(tmp_path / 'phi.json')
    write_samples(field, path)
    assert np.all(load_samples(path, grid).values == field.values)
    with pytest.raises(SnapshotError):
        load_samples(path, build_grid('Axisym', 10, n=4))
    with pytest.raises(SnapshotError):
        load_snapshot(path)


def test_summary(tmp_path):
    grid = build_grid('FullS2', 8, 16)
    result = run_flow(grid.constant(1.0), grid.constant(2.0), k=1)
    path = str(tmp_path / 'summary.json')
    write_summary(result, path, exit_status=0)
    with open(path) as fh:
        summary = json.load(fh)
    assert summary['status'] == 'converged'
    assert summary['exit_status'] == 0
    assert summary['steps'] == 0
    assert summary['gamma'] == pytest.approx(1.0)

    write_summary(None, path, exit_status=2, margin=float('nan'),
        admissibility={'classification': 'inadmissible'})
    with open(path) as fh:
        assert json.load(fh) == {'exit_status': 2, 'margin': None,
            'admissibility': {'classification': 'inadmissible'}}


def _faces(path):
    with open(path) as fh:
        return [[int(x) - 1 for x in line.split()[1:4]]
            for line in fh if line.startswith('f ')]


def test_export_sphere_mesh(tmp_path):
    grid = build_grid('FullS2', 24, 48)
    path = str(tmp_path / 'sphere.obj')
    export_mesh(FlowState(grid.constant(1.0), 1), path)
    vertices = read_mesh_vertices(path)
    assert vertices.shape == (grid.node_count + 2, 3)
    radii = np.linalg.norm(vertices, axis=1)
    assert np.allclose(radii[:-2], 1.0, atol=1e-9)
    assert np.allclose(radii[-2:], 1.0, atol=1e-2)
    assert vertices[-2, 2] > 0 > vertices[-1, 2]

    faces = _faces(path)
    assert len(faces) == 2 * grid.nphi * grid.ntheta
    for a, b, c in faces:
        normal = np.cross(vertices[b] - vertices[a], vertices[c] - vertices[a])
        assert np.dot(normal, vertices[a] + vertices[b] + vertices[c]) > 0


def test_export_translated_and_ellipsoid(tmp_path):
    grid = build_grid('FullS2', 16, 32)
    center = np.array([0.3, -0.2, 0.1])
    path = str(tmp_path / 'ball.obj')
    ball = BodySpec('translated_sphere', radius=1.0, center=center).support(grid)
    export_mesh(ball, path)
    vertices = read_mesh_vertices(path)[:-2]
    assert np.allclose(np.linalg.norm(vertices - center, axis=1), 1.0, atol=1e-9)

    s = ellipsoid(grid)
    export_mesh(s, path)
    vertices = read_mesh_vertices(path)[:-2]
    assert np.allclose((vertices * grid.basis).sum(axis=1), s.values, atol=1e-9)


def test_export_errors(tmp_path):
    path = str(tmp_path / 'mesh.obj')
    with pytest.raises(ConfigurationError):
        export_mesh(build_grid('Axisym', 10, n=2).constant(1.0), path)
    grid = build_grid('FullS2', 16, 32)
    bumpy = BodySpec('harmonic_perturbed', radius=1.0, degree=3, amplitude=0.6)
    with pytest.raises(ConvexityLostError):
        export_mesh(bumpy.support(grid), path)
