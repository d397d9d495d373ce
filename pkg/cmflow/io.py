#-----------------------------------------------------------------------------
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
#-----------------------------------------------------------------------------
"""
Files written and read by cmflow: diagnostics tables (CSV), snapshots and
sample files (JSON), run summaries (JSON) and surface meshes (Wavefront OBJ).
"""
import csv as _csv
import json as _json
import math as _math

import numpy as _np

from cmflow.core import (FULL_S2, ConfigurationError, ConvexityLostError,
    SnapshotError, Subscriber)
from cmflow.grid import Grid, ScalarField
from cmflow.convexity import convexity_margin
from cmflow.flow import FlowState, boundary_points
from cmflow.diagnostics import header

#: Identifies snapshot and sample documents.
SNAPSHOT_FORMAT = 'cmflow-snapshot'

#: Version of the snapshot layout.
SNAPSHOT_VERSION = 1

#: Number format of diagnostics values; round-trips doubles exactly.
FLOAT_FORMAT = '%.17g'


def _open(target, mode):
    if hasattr(target, 'write') or hasattr(target, 'read'):
        return target, False
    return open(target, mode, newline='' if 'b' not in mode else None), True


class DiagnosticsCSVWriter(Subscriber):
    """
    A concrete Subscriber that writes each `DiagnosticsRecord` received as a
    row of a CSV table. The header is written on construction.
    """

    def __init__(self, target, n):
        """
        Constructor.

        :param target: a file-like object or name of the CSV file.

        :param n: sphere dimension, fixing the number of centroid columns.
        """
        self.fh, self._owned = _open(target, 'w')
        self.writer = _csv.writer(self.fh, lineterminator='\n')
        self.writer.writerow(header(n))

    def update(self, data):
        """
        Writes one record.

        :param data: a `DiagnosticsRecord`.
        """
        self.writer.writerow([FLOAT_FORMAT % value for value in data.as_row()])
        self.fh.flush()

    def close(self):
        """Close the underlying file if this writer opened it."""
        if self._owned:
            self.fh.close()


def write_diagnostics(series, path, n=None):
    """
    :param series: a sequence of `DiagnosticsRecord` objects.

    :param path: name of (or file-like object for) the CSV file.

    :param n: sphere dimension. Default: taken from the first record, or 2
        for an empty series.
    """
    series = list(series)
    if n is None:
        n = len(series[0].centroid) - 1 if series else 2
    writer = DiagnosticsCSVWriter(path, n)
    try:
        for rec in series:
            writer.update(rec)
    finally:
        writer.close()


def read_diagnostics(path):
    """
    :param path: name of a CSV file written by `write_diagnostics`.

    :return: a tuple (column names, rows), every row a list of floats.
    """
    fh, owned = _open(path, 'r')
    try:
        reader = _csv.reader(fh)
        names = next(reader)
        rows = [[float(value) for value in row] for row in reader if row]
    finally:
        if owned:
            fh.close()
    return names, rows


def _grid_fields(grid):
    return {
        'geometry': grid.geometry,
        'n': grid.n,
        'ntheta': grid.ntheta,
        'nphi': grid.nphi,
    }


def _dump(document, path):
    fh, owned = _open(path, 'w')
    try:
        _json.dump(document, fh, sort_keys=True, indent=1)
        fh.write('\n')
    finally:
        if owned:
            fh.close()


def _load(path):
    fh, owned = _open(path, 'r')
    try:
        document = _json.load(fh)
    except ValueError as exc:
        raise SnapshotError('%s is not a JSON document: %s' % (path, exc))
    finally:
        if owned:
            fh.close()
    if not isinstance(document, dict) or document.get('format') != SNAPSHOT_FORMAT:
        raise SnapshotError('%s is not a cmflow snapshot' % (path,))
    if document.get('version') != SNAPSHOT_VERSION:
        raise SnapshotError('unsupported snapshot version %r in %s'
            % (document.get('version'), path))
    return document


def _document_grid(document, path, grid=None):
    try:
        found = Grid(document['geometry'], document['ntheta'],
            document['nphi'], document['n'])
    except (KeyError, ConfigurationError) as exc:
        raise SnapshotError('%s describes no valid grid: %s' % (path, exc))
    if grid is not None and grid != found:
        raise SnapshotError('%s was written on %r, expected %r'
            % (path, found, grid))
    values = document.get('values')
    if not isinstance(values, list) or len(values) != found.node_count:
        raise SnapshotError('%s holds %s values for %d nodes' % (path,
            len(values) if isinstance(values, list) else 'no', found.node_count))
    return found


def write_snapshot(state, path):
    """
    Save a `FlowState`: grid, problem order, time, step counters, the last
    step size, the pinching constant of the run and the support function
    values in node order.
    """
    document = dict(_grid_fields(state.grid),
        format=SNAPSHOT_FORMAT,
        version=SNAPSHOT_VERSION,
        k=state.k,
        t=state.t,
        step_index=state.step_index,
        last_mu=None if _math.isnan(state.last_mu) else state.last_mu,
        dt=state.dt,
        epsilon0=state.epsilon0,
        values=[float(v) for v in state.s.values])
    _dump(document, path)


def load_snapshot(path, grid=None, k=None):
    """
    :param path: name of a snapshot file.

    :param grid: if given, the grid the snapshot must have been written on.

    :param k: if given, the order the snapshot must have been written with.

    :return: the saved `FlowState`.

    :raise SnapshotError: on version, geometry, resolution or order mismatch.
    """
    document = _load(path)
    found = _document_grid(document, path, grid)
    if 'k' not in document:
        raise SnapshotError('%s holds samples, not a flow state' % (path,))
    if k is not None and k != document['k']:
        raise SnapshotError('%s was written for k=%r, expected k=%r'
            % (path, document['k'], k))
    last_mu = document.get('last_mu')
    return FlowState(ScalarField(found, document['values']), document['k'],
        t=document['t'], step_index=document['step_index'],
        last_mu=float('nan') if last_mu is None else last_mu,
        epsilon0=document.get('epsilon0'),
        dt=document.get('dt'))


def write_samples(field, path):
    """Save a `ScalarField` in the snapshot node ordering."""
    document = dict(_grid_fields(field.grid),
        format=SNAPSHOT_FORMAT,
        version=SNAPSHOT_VERSION,
        values=[float(v) for v in field.values])
    _dump(document, path)


def load_samples(path, grid):
    """
    :param path: a samples or snapshot file.

    :param grid: the `Grid` the samples must live on.

    :return: the samples as a `ScalarField`.
    """
    document = _load(path)
    found = _document_grid(document, path, grid)
    return ScalarField(found, document['values'])


def _jsonable(value):
    if isinstance(value, _np.ndarray):
        return [float(v) for v in value]
    if isinstance(value, (float, _np.floating)):
        value = float(value)
        return None if not _math.isfinite(value) else value
    return value


def write_summary(result, path, **extra):
    """
    Write a JSON summary of a `FlowResult` or `ContinuationResult`.

    :param extra: further top level entries, e.g. the exit status.
    """
    summary = {}
    if hasattr(result, 'stages'):
        summary['stages'] = [dict(tau=stage.tau, z=_jsonable(stage.z),
            z_norm=stage.z_norm, gamma=stage.gamma, residual=stage.residual,
            steps=stage.steps) for stage in result.stages]
        summary['residual'] = result.residual
        summary['margin'] = result.margin
        summary['z_bound'] = result.z_bound
    elif result is not None:
        for name in ('status', 'gamma', 'mu', 'residual', 'mu_min', 'mu_max',
                'conserved_drift', 'epsilon0'):
            summary[name] = getattr(result, name)
        summary['t'] = result.state.t
        summary['steps'] = result.state.step_index
    summary.update(extra)
    _dump(dict((key, _jsonable(value)) for key, value in summary.items()), path)


def export_mesh(state, path):
    """
    Write the boundary of the body as a Wavefront OBJ mesh: one vertex per
    node at x(u) = s u + grad s, one vertex per pole at the mean of its
    nearest ring, outward oriented triangles.

    :param state: a `FlowState` or support function `ScalarField` on a
        FullS2 grid.

    :raise ConvexityLostError: if the body is not strictly convex.
    """
    s = getattr(state, 's', state)
    grid = s.grid
    if grid.geometry != FULL_S2:
        raise ConfigurationError('mesh export needs a FullS2 grid, got %r'
            % (grid,))
    margin = convexity_margin(s)
    if margin <= 0.0:
        raise ConvexityLostError('refusing to export a body that is not '
            'strictly convex (margin %.6g)' % margin, margin=margin)
    ntheta, nphi = grid.ntheta, grid.nphi
    points = boundary_points(s)
    rings = points.reshape(ntheta, nphi, 3)
    north = len(points) + 1
    south = len(points) + 2

    def vid(i, j):
        return i * nphi + (j % nphi) + 1

    fh, owned = _open(path, 'w')
    try:
        fh.write('# cmflow mesh: %d vertices\n' % (len(points) + 2))
        for x in points:
            fh.write('v %.17g %.17g %.17g\n' % tuple(x))
        for x in (rings[0].mean(axis=0), rings[-1].mean(axis=0)):
            fh.write('v %.17g %.17g %.17g\n' % tuple(x))
        for j in range(nphi):
            fh.write('f %d %d %d\n' % (north, vid(0, j), vid(0, j + 1)))
        for i in range(ntheta - 1):
            for j in range(nphi):
                a, b = vid(i, j), vid(i + 1, j)
                c, d = vid(i + 1, j + 1), vid(i, j + 1)
                fh.write('f %d %d %d\n' % (a, b, c))
                fh.write('f %d %d %d\n' % (a, c, d))
        last = ntheta - 1
        for j in range(nphi):
            fh.write('f %d %d %d\n' % (vid(last, j), south, vid(last, j + 1)))
    finally:
        if owned:
            fh.close()


def read_mesh_vertices(path):
    """:return: the vertices of an OBJ file as an array of shape (V, 3)."""
    fh, owned = _open(path, 'r')
    try:
        vertices = [[float(x) for x in line.split()[1:4]]
            for line in fh if line.startswith('v ')]
    finally:
        if owned:
            fh.close()
    return _np.array(vertices)
