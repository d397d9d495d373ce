import json
import os

import pytest

from cmflow.cli import (main, EXIT_CONVERGED, EXIT_INADMISSIBLE,
    EXIT_NOT_CONVERGED, DIAGNOSTICS_FILE, STATE_FILE, SUMMARY_FILE)
from cmflow.io import read_diagnostics, read_mesh_vertices

TEMPLATE = """
[problem]
geometry = FullS2
k = 1

[grid]
ntheta = 12
nphi = 24

[prescription]
%(prescription)s

[initial]
%(initial)s

[time]
t_max = %(t_max)s

[stop]
residual_tol = 1e-2

[output]
dir = %(out)s
"""


def write_config(tmp_path, prescription='kind = constant\nvalue = 2',
        initial='kind = sphere', t_max=200.0, name='run.ini'):
    out = str(tmp_path / 'out')
    path = tmp_path / name
    path.write_text(TEMPLATE % dict(prescription=prescription, initial=initial,
        t_max=t_max, out=out))
    return str(path), out


def test_check(tmp_path, capsys):
    path, _ = write_config(tmp_path)
    assert main(['check', path]) == EXIT_CONVERGED
    assert capsys.readouterr().out.startswith('strict')

    path, _ = write_config(tmp_path, 'kind = harmonic\ncoefficients = 1, 0.5')
    assert main(['check', path]) == EXIT_INADMISSIBLE
    assert capsys.readouterr().out.startswith('inadmissible')


def test_run_sphere(tmp_path, capsys):
    path, out = write_config(tmp_path)
    assert main(['run', path]) == EXIT_CONVERGED
    assert capsys.readouterr().out.startswith('converged')
    for name in (DIAGNOSTICS_FILE, STATE_FILE, SUMMARY_FILE):
        assert os.path.exists(os.path.join(out, name))
    names, rows = read_diagnostics(os.path.join(out, DIAGNOSTICS_FILE))
    assert len(names) == 15
    assert len(rows) == 1
    with open(os.path.join(out, SUMMARY_FILE)) as fh:
        assert json.load(fh)['status'] == 'converged'

    mesh = str(tmp_path / 'sphere.obj')
    assert main(['export', os.path.join(out, STATE_FILE), mesh]) == EXIT_CONVERGED
    assert read_mesh_vertices(mesh).shape == (12 * 24 + 2, 3)


def test_run_and_resume(tmp_path):
    initial = 'kind = ellipsoid\naxes = 1.1, 1.0, 0.95'
    path, out = write_config(tmp_path, initial=initial, t_max=1e-3)
    assert main(['run', path]) == EXIT_NOT_CONVERGED
    state = os.path.join(out, STATE_FILE)
    with open(os.path.join(out, SUMMARY_FILE)) as fh:
        summary = json.load(fh)
    assert summary['status'] == 'not_converged'
    assert summary['t'] > 1e-3

    with open(state) as fh:
        epsilon0 = json.load(fh)['epsilon0']
    assert epsilon0 > 0

    saved = str(tmp_path / 'saved.json')
    os.rename(state, saved)
    path, out = write_config(tmp_path, initial=initial, name='resume.ini')
    assert main(['run', path, '--resume', saved]) == EXIT_CONVERGED
    with open(os.path.join(out, STATE_FILE)) as fh:
        resumed = json.load(fh)
    assert resumed['step_index'] > summary['steps']
    assert resumed['epsilon0'] == epsilon0


def test_refuses_inadmissible(tmp_path):
    path, out = write_config(tmp_path, 'kind = harmonic\ncoefficients = 0.5, 0, -1')
    assert main(['run', path]) == EXIT_INADMISSIBLE
    assert not os.path.exists(os.path.join(out, STATE_FILE))

    path, _ = write_config(tmp_path, 'kind = harmonic\ncoefficients = 1, 0.5')
    assert main(['continue', path]) == EXIT_INADMISSIBLE


def test_configuration_errors(tmp_path):
    assert main(['check', str(tmp_path / 'missing.ini')]) == 1
    with pytest.raises(SystemExit):
        main(['--version'])
    with pytest.raises(SystemExit):
        main([])
