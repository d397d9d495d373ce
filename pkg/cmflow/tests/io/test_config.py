import os

import pytest

from cmflow.core import ConfigurationError
from cmflow.config import OUTPUT_DIR_ENV, parse_config, load_config

MINIMAL = """
[problem]
geometry = FullS2
k = 1

[grid]
ntheta = 24
nphi = 48

[prescription]
kind = constant
value = 2
"""


def test_defaults():
    config = parse_config(MINIMAL, environ={})
    assert config.problem.geometry == 'fulls2'
    assert config.problem.n == 2
    assert config.problem.k == 1
    assert config.grid.nphi == 48
    assert config.prescription.value == 2.0
    assert config.prescription.scale == 1.0
    assert config.initial.kind == 'sphere'
    assert config.time.dt0 is None
    assert config.time.cfl_safety == 0.5
    assert config.time.t_max == 200.0
    assert config.time.max_steps == 200000
    assert config.stop.residual_tol == 1e-3
    assert config.recentering.mode == 'diagnostic'
    assert config.continuation.enabled is False
    assert config.continuation.delta == 1e-3
    assert config.check.int_tol == 1e-8
    assert config.check.conv_tol is None
    assert config.output.dir == 'cmflow-out'
    assert config.output.every_steps == 10
    assert config.as_dict()['grid'] == {'ntheta': 24, 'nphi': 48}


def test_sections():
    config = parse_config(MINIMAL + """
[initial]
kind = ellipsoid
axes = 1.2, 1.0, 0.9
""", environ={})
    assert config.initial['axes'] == (1.2, 1.0, 0.9)
    assert 'axes' in config.initial
    assert config.initial.get('radius', 1.0) == 1.0
    assert config.body_params('initial', 'ellipsoid') == {'axes': (1.2, 1.0, 0.9)}
    with pytest.raises(AttributeError):
        config.initial.kind = 'sphere'
    with pytest.raises(AttributeError):
        config.initial.nothing


def test_validation_messages():
    with pytest.raises(ConfigurationError) as info:
        parse_config(MINIMAL.replace('k = 1', 'k = 3'), environ={})
    assert 'problem.k' in str(info.value)

    with pytest.raises(ConfigurationError) as info:
        parse_config(MINIMAL.replace('k = 1', 'k = 1\nn = 3'), environ={})
    assert 'problem.n' in str(info.value)

    with pytest.raises(ConfigurationError) as info:
        parse_config(MINIMAL.replace('ntheta', 'nthta'), environ={})
    assert 'grid.nthta' in str(info.value)

    with pytest.raises(ConfigurationError) as info:
        parse_config(MINIMAL.replace('value = 2', 'value = two'), environ={})
    assert 'prescription.value' in str(info.value)

    with pytest.raises(ConfigurationError) as info:
        parse_config(MINIMAL.replace('k = 1', ''), environ={})
    assert 'problem.k' in str(info.value)

    with pytest.raises(ConfigurationError):
        parse_config(MINIMAL + '\n[plotting]\ncolour = red\n', environ={})
    with pytest.raises(ConfigurationError):
        parse_config(MINIMAL.replace('kind = constant', 'kind = random'), environ={})
    with pytest.raises(ConfigurationError):
        parse_config(MINIMAL + '\n[recentering]\nmode = periodic\n', environ={})
    with pytest.raises(ConfigurationError):
        parse_config('not an ini file', environ={})


def test_axisym():
    text = MINIMAL.replace('FullS2', 'Axisym').replace('nphi = 48', '')
    config = parse_config(text.replace('k = 1', 'k = 2\nn = 4'), environ={})
    assert config.problem.geometry == 'axisym'
    assert config.grid.nphi is None
    with pytest.raises(ConfigurationError):
        parse_config(MINIMAL.replace('nphi = 48', ''), environ={})


def test_environment_override():
    config = parse_config(MINIMAL, environ={OUTPUT_DIR_ENV: '/tmp/elsewhere'})
    assert config.output.dir == '/tmp/elsewhere'


def test_load_config(tmp_path):
    path = tmp_path / 'run.ini'
    path.write_text(MINIMAL.replace('kind = constant\nvalue = 2',
        'kind = samples\nfile = phi.json'))
    config = load_config(str(path), environ={})
    assert config.source == str(path)
    assert config.prescription.file == os.path.join(str(tmp_path), 'phi.json')

    with pytest.raises(ConfigurationError):
        load_config(str(tmp_path / 'missing.ini'))
