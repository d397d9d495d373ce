#-----------------------------------------------------------------------------
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
#-----------------------------------------------------------------------------
"""
Run configuration, read from INI documents.

A minimal configuration::

    [problem]
    geometry = FullS2
    n = 2
    k = 1

    [grid]
    ntheta = 24
    nphi = 48

    [prescription]
    kind = constant
    value = 2

Every other section is optional and filled with defaults. Unknown sections
and keys are rejected.
"""
import configparser as _configparser
import os as _os
import pprint as _pprint

from cmflow.core import FULL_S2, AXISYM, ConfigurationError
from cmflow.contrib.oracle import BODY_KINDS, BODY_DEFAULTS

#: Environment variable replacing ``output.dir``.
OUTPUT_DIR_ENV = 'CMFLOW_OUTPUT_DIR'

#: Marks keys without a default.
REQUIRED = object()

#: Prescription kinds.
PRESCRIPTION_KINDS = ('constant', 'body', 'samples', 'harmonic', 'degenerate')


def _floats(text):
    return tuple(float(item) for item in text.replace(';', ',').split(',') if item.strip())


def _boolean(text):
    lowered = text.strip().lower()
    if lowered in ('1', 'yes', 'true', 'on'):
        return True
    if lowered in ('0', 'no', 'false', 'off'):
        return False
    raise ValueError('not a boolean: %r' % (text,))


def _optional_float(text):
    if text.strip().lower() in ('', 'auto', 'none'):
        return None
    return float(text)


def _geometry(text):
    return text.strip().lower()


_BODY_KEYS = {
    'radius': (float, None),
    'center': (_floats, None),
    'axes': (_floats, None),
    'degree': (int, None),
    'amplitude': (float, None),
    'order': (int, None),
    'coefficients': (_floats, None),
}

#: Section name -> key -> (parser, default).
SCHEMA = {
    'problem': {
        'geometry': (_geometry, FULL_S2),
        'n': (int, 2),
        'k': (int, REQUIRED),
    },
    'grid': {
        'ntheta': (int, REQUIRED),
        'nphi': (int, None),
    },
    'prescription': dict(_BODY_KEYS, **{
        'kind': (str, REQUIRED),
        'value': (float, None),
        'body': (str, None),
        'file': (str, None),
        'scale': (float, 1.0),
    }),
    'initial': dict(_BODY_KEYS, **{
        'kind': (str, 'sphere'),
    }),
    'time': {
        'dt0': (_optional_float, None),
        'cfl_safety': (float, 0.5),
        't_max': (float, 200.0),
        'max_steps': (int, 200000),
    },
    'stop': {
        'residual_tol': (float, 1e-3),
    },
    'recentering': {
        'mode': (str, 'diagnostic'),
        'every': (int, 0),
    },
    'continuation': {
        'enabled': (_boolean, False),
        'tau0': (float, 0.5),
        'rho': (float, 0.5),
        'delta': (float, 1e-3),
    },
    'check': {
        'int_tol': (float, 1e-8),
        'conv_tol': (_optional_float, None),
    },
    'output': {
        'dir': (str, 'cmflow-out'),
        'every_steps': (int, 10),
    },
}


class Section(object):
    """
    A configuration section allowing key access using object '.' (dot)
    lookups as well as item lookups.
    """

    def __init__(self, name, values):
        self.__dict__['_name'] = name
        self.__dict__['_values'] = dict(values)

    def __getattr__(self, key):
        try:
            return self._values[key]
        except KeyError:
            raise AttributeError('%s.%s' % (self._name, key))

    def __setattr__(self, key, value):
        raise AttributeError('configuration sections are read-only')

    def __getitem__(self, key):
        return self._values[key]

    def __contains__(self, key):
        return key in self._values

    def __iter__(self):
        return iter(sorted(self._values))

    def get(self, key, default=None):
        """:return: the value of ``key`` or ``default`` when unset."""
        value = self._values.get(key)
        return default if value is None else value

    def as_dict(self):
        """:return: a copy of the values of this section."""
        return dict(self._values)

    def __repr__(self):
        return _pprint.pformat(self._values)


class RunConfig(object):
    """A validated run configuration; sections are attributes."""

    def __init__(self, sections, source=None):
        self.source = source
        self._sections = dict(sections)
        for name, section in self._sections.items():
            self.__dict__[name] = section

    def body_params(self, section_name, kind):
        """
        :return: the body parameters of ``kind`` set in a section, as
            keyword arguments for `BodySpec`.
        """
        section = self._sections[section_name]
        allowed = BODY_KINDS[kind] + tuple(BODY_DEFAULTS.get(kind, ()))
        return dict((key, section[key]) for key in allowed
            if section[key] is not None)

    def as_dict(self):
        """:return: the configuration as nested dictionaries."""
        return dict((name, section.as_dict())
            for name, section in self._sections.items())

    def __repr__(self):
        return 'RunConfig(%s)' % (_pprint.pformat(self.as_dict()),)


def _check(condition, path, message):
    if not condition:
        raise ConfigurationError('%s: %s' % (path, message))


def _validate(config):
    problem = config.problem
    _check(problem.geometry in (FULL_S2, AXISYM), 'problem.geometry',
        'expected FullS2 or Axisym, got %r' % (problem.geometry,))
    _check(problem.n >= 2, 'problem.n', 'must be >= 2, got %d' % problem.n)
    if problem.geometry == FULL_S2:
        _check(problem.n == 2, 'problem.n',
            'FullS2 grids need n = 2, got %d' % problem.n)
        _check(config.grid.nphi is not None, 'grid.nphi',
            'required for FullS2 grids')
    _check(1 <= problem.k <= problem.n, 'problem.k',
        'must lie in [1, n=%d], got %d' % (problem.n, problem.k))
    _check(config.grid.ntheta >= 4, 'grid.ntheta',
        'must be >= 4, got %d' % config.grid.ntheta)

    kind = config.prescription.kind
    _check(kind in PRESCRIPTION_KINDS, 'prescription.kind',
        'expected one of %s, got %r' % (', '.join(PRESCRIPTION_KINDS), kind))
    if kind == 'constant':
        value = config.prescription.value
        _check(value is not None and value > 0, 'prescription.value',
            'a positive value is required')
    elif kind == 'body':
        _check(config.prescription.body is not None, 'prescription.body',
            'a body kind is required')
    elif kind == 'samples':
        _check(config.prescription.file is not None, 'prescription.file',
            'a samples file is required')
    elif kind == 'harmonic':
        _check(config.prescription.coefficients, 'prescription.coefficients',
            'at least one coefficient is required')

    time = config.time
    _check(time.dt0 is None or time.dt0 > 0, 'time.dt0', 'must be positive')
    _check(0 < time.cfl_safety <= 1, 'time.cfl_safety', 'must lie in (0, 1]')
    _check(time.t_max > 0, 'time.t_max', 'must be positive')
    _check(time.max_steps > 0, 'time.max_steps', 'must be positive')
    _check(config.stop.residual_tol > 0, 'stop.residual_tol', 'must be positive')
    mode = config.recentering.mode
    _check(mode in ('diagnostic', 'periodic'), 'recentering.mode',
        'expected diagnostic or periodic, got %r' % (mode,))
    if mode == 'periodic':
        _check(config.recentering.every >= 1, 'recentering.every',
            'must be >= 1 for periodic recentering')
    cont = config.continuation
    _check(0 <= cont.tau0 < 1, 'continuation.tau0', 'must lie in [0, 1)')
    _check(0 < cont.rho < 1, 'continuation.rho', 'must lie in (0, 1)')
    _check(0 < cont.delta < 1, 'continuation.delta', 'must lie in (0, 1)')
    _check(config.check.int_tol > 0, 'check.int_tol', 'must be positive')
    _check(config.check.conv_tol is None or config.check.conv_tol > 0,
        'check.conv_tol', 'must be positive')
    _check(config.output.every_steps >= 1, 'output.every_steps', 'must be >= 1')


def parse_config(text, source=None, environ=None):
    """
    :param text: an INI document.

    :param source: name of the document, used to resolve relative paths.

    :param environ: environment mapping. Default: ``os.environ``.

    :return: a validated `RunConfig`.

    :raise ConfigurationError: on parse errors, unknown or missing keys and
        invalid values; the message names the dotted key path.
    """
    parser = _configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source or '<string>')
    except _configparser.Error as exc:
        raise ConfigurationError('cannot parse %s: %s' % (source or 'config', exc))

    for name in parser.sections():
        if name not in SCHEMA:
            raise ConfigurationError('unknown section %r' % (name,))

    sections = {}
    for name, keys in SCHEMA.items():
        present = dict(parser.items(name)) if parser.has_section(name) else {}
        for key in present:
            if key not in keys:
                raise ConfigurationError('unknown key %s.%s' % (name, key))
        values = {}
        for key, (convert, default) in keys.items():
            path = '%s.%s' % (name, key)
            if key in present:
                try:
                    values[key] = convert(present[key])
                except ValueError:
                    raise ConfigurationError('invalid value for %s: %r'
                        % (path, present[key]))
            elif default is REQUIRED:
                raise ConfigurationError('missing required key %s' % (path,))
            else:
                values[key] = default
        sections[name] = values

    environ = _os.environ if environ is None else environ
    if environ.get(OUTPUT_DIR_ENV):
        sections['output']['dir'] = environ[OUTPUT_DIR_ENV]
    if source and sections['prescription']['file']:
        base = _os.path.dirname(_os.path.abspath(source))
        sections['prescription']['file'] = _os.path.join(base,
            sections['prescription']['file'])

    config = RunConfig(dict((name, Section(name, values))
        for name, values in sections.items()), source=source)
    _validate(config)
    return config


def load_config(path, environ=None):
    """
    :param path: name of an INI file.

    :return: a validated `RunConfig`.
    """
    try:
        with open(path) as fh:
            text = fh.read()
    except (IOError, OSError) as exc:
        raise ConfigurationError('cannot read %s: %s' % (path, exc))
    return parse_config(text, source=path, environ=environ)
