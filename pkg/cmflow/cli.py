#!/usr/bin/env python
#-----------------------------------------------------------------------------
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
#-----------------------------------------------------------------------------
"""command line driver for the cmflow solver"""

import argparse
import logging
import os
import sys

import cmflow
from cmflow.core import (CMFlowError, ConvergenceError, ConvexityLostError,
    InadmissiblePrescriptionError, LoggingSubscriber)
from cmflow.grid import build_grid
from cmflow.flow import FlowState
from cmflow.flow.engine import FlowEngine
from cmflow.continuation import (admissibility_check, continuation_run,
    tau_schedule, INADMISSIBLE)
from cmflow.contrib.oracle import (BodySpec, gen_body, forward_map,
    degenerate_prescription, harmonic_prescription)
from cmflow.config import load_config
from cmflow.io import (DiagnosticsCSVWriter, write_snapshot, load_snapshot,
    load_samples, write_summary, export_mesh)

log = logging.getLogger('cmflow.cli')

#: Process exit codes.
EXIT_CONVERGED = 0
EXIT_ERROR = 1
EXIT_INADMISSIBLE = 2
EXIT_CONVEXITY_LOST = 3
EXIT_NOT_CONVERGED = 4

DIAGNOSTICS_FILE = 'diagnostics.csv'
STATE_FILE = 'state.json'
SUMMARY_FILE = 'summary.json'


def make_grid(config):
    """:return: the `Grid` a configuration asks for."""
    return build_grid(config.problem.geometry, config.grid.ntheta,
        config.grid.nphi, config.problem.n)


def make_prescription(config, grid):
    """:return: the prescription phi of a configuration on ``grid``."""
    section = config.prescription
    k = config.problem.k
    kind = section.kind
    if kind == 'constant':
        return grid.constant(section.value)
    if kind == 'samples':
        return load_samples(section.file, grid)
    if kind == 'harmonic':
        return harmonic_prescription(section.coefficients, grid)
    if kind == 'body':
        spec = BodySpec(section.body, **config.body_params('prescription',
            section.body))
        return forward_map(gen_body(spec, grid), k)
    params = config.body_params('prescription', 'harmonic_perturbed')
    params.setdefault('amplitude', 0.0)
    spec = BodySpec('harmonic_perturbed', **params)
    return degenerate_prescription(spec, k, grid, scale=section.scale)


def make_initial(config, grid):
    """:return: the initial support function of a configuration."""
    kind = config.initial.kind
    params = config.body_params('initial', kind)
    if kind == 'sphere':
        params.setdefault('radius', 1.0)
    return gen_body(BodySpec(kind, **params), grid)


def _classify(config, phi):
    result = admissibility_check(phi, config.problem.k,
        conv_tol=config.check.conv_tol, int_tol=config.check.int_tol)
    log.info('prescription is %s', result)
    return result


def _output_dir(config):
    path = config.output.dir
    if not os.path.isdir(path):
        os.makedirs(path)
    return path


def _engine_options(config):
    return dict(cfl_safety=config.time.cfl_safety, dt0=config.time.dt0,
        recentering=config.recentering.mode,
        recenter_every=config.recentering.every,
        every_steps=config.output.every_steps)


def cmd_run(args):
    config = load_config(args.config)
    if config.continuation.enabled:
        return cmd_continue(args)
    grid = make_grid(config)
    k = config.problem.k
    phi = make_prescription(config, grid)
    check = _classify(config, phi)
    if check.margin < -check.conv_tol:
        raise InadmissiblePrescriptionError('prescription is not convex: %s'
            % (check,))
    if check.classification == INADMISSIBLE:
        log.warning('integral condition fails (%.3e > %.3e); the flow will '
            'not settle on a solution', check.integral_ratio, check.int_tol)
    if args.resume:
        state = load_snapshot(args.resume, grid=grid, k=k)
    else:
        state = FlowState(make_initial(config, grid), k)
    out = _output_dir(config)
    engine = FlowEngine(state, phi, **_engine_options(config))
    writer = DiagnosticsCSVWriter(os.path.join(out, DIAGNOSTICS_FILE), grid.n)
    engine.attach(writer)
    if args.verbose or args.debug:
        engine.attach(LoggingSubscriber())
    try:
        result = engine.run(residual_tol=config.stop.residual_tol,
            t_max=config.time.t_max, max_steps=config.time.max_steps)
    except ConvergenceError as exc:
        write_snapshot(exc.state, os.path.join(out, STATE_FILE))
        write_summary(None, os.path.join(out, SUMMARY_FILE),
            status='not_converged', t=exc.state.t, steps=exc.state.step_index,
            message=str(exc))
        raise
    finally:
        writer.close()
    write_snapshot(engine.state, os.path.join(out, STATE_FILE))
    write_summary(result, os.path.join(out, SUMMARY_FILE))
    print('converged: t=%.6g steps=%d gamma=%.10g mu=%.10g residual=%.3e'
        % (engine.state.t, engine.state.step_index, result.gamma, result.mu,
        result.residual))
    return EXIT_CONVERGED


def cmd_check(args):
    config = load_config(args.config)
    grid = make_grid(config)
    result = _classify(config, make_prescription(config, grid))
    print('%s margin=%.6g integral_ratio=%.3e conv_tol=%.3e int_tol=%.3e'
        % (result.classification, result.margin, result.integral_ratio,
        result.conv_tol, result.int_tol))
    if result.classification == INADMISSIBLE:
        return EXIT_INADMISSIBLE
    return EXIT_CONVERGED


def cmd_continue(args):
    config = load_config(args.config)
    grid = make_grid(config)
    k = config.problem.k
    phi = make_prescription(config, grid)
    check = _classify(config, phi)
    if check.classification == INADMISSIBLE:
        raise InadmissiblePrescriptionError('cannot continue towards an '
            'inadmissible prescription: %s' % (check,))
    cont = config.continuation
    schedule = tau_schedule(cont.tau0, cont.rho, cont.delta)
    out = _output_dir(config)
    writer = DiagnosticsCSVWriter(os.path.join(out, DIAGNOSTICS_FILE), grid.n)
    try:
        result = continuation_run(phi, k, schedule=schedule,
            initial=make_initial(config, grid),
            residual_tol=config.stop.residual_tol, t_max=config.time.t_max,
            max_steps=config.time.max_steps, subscribers=(writer,),
            **_engine_options(config))
    finally:
        writer.close()
    write_snapshot(FlowState(result.solution, k), os.path.join(out, STATE_FILE))
    write_summary(result, os.path.join(out, SUMMARY_FILE), status='converged')
    for stage in result.stages:
        print('tau=%.6g |z|=%.3e gamma=%.6g residual=%.3e' % (stage.tau,
            stage.z_norm, stage.gamma, stage.residual))
    print('final residual against phi %.3e, margin %.6g'
        % (result.residual, result.margin))
    return EXIT_CONVERGED


def cmd_export(args):
    state = load_snapshot(args.snapshot)
    export_mesh(state, args.mesh)
    print('wrote %s' % (args.mesh,))
    return EXIT_CONVERGED


def build_parser():
    """:return: the `argparse.ArgumentParser` of the cmflow command."""
    parser = argparse.ArgumentParser(prog='cmflow', description=__doc__)
    parser.add_argument('--version', action='version',
        version='%(prog)s ' + cmflow.__version__)
    parser.add_argument('-v', '--verbose', action='store_true',
        help='log progress at INFO level')
    parser.add_argument('-d', '--debug', action='store_true',
        help='log every step at DEBUG level')
    verbs = parser.add_subparsers(dest='verb')
    verbs.required = True

    run = verbs.add_parser('run', help='run the flow to convergence')
    run.add_argument('config', help='INI run configuration')
    run.add_argument('--resume', metavar='SNAPSHOT',
        help='continue from a saved state')
    run.set_defaults(func=cmd_run)

    check = verbs.add_parser('check', help='classify the prescription')
    check.add_argument('config', help='INI run configuration')
    check.set_defaults(func=cmd_check)

    cont = verbs.add_parser('continue',
        help='solve a weakly admissible problem by continuation')
    cont.add_argument('config', help='INI run configuration')
    cont.set_defaults(func=cmd_continue, resume=None)

    export = verbs.add_parser('export', help='write a snapshot as an OBJ mesh')
    export.add_argument('snapshot', help='snapshot file')
    export.add_argument('mesh', help='OBJ file to write')
    export.set_defaults(func=cmd_export)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.WARNING
    if args.debug:
        level = logging.DEBUG
    elif args.verbose:
        level = logging.INFO
    logging.basicConfig(level=level,
        format='%(asctime)s %(name)s %(levelname)s %(message)s')
    try:
        return args.func(args)
    except InadmissiblePrescriptionError as exc:
        sys.stderr.write('inadmissible prescription: %s\n' % (exc,))
        return EXIT_INADMISSIBLE
    except ConvexityLostError as exc:
        sys.stderr.write('convexity lost: %s\n' % (exc,))
        return EXIT_CONVEXITY_LOST
    except ConvergenceError as exc:
        sys.stderr.write('not converged: %s\n' % (exc,))
        return EXIT_NOT_CONVERGED
    except CMFlowError as exc:
        sys.stderr.write('error: %s\n' % (exc,))
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
