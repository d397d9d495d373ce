#-----------------------------------------------------------------------------
#   Copyright (c) 2024 by the cmflow developers. All rights reserved.
#
#   Released under the BSD license. See the LICENSE file for details.
#-----------------------------------------------------------------------------
"""A constrained curvature flow solver for the Christoffel-Minkowski problem."""

#: Version info (major, minor, maintenance, status)
__version__ = '0.1.0'
VERSION = tuple(int(part) for part in __version__.split('.'))
STATUS = ''

import sys as _sys

if _sys.version_info[0:2] < (3, 6):
    raise RuntimeError('Python 3.6.x or higher is required!')

from cmflow.core import (CMFlowError, ConfigurationError, GridMismatchError,
    ConvexityLostError, StepFailureError, ConvergenceError,
    InadmissiblePrescriptionError, SnapshotError, FULL_S2, AXISYM,
    Publisher, Subscriber, LoggingSubscriber)

from cmflow.grid import (Grid, ScalarField, CovariantDerivatives, build_grid,
    integrate, covariant_gradient, covariant_hessian)

from cmflow.convexity import (RadiiForm, RadiiSpectrum, CurvatureView,
    radii_form, radii_spectrum, radii_eigenvalues, elem_sym, pk_field,
    curvature_view, convexity_margin)

from cmflow.flow import (FlowState, StepReport, global_term, time_derivative,
    step, centroid, recenter, stable_dt)

from cmflow.diagnostics import (DiagnosticsRecord, DiagnosticsRecorder,
    conserved_quantity, weighted_mean, weighted_mean_rate, gamma_value,
    residual, pinching_margin, epsilon0_recipe, widths, volume, support_bounds)

from cmflow.flow.engine import FlowEngine, FlowResult, run_flow

from cmflow.continuation import (Admissibility, ContinuationResult,
    make_phi_tau, solve_translation, admissibility_check, tau_schedule,
    continuation_run)

from cmflow.contrib.oracle import (BodySpec, gen_body, forward_map,
    degenerate_prescription, amplitude_for_margin,
    ellipsoid_minkowski_prescription)

from cmflow.config import RunConfig, load_config, parse_config

from cmflow.io import (DiagnosticsCSVWriter, write_diagnostics,
    read_diagnostics, write_snapshot, load_snapshot, write_samples,
    load_samples, write_summary, export_mesh)
