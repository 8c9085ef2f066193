"""Jet-Lagrange geometry and resonant dynamics of the 2D-monolayer Lagrangian.

The package has four layers:

* :mod:`jetlag.geometry` -- a generic pipeline deriving metric, semispray,
  nonlinear/Cartan connections, torsions and the electromagnetic d-form
  from any Lagrangian by finite differences (the independent oracle);
* :mod:`jetlag.monolayer` -- closed forms for the monolayer Lagrangian,
  both exact and as printed (leading-order) displays;
* :mod:`jetlag.dynamics` -- geodesic integration, instanton energy,
  Hamiltonian decomposition, resonant trajectories and Jacobi deviations;
* :mod:`jetlag.cli` -- the ``jetlag`` command-line front end.
"""

from .dynamics import (
    DeviationState,
    SimConfig,
    TrajectorySeries,
    TrajectoryState,
    compose_perturbed,
    deviation_integrate,
    hamiltonian_split,
    instanton_energy,
    integrate_geodesic,
    resonant_trajectory,
    singularity_scan,
    time_reverse,
)
from .errors import ConfigError, DomainError, JetLagError, SingularMetricError, StencilDomainError
from .expint import exp_integral_f
from .geometry import (
    AdaptedFrame,
    CartanConnection,
    EMForm,
    GeometryBundle,
    GeometryEvaluator,
    Metric,
    NonlinearConnection,
    Semispray,
    TorsionSet,
    adapted_derivative,
    cartan_connection,
    em_form,
    evaluate_bundle,
    maxwell_vertical_residual,
    metric_from_lagrangian,
    metricity_residuals,
    nonlinear_connection,
    numeric_partials,
    semispray_from_lagrangian,
    torsions,
    ym_energy,
)
from .models import FreePolarModel, LagrangianModel, PolynomialModel
from .monolayer import (
    MonolayerModel,
    MonolayerParams,
    PhysicalSubParams,
    closed_cartan,
    closed_em_and_ym,
    closed_metric,
    closed_nonlinear_connection,
    closed_semispray,
    closed_torsions,
    lagrangian_value,
    potential_U,
    pressure_param,
)
from .points import JetPoint, TimeMetric, jet_point
from .validate import DiscrepancyReport, run_validation

__version__ = "0.1.0"
