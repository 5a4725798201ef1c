"""Large-scale CLuP detection for binary MIMO systems.

The package is organised as

``kernels``
    scalar special functions of the random-dual objective and their derivatives
``rdt``
    the stationary system, its multi-start Newton solver and error predictions
``engine``
    the clamped single-matvec contraction with restarts and phase schedules
``harness``
    random instances, the box-relaxation baseline, scoring, exhaustive ML
``experiments`` / ``replicate`` / ``cli``
    Monte Carlo sweeps, reference-table replication and the command line
"""

from .engine import PhaseSchedule, RunParams, discretize, run
from .harness import Instance, gen_instance, polytope_relax, score
from .rdt import (
    BoundaryHit,
    NoConvergence,
    RegimeParams,
    StationaryPoint,
    ideal_ml_perr,
    predict_perr,
    run_params_from,
    solve_stationary,
)

__version__ = "0.1.0"
