"""spheroid: radially symmetric two-species tumor free-boundary toolkit.

The tumor occupies a ball of radius R(t) = e^{z(t)}; after rescaling to
the unit interval the model couples a (possibly quasi-static) nutrient
diffusion equation, a hyperbolic equation for the proliferating cell
fraction, a velocity quadrature, and the free-boundary ODE dz/dt = v(1).
The package computes the stationary solution, integrates the coupled
system, and measures the exponential return to the stationary state.
"""

from .analysis import (DecayFit, admissible_init, deviation_norms,
                       effective_absorption, fit_decay, self_convergence,
                       stability_experiment, standard_convergence_suite)
from .config import (RunConfig, config_hash, default_config, dumps_config,
                     load_config, loads_config, save_config)
from .errors import (BracketError, ConfigError, ConvergenceError, DomainError,
                     InsufficientDataError, NumericsError, SnapshotError,
                     SpheroidError, UnknownRateError)
from .evolution import (SolverConfig, State, VelocityField,
                        boundary_radius_step, nutrient_step,
                        quasi_static_update, simulate, step, transport_step,
                        velocity_from_state)
from .grid import Grid
from .nutrient import (NutrientProfile, bounds_report, flux_residual,
                       solve_nutrient)
from .rates import (Rate, RateModel, check_assumptions, default_model,
                    eval_rate, f_reaction, g_source)
from .records import AdmissibilityReport, DeviationRecord, admissibility_report
from .snapshot import load_snapshot, save_snapshot
from .stationary import (StationarySolution, equilibrium_fraction,
                         solve_stationary, stationary_by_bisection)

__version__ = "0.1.0"
