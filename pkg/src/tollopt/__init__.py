"""Welfare-maximizing time-of-day road pricing for a single-reservoir network."""

from .bo import BOConfig, BOTrace, DropoutSpec, dropout_select, lhs, maximize_acquisition, run_bo
from .config import ExperimentConfig, config_from_dict, dump_config, load_config
from .dynamics import (
    CostTable,
    DayRecord,
    DayToDayConfig,
    EquilibriumResult,
    as_arrays,
    choice_probabilities,
    experienced_cost,
    inconsistency,
    learning_update,
    run_day_to_day,
)
from .errors import (
    ConfigurationError,
    EncodingError,
    GridlockError,
    NumericalError,
    SamplingError,
    TollOptError,
)
from .experiments import make_welfare_objective, run_fixed_toll, run_nte, run_optimize
from .gp import GPModel, KernelParams, fit_hyperparameters, matern_kernel, posterior, ucb
from .mfd import (
    DaySimResult,
    NetworkParams,
    TrajectoryIntegrator,
    critical_accumulation,
    probe_travel_time,
    simulate_day,
    speed,
)
from .population import (
    PopulationConfig,
    TravelerProfile,
    build_population,
    sample_penalties,
    sample_truncated_normal,
)
from .toll import (
    GaussianComponent,
    TollBounds,
    TollProfile,
    clamp_to_bounds,
    eval_toll,
    from_vector,
    to_vector,
)
from .welfare import WelfareReport, cost_components, welfare_nte, welfare_todp

__version__ = "0.1.0"
