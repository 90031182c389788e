"""Spatial public goods game with reputation-gated punishment of defectors."""

from .lattice import Lattice, Neighborhood, build_lattice, groups_containing
from .state import (
    COOPERATE,
    DEFECT,
    MAX_REPUTATION,
    Population,
    SimParams,
    init_population,
    step_reputation,
    sweep_reputations,
)
from .game import GroupAssessment, assess_group, member_payoff, total_payoff
from .evolution import (
    RunObserverHooks,
    RunResult,
    elementary_revision,
    fitness,
    imitation_probability,
    mc_step,
    run,
)
from .metrics import (
    SnapshotFrame,
    TimeSeries,
    capture_snapshot,
    cooperation_fraction,
    ensemble_mean,
    tail_average,
)
from .rng import Pcg32, derive_seed

__version__ = "0.1.0"
