"""Simulation parameters and the evolving population state."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .lattice import Neighborhood
from .rng import MASK64, Pcg32

COOPERATE = 1
DEFECT = 0

MAX_REPUTATION = 20.0

FERMI_SIGNS = ("prose", "printed")
REPUTATION_TIMINGS = ("per_step", "per_revision")


@dataclass(frozen=True)
class SimParams:
    """Full parameter vector for one simulation run.

    All ranges are validated at construction; instances are immutable and
    picklable, so they travel unchanged into worker processes.
    """

    r: float = 2.5                 # enhancement factor applied to the group pool
    b: float = 0.2                 # fine charged to defectors of punished groups
    rep_threshold: float = 4.0     # group-average reputation below which fines apply
    delta: float = 0.5             # weight of payoff vs. reputation in fitness
    kappa: float = 0.5             # imitation noise
    rep_scale: float = 20.0        # normalises the reputation term of fitness
    side: int = 60
    steps: int = 10_000
    seed: int = 0
    neighborhood: Neighborhood = Neighborhood.VON_NEUMANN
    tail_window: int = 500
    replicas: int = 20
    fermi_sign: str = "prose"
    reputation_timing: str = "per_step"
    early_exit: bool = False
    record_reputation: bool = True

    def __post_init__(self):
        if isinstance(self.neighborhood, str):
            object.__setattr__(self, "neighborhood", Neighborhood(self.neighborhood))
        object.__setattr__(self, "seed", int(self.seed) & MASK64)
        if not self.r >= 1.0:
            raise ValueError(f"r must be >= 1, got {self.r}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0, 1], got {self.b}")
        if not 0.0 <= self.rep_threshold <= MAX_REPUTATION:
            raise ValueError(
                f"rep_threshold must be in [0, {MAX_REPUTATION:g}], got {self.rep_threshold}"
            )
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must be in [0, 1], got {self.delta}")
        if not self.kappa > 0.0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not self.rep_scale > 0.0:
            raise ValueError(f"rep_scale must be positive, got {self.rep_scale}")
        if self.side < 2:
            raise ValueError(f"side must be >= 2, got {self.side}")
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if self.tail_window < 1:
            raise ValueError(f"tail_window must be >= 1, got {self.tail_window}")
        if self.steps > 0 and self.tail_window > self.steps:
            raise ValueError(
                f"tail_window {self.tail_window} exceeds step budget {self.steps}"
            )
        if self.replicas < 1:
            raise ValueError(f"replicas must be >= 1, got {self.replicas}")
        if self.fermi_sign not in FERMI_SIGNS:
            raise ValueError(f"fermi_sign must be one of {FERMI_SIGNS}, got {self.fermi_sign!r}")
        if self.reputation_timing not in REPUTATION_TIMINGS:
            raise ValueError(
                f"reputation_timing must be one of {REPUTATION_TIMINGS}, got {self.reputation_timing!r}"
            )

    @property
    def n_sites(self) -> int:
        return self.side * self.side


@dataclass
class Population:
    """Per-agent strategy and reputation arrays (the evolving state)."""

    strategies: np.ndarray   # int8, COOPERATE=1 / DEFECT=0
    reputations: np.ndarray  # float64 in [0, MAX_REPUTATION]

    def __post_init__(self):
        self.strategies = np.asarray(self.strategies, dtype=np.int8)
        self.reputations = np.asarray(self.reputations, dtype=np.float64)
        if self.strategies.shape != self.reputations.shape or self.strategies.ndim != 1:
            raise ValueError("strategies and reputations must be 1-D arrays of equal length")

    @property
    def n(self) -> int:
        return self.strategies.shape[0]

    def copy(self) -> "Population":
        return Population(self.strategies.copy(), self.reputations.copy())

    def state_hash(self) -> str:
        """Stable digest of the full state, for determinism checks."""
        import hashlib

        h = hashlib.sha256()
        h.update(self.strategies.tobytes())
        h.update(self.reputations.tobytes())
        return h.hexdigest()


def init_population(params: SimParams, rng: Pcg32) -> Population:
    """Draw the initial state: fair-coin strategies, integer reputations.

    Each strategy is COOPERATE with probability 1/2; each reputation is
    uniform on the integers {0, ..., 20}.  Consumes one stream draw per
    strategy and at least one per reputation, in site order, so the state
    is fully determined by the seed.
    """
    n = params.n_sites
    strategies = np.empty(n, dtype=np.int8)
    reputations = np.empty(n, dtype=np.float64)
    for i in range(n):
        strategies[i] = rng.next_u32() & 1
    for i in range(n):
        reputations[i] = float(rng.below(int(MAX_REPUTATION) + 1))
    return Population(strategies, reputations)


def step_reputation(current: float, strategy: int) -> float:
    """One reputation update: +1 for a cooperator, -1 for a defector, clamped."""
    if strategy == COOPERATE:
        return min(current + 1.0, MAX_REPUTATION)
    return max(current - 1.0, 0.0)


def sweep_reputations(pop: Population) -> Population:
    """Apply the reputation update to every agent simultaneously.

    Element-wise on the pre-update state, so agent order cannot matter.
    Returns a new Population; the input is left untouched.
    """
    up = np.minimum(pop.reputations + 1.0, MAX_REPUTATION)
    down = np.maximum(pop.reputations - 1.0, 0.0)
    reps = np.where(pop.strategies == COOPERATE, up, down)
    return Population(pop.strategies.copy(), reps)
