"""Fitness, Fermi imitation, and the asynchronous Monte Carlo scheduler.

Two execution paths advance the same dynamics:

* ``elementary_revision`` / ``mc_step``: a pure-Python reference loop,
  convenient for small lattices and for pinning down semantics in tests;
* ``run``: the production driver, which hands the inner loop to the
  compiled kernel in chunks delimited by observer callbacks.

Both consume the same PCG32 stream in the same order, so for a given
seed they produce bit-identical trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import _kernel
from .game import total_payoff
from .lattice import Lattice, build_lattice
from .metrics import TimeSeries
from .rng import Pcg32
from .state import (
    MAX_REPUTATION,
    Population,
    SimParams,
    init_population,
    step_reputation,
)


def fitness(payoff: float, reputation: float, params: SimParams) -> float:
    """Blend of payoff and threshold-relative reputation.

    With delta=1 this is the bare payoff; with delta=0 only the agent's
    standing relative to the punishment threshold matters.
    """
    return params.delta * payoff + (1.0 - params.delta) * (reputation - params.rep_threshold) / params.rep_scale


def imitation_probability(f_focal: float, f_model: float, kappa: float, sign: str = "prose") -> float:
    """Fermi rule: probability that the focal agent copies the model agent.

    The default orientation makes a fitter model (f_model > f_focal) more
    likely to be copied, approaching certainty as kappa -> 0.  ``printed``
    flips the exponent's sign, for probing the inverted variant.
    """
    if kappa <= 0.0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    if sign == "prose":
        x = (f_focal - f_model) / kappa
    elif sign == "printed":
        x = (f_model - f_focal) / kappa
    else:
        raise ValueError(f"unknown fermi sign {sign!r}")
    if x > _kernel.EXP_CUTOFF:
        return 0.0
    if x < -_kernel.EXP_CUTOFF:
        return 1.0
    return 1.0 / (1.0 + math.exp(x))


def elementary_revision(pop: Population, lat: Lattice, params: SimParams, rng: Pcg32) -> Population:
    """One asynchronous revision attempt, in place.

    Draws a random focal agent and one of its neighbors, then lets the
    focal agent copy the neighbor's strategy with the Fermi probability
    computed from both agents' full current payoffs.  At most one agent
    changes; when the two strategies already agree nothing can change, so
    no payoffs are computed and no imitation draw is consumed.
    """
    i = rng.below(lat.n_sites)
    slot = rng.below(lat.degree)
    j = int(lat.neighbor_table[i, slot])
    if pop.strategies[i] != pop.strategies[j]:
        pay_i = total_payoff(pop, lat, i, params)
        pay_j = total_payoff(pop, lat, j, params)
        f_i = fitness(pay_i, float(pop.reputations[i]), params)
        f_j = fitness(pay_j, float(pop.reputations[j]), params)
        p = imitation_probability(f_i, f_j, params.kappa, params.fermi_sign)
        if rng.uniform() < p:
            pop.strategies[i] = pop.strategies[j]
    if params.reputation_timing == "per_revision":
        pop.reputations[i] = step_reputation(float(pop.reputations[i]), int(pop.strategies[i]))
    return pop


def mc_step(pop: Population, lat: Lattice, params: SimParams, rng: Pcg32) -> Population:
    """One Monte Carlo step: n_sites revision attempts, then the reputation sweep."""
    for _ in range(lat.n_sites):
        elementary_revision(pop, lat, params, rng)
    if params.reputation_timing == "per_step":
        up = np.minimum(pop.reputations + 1.0, MAX_REPUTATION)
        down = np.maximum(pop.reputations - 1.0, 0.0)
        pop.reputations[:] = np.where(pop.strategies == 1, up, down)
    return pop


@dataclass
class RunObserverHooks:
    """Observer slots for a run; callbacks must not mutate the population.

    ``on_step`` fires at step 0 (the initial state) if requested, and
    otherwise after the given MC step completes.
    """

    on_step: Optional[Callable[[int, Population], None]] = None
    at_steps: Sequence[int] = ()
    every: Optional[int] = None

    def observation_steps(self, total_steps: int) -> list[int]:
        wanted = {s for s in self.at_steps if 0 <= s <= total_steps}
        if self.every:
            wanted.update(range(0, total_steps + 1, self.every))
        return sorted(wanted)


@dataclass
class RunResult:
    series: TimeSeries
    final: Population


def run(params: SimParams, hooks: Optional[RunObserverHooks] = None,
        initial: Optional[Population] = None) -> RunResult:
    """Initialize and advance a full simulation.

    The cooperation fraction (and mean reputation unless disabled) is
    recorded for step 0 and after every MC step.  With ``early_exit`` set,
    stepping stops once the strategies are homogeneous and all reputations
    sit at their fixed point; the recorded series is continued with the
    frozen values, which is exact because such states cannot change.

    Passing ``initial`` skips the seeded initialization and evolves a copy
    of the given state instead.
    """
    lat = build_lattice(params.side, params.neighborhood)
    rng = Pcg32(params.seed)
    if initial is None:
        pop = init_population(params, rng)
    else:
        if initial.n != lat.n_sites:
            raise ValueError("initial population size does not match the lattice")
        pop = initial.copy()

    n = lat.n_sites
    steps = params.steps
    rho = np.empty(steps + 1, dtype=np.float64)
    mean_rep = np.empty(steps + 1, dtype=np.float64) if params.record_reputation else None

    coop_count = int(pop.strategies.sum())
    rho[0] = coop_count / n
    if mean_rep is not None:
        mean_rep[0] = float(pop.reputations.sum()) / n

    hooks = hooks or RunObserverHooks()
    observe = hooks.observation_steps(steps) if hooks.on_step else []
    if hooks.on_step and observe and observe[0] == 0:
        hooks.on_step(0, pop)
        observe = observe[1:]

    boundaries = sorted(set(observe) | {steps}) if steps > 0 else []
    rng_state = rng.state_vector()
    empty = np.empty(0, dtype=np.float64)
    absorbed = False
    done = 0
    for boundary in boundaries:
        chunk = boundary - done
        if chunk > 0:
            if absorbed:
                rho[done + 1:boundary + 1] = rho[done]
                if mean_rep is not None:
                    mean_rep[done + 1:boundary + 1] = mean_rep[done]
            else:
                coop_count, absorbed = _kernel.run_chunk(
                    pop.strategies, pop.reputations,
                    lat.neighbor_table, lat.group_table, rng_state,
                    params.r, params.b, params.rep_threshold,
                    params.delta, params.kappa, params.rep_scale,
                    chunk, params.fermi_sign == "printed",
                    params.reputation_timing == "per_revision",
                    params.early_exit,
                    rho, mean_rep if mean_rep is not None else empty,
                    done + 1, coop_count,
                )
            done = boundary
        if hooks.on_step and done in observe:
            hooks.on_step(done, pop)

    series = TimeSeries(
        steps=np.arange(steps + 1, dtype=np.int64),
        rho_c=rho,
        mean_reputation=mean_rep,
    )
    return RunResult(series=series, final=pop)
