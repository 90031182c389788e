"""Group payoffs under reputation-gated punishment of defectors.

Each group pools one unit from every cooperator, multiplies by the
enhancement factor and shares equally.  Groups whose average reputation
falls strictly below the threshold additionally fine every defector; at
or above the threshold defection is tolerated.

These are the reference implementations: pure functions of the current
state, recomputed on demand and never accumulated across time steps.
The compiled kernel in ``_kernel`` replays the same arithmetic in the
same order, which the test suite checks bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import Lattice
from .state import COOPERATE, Population, SimParams


@dataclass(frozen=True)
class GroupAssessment:
    """One group's composition and its punishment verdict."""

    center: int
    members: np.ndarray
    n_cooperators: int
    avg_reputation: float
    punished: bool


def assess_group(pop: Population, lat: Lattice, center: int, params: SimParams) -> GroupAssessment:
    """Count cooperators and test the punishment gate for one group.

    The mean runs over the full member list, center included; the gate is
    a strict comparison, so a group sitting exactly at the threshold is
    tolerated.
    """
    if not 0 <= center < lat.n_sites:
        raise IndexError(f"group center {center} out of range for side {lat.side}")
    members = lat.group_table[center]
    n_cooperators = int(pop.strategies[members].sum())
    total = 0.0
    for m in members:
        total += float(pop.reputations[m])
    avg = total / lat.group_size
    return GroupAssessment(
        center=center,
        members=members,
        n_cooperators=n_cooperators,
        avg_reputation=avg,
        punished=avg < params.rep_threshold,
    )


def member_payoff(assessment: GroupAssessment, member: int, strategy: int, params: SimParams) -> float:
    """Payoff one member takes from this group.

    ``n_cooperators`` counts every cooperating member including the focal
    one, so a cooperator's own contribution is already in the pool and the
    net formula is r*Nc/G - 1; a defector collects r*Nc/G, minus the fine
    when the group is punished.
    """
    members = assessment.members
    if not np.any(members == member):
        raise ValueError(f"site {member} is not a member of group {assessment.center}")
    g = len(members)
    share = params.r * assessment.n_cooperators / g
    if strategy == COOPERATE:
        return share - 1.0
    if assessment.punished:
        return share - params.b
    return share


def total_payoff(pop: Population, lat: Lattice, i: int, params: SimParams) -> float:
    """Sum of ``i``'s payoffs over every group it plays in.

    Stateless: each group is assessed from the current population on every
    call, so payoffs always reflect the live strategy and reputation state.
    """
    if not 0 <= i < lat.n_sites:
        raise IndexError(f"site index {i} out of range for side {lat.side}")
    strategy = int(pop.strategies[i])
    total = 0.0
    for center in lat.group_table[i]:
        a = assess_group(pop, lat, int(center), params)
        total += member_payoff(a, i, strategy, params)
    return total
