"""Periodic square-lattice topology and the overlapping game-group structure.

Sites are indexed row-major: site ``y * side + x`` sits at column ``x``,
row ``y``.  Every site hosts one game group (itself plus its neighbors)
and additionally plays in the group of each neighbor.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class Neighborhood(Enum):
    VON_NEUMANN = "von_neumann"
    MOORE = "moore"

    @property
    def degree(self) -> int:
        return 4 if self is Neighborhood.VON_NEUMANN else 8


_OFFSETS = {
    Neighborhood.VON_NEUMANN: ((1, 0), (-1, 0), (0, 1), (0, -1)),
    Neighborhood.MOORE: (
        (1, 0), (-1, 0), (0, 1), (0, -1),
        (1, 1), (1, -1), (-1, 1), (-1, -1),
    ),
}

# A 2x2 torus would make wrapped offsets collide into duplicate neighbors.
_MIN_SIDE = 3


@dataclass(frozen=True)
class Lattice:
    """Immutable neighbor and group tables; safe to share across runs."""

    side: int
    neighborhood: Neighborhood
    neighbor_table: np.ndarray  # (n_sites, degree) int32
    group_table: np.ndarray     # (n_sites, degree + 1) int32, row = center then neighbors

    @property
    def n_sites(self) -> int:
        return self.side * self.side

    @property
    def degree(self) -> int:
        return self.neighborhood.degree

    @property
    def group_size(self) -> int:
        return self.degree + 1


def build_lattice(side: int, kind: Neighborhood = Neighborhood.VON_NEUMANN) -> Lattice:
    """Build the torus topology for the given side length and neighborhood.

    Deterministic; raises ValueError for sides too small to give each site
    distinct neighbors.
    """
    if not isinstance(kind, Neighborhood):
        kind = Neighborhood(kind)
    if side < _MIN_SIDE:
        raise ValueError(
            f"invalid lattice side {side}: {kind.value} needs side >= {_MIN_SIDE}"
        )
    n = side * side
    degree = kind.degree
    neighbor_table = np.empty((n, degree), dtype=np.int32)
    offsets = _OFFSETS[kind]
    for y in range(side):
        for x in range(side):
            i = y * side + x
            for k, (dx, dy) in enumerate(offsets):
                neighbor_table[i, k] = ((y + dy) % side) * side + (x + dx) % side
    group_table = np.empty((n, degree + 1), dtype=np.int32)
    group_table[:, 0] = np.arange(n, dtype=np.int32)
    group_table[:, 1:] = neighbor_table
    return Lattice(side, kind, neighbor_table, group_table)


def groups_containing(lat: Lattice, i: int) -> np.ndarray:
    """Centers of the groups site ``i`` plays in: itself, then its neighbors."""
    if not 0 <= i < lat.n_sites:
        raise IndexError(f"site index {i} out of range for side {lat.side}")
    return lat.group_table[i].copy()
