"""Observables: cooperation fraction, tail averages, ensembles, snapshots."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .state import MAX_REPUTATION, Population


@dataclass
class TimeSeries:
    """Per-step trajectory of the cooperation fraction."""

    steps: np.ndarray
    rho_c: np.ndarray
    mean_reputation: Optional[np.ndarray] = None

    def __post_init__(self):
        self.steps = np.asarray(self.steps, dtype=np.int64)
        self.rho_c = np.asarray(self.rho_c, dtype=np.float64)
        if len(self.steps) != len(self.rho_c):
            raise ValueError("steps and rho_c must have equal length")
        if self.mean_reputation is not None:
            self.mean_reputation = np.asarray(self.mean_reputation, dtype=np.float64)
            if len(self.mean_reputation) != len(self.steps):
                raise ValueError("mean_reputation length mismatch")
        if len(self.steps) > 1 and not np.all(np.diff(self.steps) > 0):
            raise ValueError("step indices must be strictly increasing")
        if len(self.rho_c) and (self.rho_c.min() < 0.0 or self.rho_c.max() > 1.0):
            raise ValueError("rho_c values must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class SnapshotFrame:
    """Full strategy and reputation grids captured at one step."""

    step: int
    strategy_grid: np.ndarray    # (side, side) int8 of {0, 1}
    reputation_grid: np.ndarray  # (side, side) float64 in [0, 20]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SnapshotFrame):
            return NotImplemented
        return (
            self.step == other.step
            and np.array_equal(self.strategy_grid, other.strategy_grid)
            and np.array_equal(self.reputation_grid, other.reputation_grid)
        )


def cooperation_fraction(pop: Population) -> float:
    """Fraction of cooperators in the population."""
    return float(pop.strategies.sum()) / pop.n


def tail_average(series: TimeSeries, window: int) -> float:
    """Mean of the last ``window`` recorded cooperation fractions."""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if window > len(series):
        raise ValueError(f"window {window} exceeds series length {len(series)}")
    return float(np.mean(series.rho_c[-window:]))


def ensemble_mean(values) -> tuple[float, float]:
    """Mean and sample standard deviation over replica outcomes."""
    vals = np.asarray(list(values), dtype=np.float64)
    if vals.size == 0:
        raise ValueError("cannot average an empty ensemble")
    mean = float(vals.mean())
    sd = 0.0 if vals.size == 1 else float(vals.std(ddof=1))
    return mean, sd


def capture_snapshot(pop: Population, step: int) -> SnapshotFrame:
    """Deep-copy the current grids; later evolution cannot mutate the frame."""
    side = math.isqrt(pop.n)
    if side * side != pop.n:
        raise ValueError(f"population size {pop.n} is not a square grid")
    return SnapshotFrame(
        step=step,
        strategy_grid=pop.strategies.reshape(side, side).copy(),
        reputation_grid=pop.reputations.reshape(side, side).copy(),
    )
