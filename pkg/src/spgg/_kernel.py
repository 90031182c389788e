"""Compiled hot loop for the asynchronous Monte Carlo dynamics.

Mirrors the pure-Python reference path (``game`` + ``evolution``)
operation for operation: same PCG32 stream, same order of float
arithmetic, so a run through this kernel is bit-identical to the
reference loop given the same seed.  The test suite enforces this.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# PCG32 constants (uint64 throughout; Python ints would promote badly).
_MULT = np.uint64(6364136223846793005)
_U18 = np.uint64(18)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U32 = np.uint64(32)
_U59 = np.uint64(59)
_M32 = np.uint64(0xFFFFFFFF)
_INV_2_32 = 2.0**-32

# Beyond this the logistic saturates past any representable draw, and
# CPython's math.exp would overflow where C's silently returns inf.
EXP_CUTOFF = 700.0

MAX_REPUTATION = 20.0


@njit(cache=True)
def _pcg_next(rng):
    old = rng[0]
    rng[0] = old * _MULT + rng[1]
    xorshifted = (((old >> _U18) ^ old) >> _U27) & _M32
    rot = old >> _U59
    return ((xorshifted >> rot) | (xorshifted << ((_U32 - rot) & _U31))) & _M32


@njit(cache=True)
def _pcg_uniform(rng):
    return float(_pcg_next(rng)) * _INV_2_32


@njit(cache=True)
def _pcg_below(rng, n, mask):
    while True:
        v = _pcg_next(rng) & mask
        if v < n:
            return v


@njit(cache=True)
def _mask_for(n):
    m = np.uint64(1)
    while m < n:
        m = m + m
    return m - np.uint64(1)


@njit(cache=True)
def _site_payoff(strategies, reputations, group_table, i, r, b, rep_threshold):
    g = group_table.shape[1]
    s_i = strategies[i]
    total = 0.0
    for gi in range(g):
        c = group_table[i, gi]
        nc = 0
        rep_sum = 0.0
        for k in range(g):
            m = group_table[c, k]
            nc += strategies[m]
            rep_sum += reputations[m]
        avg = rep_sum / g
        share = r * nc / g
        if s_i == 1:
            total += share - 1.0
        elif avg < rep_threshold:
            total += share - b
        else:
            total += share
    return total


@njit(cache=True)
def _fermi(f_focal, f_model, kappa, printed_sign):
    if printed_sign:
        x = (f_model - f_focal) / kappa
    else:
        x = (f_focal - f_model) / kappa
    if x > EXP_CUTOFF:
        return 0.0
    if x < -EXP_CUTOFF:
        return 1.0
    return 1.0 / (1.0 + math.exp(x))


@njit(cache=True)
def run_chunk(strategies, reputations, neighbor_table, group_table, rng,
              r, b, rep_threshold, delta, kappa, rep_scale,
              n_steps, printed_sign, per_revision, early_exit,
              rho_out, mean_rep_out, offset, coop_count):
    """Advance ``n_steps`` Monte Carlo steps in place.

    Records the cooperation fraction (and mean reputation, when the output
    array is non-empty) after each step at rho_out[offset + t].  Returns
    (cooperator count, absorbed) where absorbed means the strategy state is
    homogeneous and every reputation sits at its fixed point, in which case
    the remaining slots of this chunk are filled with the frozen values.
    """
    n = strategies.shape[0]
    degree = neighbor_table.shape[1]
    n_mask = _mask_for(np.uint64(n))
    deg_mask = _mask_for(np.uint64(degree))
    n_u = np.uint64(n)
    deg_u = np.uint64(degree)
    record_rep = mean_rep_out.shape[0] > 0

    for t in range(n_steps):
        for _ in range(n):
            i = np.int64(_pcg_below(rng, n_u, n_mask))
            slot = np.int64(_pcg_below(rng, deg_u, deg_mask))
            j = neighbor_table[i, slot]
            if strategies[i] != strategies[j]:
                pay_i = _site_payoff(strategies, reputations, group_table, i, r, b, rep_threshold)
                pay_j = _site_payoff(strategies, reputations, group_table, np.int64(j), r, b, rep_threshold)
                f_i = delta * pay_i + (1.0 - delta) * (reputations[i] - rep_threshold) / rep_scale
                f_j = delta * pay_j + (1.0 - delta) * (reputations[j] - rep_threshold) / rep_scale
                p = _fermi(f_i, f_j, kappa, printed_sign)
                if _pcg_uniform(rng) < p:
                    coop_count += strategies[j] - strategies[i]
                    strategies[i] = strategies[j]
            if per_revision:
                if strategies[i] == 1:
                    reputations[i] = min(reputations[i] + 1.0, MAX_REPUTATION)
                else:
                    reputations[i] = max(reputations[i] - 1.0, 0.0)

        if not per_revision:
            for k in range(n):
                if strategies[k] == 1:
                    reputations[k] = min(reputations[k] + 1.0, MAX_REPUTATION)
                else:
                    reputations[k] = max(reputations[k] - 1.0, 0.0)

        rho_out[offset + t] = coop_count / n
        if record_rep:
            rep_total = 0.0
            for k in range(n):
                rep_total += reputations[k]
            mean_rep_out[offset + t] = rep_total / n

        if early_exit and (coop_count == 0 or coop_count == n):
            target = MAX_REPUTATION if coop_count == n else 0.0
            frozen = True
            for k in range(n):
                if reputations[k] != target:
                    frozen = False
                    break
            if frozen:
                for rest in range(t + 1, n_steps):
                    rho_out[offset + rest] = rho_out[offset + t]
                    if record_rep:
                        mean_rep_out[offset + rest] = mean_rep_out[offset + t]
                return coop_count, True

    return coop_count, False


@njit(cache=True)
def kernel_total_payoff(strategies, reputations, group_table, i, r, b, rep_threshold):
    """Test hook: the kernel's payoff routine for a single site."""
    return _site_payoff(strategies, reputations, group_table, np.int64(i), r, b, rep_threshold)


_EMPTY_F64 = np.empty(0, dtype=np.float64)


def warmup() -> None:
    """Force JIT compilation so forked pool workers inherit compiled code."""
    strategies = np.array([1, 0, 1, 0, 1, 0, 1, 0, 1], dtype=np.int8)
    reputations = np.arange(9, dtype=np.float64)
    neigh = np.zeros((9, 4), dtype=np.int32)
    groups = np.zeros((9, 5), dtype=np.int32)
    for y in range(3):
        for x in range(3):
            i = y * 3 + x
            neigh[i, 0] = y * 3 + (x + 1) % 3
            neigh[i, 1] = y * 3 + (x - 1) % 3
            neigh[i, 2] = ((y + 1) % 3) * 3 + x
            neigh[i, 3] = ((y - 1) % 3) * 3 + x
            groups[i, 0] = i
            groups[i, 1:] = neigh[i]
    rng = np.array([12345, 67891], dtype=np.uint64)
    rho = np.empty(2, dtype=np.float64)
    mrep = np.empty(2, dtype=np.float64)
    run_chunk(strategies, reputations, neigh, groups, rng,
              2.5, 0.2, 4.0, 0.5, 0.5, 20.0,
              2, False, False, True, rho, mrep, 0, int(strategies.sum()))
    kernel_total_payoff(strategies, reputations, groups, 0, 2.5, 0.2, 4.0)
