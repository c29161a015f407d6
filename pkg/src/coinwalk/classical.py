"""Classical fair-coin walk baselines.

Two routes to the same physics: the closed-form binomial distribution of the
unbounded walk, and a step-wise dynamic-programming walker that also handles
absorbing barriers.  The binomial row is built by the probability-space
Pascal recurrence, which never overflows and stays well inside 1e-12 of exact
for any step count used here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class ClassicalDistribution:
    """Probability mass over integer positions (support only; zeros omitted)."""

    probs: dict[int, float]

    def total(self) -> float:
        return float(sum(self.probs.values()))

    def std_dev(self) -> float:
        ks = np.array(sorted(self.probs), dtype=float)
        ps = np.array([self.probs[int(k)] for k in ks])
        mean = (ks * ps).sum() / ps.sum()
        return float(np.sqrt(((ks - mean) ** 2 * ps).sum() / ps.sum()))


def binomial_walk(n: int) -> ClassicalDistribution:
    """Exact distribution after n fair-coin steps from the origin.

    Position k carries mass C(n, (k+n)/2) / 2^n on the parity class of n and
    zero elsewhere; the standard deviation is sqrt(n).
    """
    if n < 0:
        raise ValueError(f"step count must be >= 0, got {n}")
    row = np.array([1.0])
    for _ in range(n):
        nxt = np.zeros(row.size + 1)
        nxt[:-1] += 0.5 * row
        nxt[1:] += 0.5 * row
        row = nxt
    return ClassicalDistribution({2 * j - n: float(row[j]) for j in range(n + 1)})


def classical_dp_step(
    dist: ClassicalDistribution, barriers: Iterable[int] = ()
) -> tuple[ClassicalDistribution, float]:
    """One step: each site's mass splits half left, half right; barrier mass is absorbed.

    The input is the surviving (possibly subnormalized) distribution;
    returns the new surviving distribution and the mass absorbed this step.
    Absorption is checked after the move, matching the quantum barrier
    measurement.
    """
    barrier_set = set(barriers)
    nxt: dict[int, float] = {}
    for k, m in dist.probs.items():
        half = 0.5 * m
        nxt[k - 1] = nxt.get(k - 1, 0.0) + half
        nxt[k + 1] = nxt.get(k + 1, 0.0) + half
    absorbed = 0.0
    for b in barrier_set:
        absorbed += nxt.pop(b, 0.0)
    return ClassicalDistribution(nxt), absorbed


@dataclass(frozen=True)
class DPRun:
    final: ClassicalDistribution
    increments: list[float]
    cumulative: list[float]


def run_dp(n: int, barriers: Iterable[int] = (), start: int = 0) -> DPRun:
    """n dynamic-programming steps from a point mass, tracking absorption."""
    if n < 0:
        raise ValueError(f"step count must be >= 0, got {n}")
    barrier_set = frozenset(barriers)
    if start in barrier_set:
        raise ValueError(f"start position {start} coincides with a barrier")
    dist = ClassicalDistribution({start: 1.0})
    increments: list[float] = []
    cumulative: list[float] = []
    total = 0.0
    for _ in range(n):
        dist, absorbed = classical_dp_step(dist, barrier_set)
        total += absorbed
        increments.append(absorbed)
        cumulative.append(total)
    return DPRun(dist, increments, cumulative)
