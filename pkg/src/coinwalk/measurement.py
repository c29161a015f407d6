"""Position readout: distributions, conditionals, statistics, sampling."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Union

import numpy as np

from .hilbert import CoinState, DensityOperator, PositionSpace, PureState, State
from .dynamics import Protocol, ProtocolVariant, CoinChoice, paired_initial_coin, protocol_schedule
from .channels import NoiseSpec, run_trajectory


@dataclass(frozen=True)
class Distribution:
    """Probability mass over lattice positions.

    ``subnormalized=True`` marks the surviving part of an absorbed walk, whose
    total is the survival probability rather than 1.  ``meta`` carries run
    context (step count, protocol, noise parameters) when produced by a runner.
    """

    probs: dict[int, float]
    meta: dict[str, Any] = field(default_factory=dict)
    subnormalized: bool = False

    def total(self) -> float:
        return float(sum(self.probs.values()))

    def positions(self) -> list[int]:
        return sorted(self.probs)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        ks = np.array(self.positions(), dtype=np.int64)
        return ks, np.array([self.probs[int(k)] for k in ks])

    @property
    def is_empty(self) -> bool:
        return not self.probs


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std_dev: float
    tv: Optional[float] = None            # total variation distance to the reference
    interval_mass: Optional[float] = None  # mass with sqrt(n) < |k| < n/sqrt(2)


class PreMeasurementFlip(enum.Enum):
    NONE = "none"
    RANDOM_SIGMA_X = "random_sigma_x"


def _joint_position_probs(state: State) -> np.ndarray:
    """(2, dim) array of coin-resolved position probabilities."""
    if isinstance(state, PureState):
        b = state.blocks()
        return b.real**2 + b.imag**2
    blocks = state.blocks()
    x = state.space.dim
    diag = np.arange(x)
    return np.stack([blocks[0, diag, 0, diag].real, blocks[1, diag, 1, diag].real])


def _to_dict(space: PositionSpace, values: np.ndarray) -> dict[int, float]:
    return {int(k): float(v) for k, v in zip(space.positions(), values)}


def position_distribution(state: State, meta: Optional[Mapping[str, Any]] = None) -> Distribution:
    """Coin traced out, diagonal in position: the measured arrival statistics."""
    joint = _joint_position_probs(state)
    sub = isinstance(state, DensityOperator) and not state.normalized
    return Distribution(
        _to_dict(state.space, joint.sum(axis=0)), dict(meta or {}), subnormalized=sub
    )


def conditional_distributions(
    state: State, pre_flip: PreMeasurementFlip = PreMeasurementFlip.NONE
) -> tuple[Distribution, Distribution]:
    """Position distributions conditioned on each coin outcome, renormalized.

    With ``RANDOM_SIGMA_X`` the coin is flipped with probability 1/2 right
    before the coin-selective measurement; the 50/50 mixture is evaluated
    exactly rather than sampled, which makes the two conditionals identical
    and removes any dependence of the spatial statistics on the coin readout.
    A coin outcome of zero probability yields an empty distribution flagged in
    its meta.
    """
    joint = _joint_position_probs(state)
    weights = joint.sum(axis=1)
    if pre_flip is PreMeasurementFlip.RANDOM_SIGMA_X:
        mixed = joint[0] + joint[1]
        w = weights[0] + weights[1]
        joint = np.stack([mixed, mixed]) / 2.0
        weights = np.array([w, w]) / 2.0
    out = []
    for c in (0, 1):
        if weights[c] <= 0.0:
            out.append(Distribution({}, {"empty_branch": True, "coin": c}))
        else:
            out.append(Distribution(_to_dict(state.space, joint[c] / weights[c]), {"coin": c}))
    return out[0], out[1]


def tv_distance(p: Mapping[int, float], q: Mapping[int, float]) -> float:
    """Total variation distance (1/2) sum_k |p(k) - q(k)| over the union support."""
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def summary(
    dist: Distribution, reference: Optional[Union[Distribution, Mapping[int, float]]] = None
) -> SummaryStats:
    """Mean, standard deviation, optional TV distance, and ballistic-band mass.

    The ballistic band is sqrt(n) < |k| < n/sqrt(2) (both sides, open bounds);
    it is reported only when the distribution's meta carries its step count,
    and is the region where the coherent walk keeps appreciable mass while the
    diffusive one does not.
    """
    ks, ps = dist.as_arrays()
    if ps.size == 0:
        raise ValueError("cannot summarize an empty distribution")
    total = ps.sum()
    mean = float((ks * ps).sum() / total)
    var = float(((ks - mean) ** 2 * ps).sum() / total)
    std = float(np.sqrt(max(var, 0.0)))
    tv = None
    if reference is not None:
        ref = reference.probs if isinstance(reference, Distribution) else reference
        tv = tv_distance(dist.probs, ref)
    interval = None
    n = dist.meta.get("steps")
    if n is not None and n > 0:
        lo, hi = np.sqrt(n), n / np.sqrt(2)
        band = (np.abs(ks) > lo) & (np.abs(ks) < hi)
        interval = float(ps[band].sum())
    return SummaryStats(mean=mean, std_dev=std, tv=tv, interval_mass=interval)


@dataclass(frozen=True)
class TrajectorySpec:
    """A walk to be sampled shot by shot with Monte Carlo noise branches."""

    space: PositionSpace
    steps: int
    noise: NoiseSpec
    protocol: Protocol = Protocol(ProtocolVariant.STANDARD, CoinChoice.HADAMARD)
    initial_coin: Optional[CoinState] = None
    k0: int = 0


def _sampling_probs(state: State) -> tuple[np.ndarray, np.ndarray]:
    ks = state.space.positions()
    ps = _joint_position_probs(state).sum(axis=0)
    ps = np.clip(ps, 0.0, None)  # scrub roundoff negatives before drawing
    return ks, ps / ps.sum()


def sample_positions(
    source: Union[State, TrajectorySpec],
    shots: int,
    rng: Union[int, np.random.Generator],
) -> Distribution:
    """Empirical position frequencies over independent shots.

    A state source is sampled i.i.d. from its exact distribution.  A
    ``TrajectorySpec`` source runs one fresh noisy trajectory per shot (its
    own child random stream) and samples a single position from it, which is
    exactly one draw from the noisy walk's output distribution.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    gen = np.random.default_rng(rng) if isinstance(rng, int) else rng
    if isinstance(source, TrajectorySpec):
        schedule = protocol_schedule(source.protocol, source.steps)
        coin0 = source.initial_coin
        if coin0 is None:
            coin0 = (
                CoinState.symmetric()
                if source.protocol.variant is ProtocolVariant.SYMMETRIZED
                else paired_initial_coin(source.protocol.coin)
            )
        counts: dict[int, int] = {}
        for child_rng in gen.spawn(shots):
            final = run_trajectory(source.space, schedule, coin0, source.noise, child_rng, source.k0)
            ks, ps = _sampling_probs(final)
            k = int(child_rng.choice(ks, p=ps))
            counts[k] = counts.get(k, 0) + 1
        space = source.space
        meta = {"shots": shots, "steps": source.steps}
    else:
        ks, ps = _sampling_probs(source)
        draws = gen.choice(ks, size=shots, p=ps)
        values, freq = np.unique(draws, return_counts=True)
        counts = {int(k): int(c) for k, c in zip(values, freq)}
        space = source.space
        meta = {"shots": shots}
    probs = {int(k): counts.get(int(k), 0) / shots for k in space.positions()}
    return Distribution(probs, meta)
