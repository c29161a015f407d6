"""Error channels for the walk, exact and unraveled.

Three single-step error models are supported, each a completely positive
trace-preserving map given in closed form:

* coin depolarizing -- with probability p the intended coin unitary acts,
  otherwise the coin is replaced by the maximally mixed state (position
  coherences survive);
* coin dephasing -- with probability p' the coin unitary acts alone, otherwise
  it acts after a sigma_z error, which destroys coin coherences but never coin
  populations;
* incoherent tunneling -- with probability q the position is untouched,
  otherwise the walker hops one site left or right (equal odds) regardless of
  the coin.

All three are mixtures of unitaries, so each also has an exact Monte Carlo
unraveling: draw one unitary branch per step with the channel's weights and
evolve a pure state.  Averaging trajectory distributions reproduces the exact
channel output.

A noisy step composes: coin channel (which contains the coin unitary), then
the controlled shift, then tunneling.  Tunneling can be moved before the
shift (``NoiseSpec.tunnel_before_shift``); since lattice translations all
commute this is provably the same channel, and the flag only changes which
window edge the line topology checks first.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .hilbert import (
    CoinState,
    DensityOperator,
    PositionSpace,
    PureState,
    Topology,
    WindowOverflowError,
    make_initial,
    to_density,
)
from . import _kernels
from .dynamics import (
    PAULIS,
    SIGMA_Z,
    CoinOperator,
    StepSpec,
    _shift_density,
    _shift_pure,
    check_window,
    coin_superoperator,
)


class Channel(enum.Enum):
    DEPOLARIZING = "depolarizing"
    DEPHASING = "dephasing"
    TUNNELING = "tunneling"


def _check_unit_interval(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class NoiseSpec:
    """Which error channels act each step, and how strongly.

    Parameters are *fidelities*: 1.0 means the channel acts trivially.  A
    channel only acts if listed in ``enabled``; the parameter of a disabled
    channel is ignored.  Depolarizing and dephasing are alternatives for the
    same physical stage (the coin manipulation) and may only be combined
    behind ``allow_combined_coin_noise``, a deliberately noisy configuration
    flag.
    """

    p: float = 1.0
    p_prime: float = 1.0
    q: float = 1.0
    enabled: frozenset = frozenset()
    allow_combined_coin_noise: bool = False
    tunnel_before_shift: bool = False

    def __post_init__(self) -> None:
        _check_unit_interval("p", self.p)
        _check_unit_interval("p_prime", self.p_prime)
        _check_unit_interval("q", self.q)
        object.__setattr__(self, "enabled", frozenset(self.enabled))
        for ch in self.enabled:
            if not isinstance(ch, Channel):
                raise ValueError(f"enabled entries must be Channel members, got {ch!r}")
        both = {Channel.DEPOLARIZING, Channel.DEPHASING} <= self.enabled
        if both and not self.allow_combined_coin_noise:
            raise ValueError(
                "depolarizing and dephasing both enabled; set allow_combined_coin_noise "
                "to compose them deliberately"
            )

    @staticmethod
    def ideal() -> "NoiseSpec":
        return NoiseSpec()

    @staticmethod
    def from_parameters(
        p: float | None = None,
        p_prime: float | None = None,
        q: float | None = None,
        allow_combined_coin_noise: bool = False,
        tunnel_before_shift: bool = False,
    ) -> "NoiseSpec":
        """Enable exactly the channels whose parameter is given."""
        enabled = set()
        if p is not None:
            enabled.add(Channel.DEPOLARIZING)
        if p_prime is not None:
            enabled.add(Channel.DEPHASING)
        if q is not None:
            enabled.add(Channel.TUNNELING)
        return NoiseSpec(
            p=1.0 if p is None else p,
            p_prime=1.0 if p_prime is None else p_prime,
            q=1.0 if q is None else q,
            enabled=frozenset(enabled),
            allow_combined_coin_noise=allow_combined_coin_noise,
            tunnel_before_shift=tunnel_before_shift,
        )

    @property
    def has_coin_noise(self) -> bool:
        return bool(self.enabled & {Channel.DEPOLARIZING, Channel.DEPHASING})

    @property
    def has_tunneling(self) -> bool:
        return Channel.TUNNELING in self.enabled

    @property
    def tunneling_acts(self) -> bool:
        """Tunneling is enabled with a parameter that actually moves mass."""
        return self.has_tunneling and self.q < 1.0

    @property
    def any_enabled(self) -> bool:
        return bool(self.enabled)

    @property
    def reach_per_step(self) -> int:
        """Maximum sites the support edge can advance in one step."""
        return 2 if self.tunneling_acts else 1


# ---------------------------------------------------------------------------
# Exact channels on density operators
# ---------------------------------------------------------------------------

def _depolarize_matrix(mat: np.ndarray, u: np.ndarray, p: float) -> np.ndarray:
    return coin_superoperator(mat, u, p_coh=p, r=0.5 * (1.0 - p))


def _dephase_matrix(mat: np.ndarray, u: np.ndarray, p_prime: float) -> np.ndarray:
    # U (p' rho + (1-p') sz rho sz) U^dag: the inner mix scales the
    # coin-off-diagonal blocks by 2p'-1.
    return coin_superoperator(mat, u, g01=2.0 * p_prime - 1.0)


def _tunnel_matrix(
    mat: np.ndarray, space: PositionSpace, q: float, out: np.ndarray | None = None
) -> np.ndarray:
    if q == 1.0:
        if out is None:
            return mat.copy()
        np.copyto(out, mat)
        return out
    x = space.dim
    if out is None:
        out = np.empty_like(mat)
    if space.topology is Topology.CIRCLE:
        _kernels.tunnel_circle(mat, out, float(q))
        return out
    b = mat.reshape(2, x, 2, x)
    for c in (0, 1):
        if b[c, 0, c, 0] != 0 or b[c, x - 1, c, x - 1] != 0:
            raise WindowOverflowError(
                "tunneling needs one spare site of window margin per application"
            )
    _kernels.tunnel_line(mat, out, float(q))
    return out


def depolarizing_coin(rho: DensityOperator, coin: CoinOperator, p: float) -> DensityOperator:
    """Apply the coin unitary with probability p, else fully randomize the coin.

    p=1 is the plain unitary; p=0 leaves the coin maximally mixed at every
    position pair, which turns the walk into its classical counterpart.
    """
    _check_unit_interval("p", p)
    return DensityOperator(
        rho.space, _depolarize_matrix(rho.matrix, coin.matrix, p), normalized=rho.normalized
    )


def dephasing_coin(rho: DensityOperator, coin: CoinOperator, p_prime: float) -> DensityOperator:
    """Apply the coin unitary, preceded with probability 1-p' by a sigma_z error.

    The error never touches coin populations, only coin coherences (fully
    erased at p'=1/2 before the rotation), and the position distribution is
    exactly that of the noiseless channel.
    """
    _check_unit_interval("p_prime", p_prime)
    return DensityOperator(
        rho.space, _dephase_matrix(rho.matrix, coin.matrix, p_prime), normalized=rho.normalized
    )


def tunneling(rho: DensityOperator, q: float) -> DensityOperator:
    """With probability 1-q the walker hops one site left or right, coin untouched."""
    _check_unit_interval("q", q)
    return DensityOperator(
        rho.space, _tunnel_matrix(rho.matrix, rho.space, q), normalized=rho.normalized
    )


def _coin_stage_matrix(
    mat: np.ndarray, u: np.ndarray, noise: NoiseSpec, out: np.ndarray | None = None
) -> np.ndarray:
    """The coin part of one noisy step, on a raw matrix.

    All coin stages are parameter points of the same one-pass superoperator.
    With both coin channels enabled (flag-gated, not a standard configuration)
    the dephasing mix acts first and the single coin unitary is carried by the
    depolarizing stage, so the intended rotation is applied exactly once.
    """
    g01 = 2.0 * noise.p_prime - 1.0 if Channel.DEPHASING in noise.enabled else 1.0
    if Channel.DEPOLARIZING in noise.enabled:
        return coin_superoperator(mat, u, g01=g01, p_coh=noise.p, r=0.5 * (1.0 - noise.p), out=out)
    return coin_superoperator(mat, u, g01=g01, out=out)


def noisy_step(
    rho: DensityOperator,
    coin: CoinOperator | np.ndarray,
    noise: NoiseSpec,
    *,
    reverse_shift: bool = False,
) -> DensityOperator:
    """One full walk step on a density operator with the configured channels."""
    u = coin.matrix if isinstance(coin, CoinOperator) else coin
    mat = _coin_stage_matrix(rho.matrix, u, noise)
    if noise.tunneling_acts and noise.tunnel_before_shift:
        mat = _tunnel_matrix(mat, rho.space, noise.q)
    mat = _shift_density(mat, rho.space, reverse_shift)
    if noise.tunneling_acts and not noise.tunnel_before_shift:
        mat = _tunnel_matrix(mat, rho.space, noise.q)
    return DensityOperator(rho.space, mat, normalized=rho.normalized)


class DensityEngine:
    """Stepper over raw matrices with preallocated rotating buffers.

    Equivalent to calling :func:`noisy_step` repeatedly, but the three large
    work arrays are allocated once; on long evolutions the per-step
    allocate/free cycle otherwise dominates the runtime through page faults.
    :meth:`step` takes ownership of its input matrix and returns a buffer that
    stays valid until the step after next; both recycle through the pool.
    """

    def __init__(self, space: PositionSpace, noise: NoiseSpec):
        self.space = space
        self.noise = noise
        d = 2 * space.dim
        self._scratch = [np.empty((d, d), dtype=np.complex128) for _ in range(2)]

    def step(self, mat: np.ndarray, u: np.ndarray, reverse_shift: bool = False) -> np.ndarray:
        a, b = self._scratch
        staged = _coin_stage_matrix(mat, u, self.noise, out=a)
        if self.noise.tunneling_acts and self.noise.tunnel_before_shift:
            staged = _tunnel_matrix(staged, self.space, self.noise.q, out=b)
            a, b = b, a
        shifted = _shift_density(staged, self.space, reverse_shift, out=b)
        if self.noise.tunneling_acts and not self.noise.tunnel_before_shift:
            shifted = _tunnel_matrix(shifted, self.space, self.noise.q, out=a)
            a, b = b, a
        # the buffer now holding the result leaves the scratch pool; the
        # caller's previous matrix replaces it
        self._scratch = [a, mat]
        return shifted


def run_noisy(
    space: PositionSpace,
    schedule: Sequence[StepSpec],
    initial_coin: CoinState,
    noise: NoiseSpec,
    k0: int = 0,
) -> DensityOperator:
    """Exact density-operator evolution through a step schedule."""
    check_window(space, len(schedule), noise.reach_per_step)
    engine = DensityEngine(space, noise)
    mat = to_density(make_initial(space, initial_coin, k0)).matrix
    for spec in schedule:
        mat = engine.step(mat, spec.coin, spec.reverse_shift)
    return DensityOperator(space, mat)


# ---------------------------------------------------------------------------
# Random-unitary unraveling
# ---------------------------------------------------------------------------

class StepBranch(NamedTuple):
    """One sampled unitary branch of a noisy step."""

    coin: np.ndarray  # 2x2 unitary for the coin stage
    tunnel: int       # extra whole-state displacement: -1, 0 or +1


def _sample_branch(noise: NoiseSpec, u: np.ndarray, rng: np.random.Generator) -> StepBranch:
    # Draw order is fixed (coin stage, then tunneling) so runs are reproducible.
    branch_u = u
    if Channel.DEPHASING in noise.enabled and rng.random() >= noise.p_prime:
        branch_u = branch_u @ SIGMA_Z
    if Channel.DEPOLARIZING in noise.enabled and rng.random() >= noise.p:
        # Noise branch: a uniformly random Pauli replaces the intended rotation
        # outright; the replaced coin state is maximally mixed either way.
        branch_u = PAULIS[rng.integers(4)]
    tunnel = 0
    if Channel.TUNNELING in noise.enabled and rng.random() >= noise.q:
        tunnel = 1 if rng.random() < 0.5 else -1
    return StepBranch(branch_u, tunnel)


def unravel(noise: NoiseSpec, coin: CoinOperator, rng: np.random.Generator) -> StepBranch:
    """Sample one unitary branch with the channels' mixture weights.

    Averaging the sampled conjugations over many draws reproduces the exact
    channel output for every enabled channel.
    """
    return _sample_branch(noise, coin.matrix, rng)


def _translate_pure(amps: np.ndarray, space: PositionSpace, offset: int) -> np.ndarray:
    if offset == 0:
        return amps
    x = space.dim
    b = amps.reshape(2, x)
    if space.topology is Topology.CIRCLE:
        return np.roll(b, offset, axis=1).reshape(-1)
    edge = x - 1 if offset > 0 else 0
    if b[0, edge] != 0 or b[1, edge] != 0:
        raise WindowOverflowError("tunneling pushed support past the window edge")
    out = np.zeros_like(b)
    if offset > 0:
        out[:, 1:] = b[:, :-1]
    else:
        out[:, :-1] = b[:, 1:]
    return out.reshape(-1)


def run_trajectory(
    space: PositionSpace,
    schedule: Sequence[StepSpec],
    initial_coin: CoinState,
    noise: NoiseSpec,
    rng: np.random.Generator,
    k0: int = 0,
) -> PureState:
    """One pure-state Monte Carlo trajectory through a step schedule."""
    check_window(space, len(schedule), noise.reach_per_step)
    state = make_initial(space, initial_coin, k0)
    amps = state.amps
    x = space.dim
    for spec in schedule:
        branch = _sample_branch(noise, spec.coin, rng)
        amps = (branch.coin @ amps.reshape(2, x)).reshape(-1)
        amps = _shift_pure(amps, space, spec.reverse_shift)
        if branch.tunnel:
            amps = _translate_pure(amps, space, branch.tunnel)
    return PureState(space, amps)


def average_trajectories(
    space: PositionSpace,
    schedule: Sequence[StepSpec],
    initial_coin: CoinState,
    noise: NoiseSpec,
    n_trajectories: int,
    seed: int,
    k0: int = 0,
) -> np.ndarray:
    """Mean position distribution over independent trajectories.

    Each trajectory gets its own child stream of ``seed``, so the aggregate is
    reproducible and trajectories could run in any order or in parallel.
    Averages the full per-trajectory distribution rather than one sample from
    it, which converges markedly faster at the same trajectory count.
    """
    if n_trajectories < 1:
        raise ValueError(f"need at least one trajectory, got {n_trajectories}")
    x = space.dim
    total = np.zeros(x)
    for child in np.random.SeedSequence(seed).spawn(n_trajectories):
        rng = np.random.default_rng(child)
        amps = run_trajectory(space, schedule, initial_coin, noise, rng, k0).blocks()
        total += (amps.real**2 + amps.imag**2).sum(axis=0)
    return total / n_trajectories
