"""Coin operators, the controlled shift, and complete walk protocols.

One walk step is a coin rotation followed by the coin-controlled shift: coin
|0> amplitude moves one site left, coin |1> one site right (the circle wraps).
Two pulse-level protocols are provided.  The standard one applies the same
coin every step.  The symmetrized one inserts a coin flip (sigma_x) at every
step and alternates the coin rotation and the shift orientation with step
parity; it reproduces the standard walk's position distribution exactly while
cancelling slow phase drift between the two internal states in hardware-like
settings.

All operations accept pure states or density operators and return new values;
nothing is mutated in place.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import _kernels
from .hilbert import (
    CoinState,
    DensityOperator,
    PositionSpace,
    PureState,
    State,
    Topology,
    WindowOverflowError,
    make_initial,
)

IDENTITY2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z)

_UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class CoinOperator:
    """A 2x2 unitary acting on the internal (coin) space."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValueError(f"coin operator must be 2x2, got shape {m.shape}")
        dev = np.max(np.abs(m.conj().T @ m - IDENTITY2))
        if dev > _UNITARITY_TOL:
            raise ValueError(f"coin matrix is not unitary: max |U^dag U - 1| = {dev:.3e}")
        object.__setattr__(self, "matrix", m)


class CoinChoice(enum.Enum):
    HADAMARD = "hadamard"
    HALF_PI_PULSE = "halfpi"


class ProtocolVariant(enum.Enum):
    STANDARD = "standard"
    SYMMETRIZED = "symmetrized"


@dataclass(frozen=True)
class Protocol:
    variant: ProtocolVariant
    coin: CoinChoice = CoinChoice.HADAMARD


def hadamard() -> CoinOperator:
    """Balanced coin: |0> -> (|0>+|1>)/sqrt(2), |1> -> (|0>-|1>)/sqrt(2)."""
    return CoinOperator(np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2))


def half_pi_pulse() -> CoinOperator:
    """exp(-i pi/4 sigma_x) = [[1, -i], [-i, 1]]/sqrt(2), the balanced pulse coin."""
    return CoinOperator(np.array([[1, -1j], [-1j, 1]], dtype=np.complex128) / np.sqrt(2))


def hadamard_from_three_pulses() -> CoinOperator:
    """Product exp(-i pi/4 sx) exp(-i pi/4 sy) exp(-i pi/4 sz).

    Equals the balanced coin up to a global phase; useful when only quarter
    rotations are available as primitives.
    """
    pulses = [(IDENTITY2 - 1j * s) / np.sqrt(2) for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)]
    return CoinOperator(pulses[0] @ pulses[1] @ pulses[2])


def conjugated_hadamard() -> CoinOperator:
    """sigma_x H sigma_x: the balanced coin with the roles of |0>, |1> swapped."""
    return CoinOperator(SIGMA_X @ hadamard().matrix @ SIGMA_X)


def coin_for(choice: CoinChoice) -> CoinOperator:
    return hadamard() if choice is CoinChoice.HADAMARD else half_pi_pulse()


def paired_initial_coin(choice: CoinChoice) -> CoinState:
    """The initial coin state that makes each coin choice spread symmetrically."""
    if choice is CoinChoice.HADAMARD:
        return CoinState.symmetric()
    return CoinState.plus()


def apply_coin(state: State, coin: CoinOperator) -> State:
    """Rotate the coin at every position: U (x) 1 on vectors, conjugation on densities."""
    if isinstance(state, PureState):
        return PureState(state.space, (coin.matrix @ state.blocks()).reshape(-1))
    return DensityOperator(
        state.space, _coin_conjugate(state.matrix, coin.matrix), normalized=state.normalized
    )


def coin_superoperator(
    mat: np.ndarray,
    u: np.ndarray,
    g01: float = 1.0,
    p_coh: float = 1.0,
    r: float = 0.0,
    out: Optional[np.ndarray] = None,
) -> np.ndarray:
    """One streaming pass of the generalized coin stage on a raw matrix.

    Computes ``p_coh * U (g .* rho) U^dag + r * 1 (x) tr_coin(rho)`` where
    ``g`` scales the coin-off-diagonal blocks by ``g01``.  The identity
    parameters (1, 1, 0) give the plain unitary conjugation; the error
    channels are other parameter points of the same map.  ``out`` may be a
    preallocated result buffer (distinct from ``mat``); long evolutions reuse
    buffers to keep large allocations out of the step loop.
    """
    if out is None:
        out = np.empty_like(mat)
    _kernels.coin_stage(
        mat, out, np.ascontiguousarray(u, dtype=np.complex128),
        complex(g01), complex(p_coh), complex(r),
    )
    return out


def _coin_conjugate(mat: np.ndarray, u: np.ndarray) -> np.ndarray:
    """(U (x) 1) rho (U (x) 1)^dag, O(dim^2)."""
    return coin_superoperator(mat, u)


def _directions(reverse: bool) -> tuple[int, int]:
    # Position change for coin 0 / coin 1 amplitudes.
    return (1, -1) if reverse else (-1, 1)


def _dst(s: int) -> slice:
    return slice(1, None) if s > 0 else slice(None, -1)


def _src(s: int) -> slice:
    return slice(None, -1) if s > 0 else slice(1, None)


def shift(state: State, *, reverse: bool = False) -> State:
    """Coin-controlled translation: coin 0 one site left, coin 1 one site right.

    ``reverse=True`` swaps the directions (used on the odd steps of the
    symmetrized protocol).  On a line window, support moving past the edge
    raises ``WindowOverflowError``: the window was sized too small for the
    requested number of steps.
    """
    if isinstance(state, PureState):
        return PureState(state.space, _shift_pure(state.amps, state.space, reverse))
    return DensityOperator(
        state.space, _shift_density(state.matrix, state.space, reverse), normalized=state.normalized
    )


def _shift_pure(amps: np.ndarray, space: PositionSpace, reverse: bool) -> np.ndarray:
    x = space.dim
    b = amps.reshape(2, x)
    out = np.zeros_like(amps)
    ob = out.reshape(2, x)
    s = _directions(reverse)
    if space.topology is Topology.CIRCLE:
        for c in (0, 1):
            ob[c] = np.roll(b[c], s[c])
        return out
    for c in (0, 1):
        edge = 0 if s[c] < 0 else x - 1
        if b[c, edge] != 0:
            raise WindowOverflowError(
                f"coin-{c} amplitude at window edge (position index {edge}); enlarge the window"
            )
        ob[c, _dst(s[c])] = b[c, _src(s[c])]
    return out


def _shift_density(
    mat: np.ndarray, space: PositionSpace, reverse: bool, out: Optional[np.ndarray] = None
) -> np.ndarray:
    x = space.dim
    s = _directions(reverse)
    if out is None:
        out = np.empty_like(mat)
    if space.topology is Topology.CIRCLE:
        _kernels.shift_circle(mat, out, s[0], s[1])
        return out
    # Evolution keeps the matrix positive semidefinite, so a zero diagonal entry
    # implies the whole row/column is zero; checking the two edge diagonals suffices.
    b = mat.reshape(2, x, 2, x)
    for c in (0, 1):
        edge = 0 if s[c] < 0 else x - 1
        if b[c, edge, c, edge] != 0:
            raise WindowOverflowError(
                f"coin-{c} population at window edge (position index {edge}); enlarge the window"
            )
    _kernels.shift_line(mat, out, s[0], s[1])
    return out


def step(state: State, coin: CoinOperator) -> State:
    """One walk step: coin rotation, then the controlled shift."""
    return shift(apply_coin(state, coin))


class StepSpec(NamedTuple):
    """One step of a protocol: the coin unitary to apply, then the shift orientation."""

    coin: np.ndarray
    reverse_shift: bool


def standard_schedule(coin: CoinOperator, n: int) -> list[StepSpec]:
    return [StepSpec(coin.matrix, False)] * n


def symmetrized_schedule(n: int) -> list[StepSpec]:
    """Coin pulses and shift orientations for the symmetrized protocol.

    Step 0 applies the balanced coin H with the normal shift.  Every later
    step m applies a coin flip first, then H for even m or its flipped
    conjugate for odd m, and shifts with the orientation matching the parity
    (the lattice motion reverses every step).  After n steps the position
    distribution equals the standard walk's; for even n the internal state
    differs from it by one final coin flip, which the position readout never
    sees.
    """
    h = hadamard().matrix
    hp = conjugated_hadamard().matrix
    specs: list[StepSpec] = []
    for m in range(n):
        if m == 0:
            u = h
        elif m % 2:
            u = hp @ SIGMA_X
        else:
            u = h @ SIGMA_X
        specs.append(StepSpec(u, bool(m % 2)))
    return specs


def protocol_schedule(protocol: Protocol, n: int) -> list[StepSpec]:
    if protocol.variant is ProtocolVariant.SYMMETRIZED:
        return symmetrized_schedule(n)
    return standard_schedule(coin_for(protocol.coin), n)


def check_window(space: PositionSpace, steps: int, reach_per_step: int = 1) -> None:
    """Fail fast if a line window cannot hold ``steps`` steps of support growth."""
    if space.topology is Topology.LINE and space.extent < steps * reach_per_step:
        raise WindowOverflowError(
            f"line window extent {space.extent} cannot hold {steps} steps "
            f"(needs >= {steps * reach_per_step})"
        )


def run_schedule(
    space: PositionSpace,
    schedule: Sequence[StepSpec],
    initial_coin: CoinState,
    k0: int = 0,
) -> PureState:
    """Noiseless pure-state evolution through a step schedule."""
    check_window(space, len(schedule))
    state = make_initial(space, initial_coin, k0)
    for spec in schedule:
        state = apply_coin(state, CoinOperator(spec.coin))
        state = shift(state, reverse=spec.reverse_shift)
    return state


def run_standard(
    space: PositionSpace,
    coin_choice: CoinChoice,
    n: int,
    initial_coin: Optional[CoinState] = None,
) -> PureState:
    """n steps of the standard walk; n=0 returns the initial state.

    Each coin choice defaults to the initial coin state that spreads it
    symmetrically; pass ``initial_coin`` to override.
    """
    if n < 0:
        raise ValueError(f"step count must be >= 0, got {n}")
    coin0 = initial_coin if initial_coin is not None else paired_initial_coin(coin_choice)
    return run_schedule(space, standard_schedule(coin_for(coin_choice), n), coin0)


def run_symmetrized(
    space: PositionSpace,
    n: int,
    initial_coin: Optional[CoinState] = None,
) -> PureState:
    """n steps of the symmetrized protocol; same position statistics as run_standard."""
    if n < 0:
        raise ValueError(f"step count must be >= 0, got {n}")
    coin0 = initial_coin if initial_coin is not None else CoinState.symmetric()
    return run_schedule(space, symmetrized_schedule(n), coin0)
