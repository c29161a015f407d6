"""States over the composite coin (x) position space.

The walker carries a two-level internal degree of freedom (the "coin") and
lives on either a finite symmetric window of the integer line or a ring of N
sites.  Everything downstream shares one flat index convention, coin-major:

    flat = c * dim + index_of(k),   c in {0, 1}

Pure states are complex vectors of length 2*dim, density operators complex
(2*dim, 2*dim) matrices with the same index meaning on both axes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class Topology(enum.Enum):
    LINE = "line"
    CIRCLE = "circle"


class PositionOutOfRangeError(ValueError):
    """Requested lattice position lies outside the allocated window."""


class WindowOverflowError(RuntimeError):
    """State support reached the edge of a line window; the window was sized too small."""


class UnsupportedTopologyError(ValueError):
    """Operation defined for one topology was applied to the other."""


@dataclass(frozen=True)
class PositionSpace:
    """Finite position space: a symmetric line window or a periodic ring.

    For ``Topology.LINE`` the extent is the half-width n_max, giving positions
    k in [-n_max, n_max] and dimension 2*n_max + 1.  For ``Topology.CIRCLE``
    the extent is the site count N, positions k in [0, N-1] identified mod N.
    """

    topology: Topology
    extent: int

    def __post_init__(self) -> None:
        if self.topology is Topology.LINE and self.extent < 1:
            raise ValueError(f"line window needs extent >= 1, got {self.extent}")
        if self.topology is Topology.CIRCLE and self.extent < 2:
            raise ValueError(f"circle needs at least 2 sites, got {self.extent}")

    @staticmethod
    def line(n_max: int) -> "PositionSpace":
        return PositionSpace(Topology.LINE, n_max)

    @staticmethod
    def circle(n_sites: int) -> "PositionSpace":
        return PositionSpace(Topology.CIRCLE, n_sites)

    @property
    def dim(self) -> int:
        return 2 * self.extent + 1 if self.topology is Topology.LINE else self.extent

    def index_of(self, k: int) -> int:
        """Array index of position k.  Circle positions are reduced mod N."""
        if self.topology is Topology.LINE:
            if not -self.extent <= k <= self.extent:
                raise PositionOutOfRangeError(
                    f"position {k} outside line window [-{self.extent}, {self.extent}]"
                )
            return k + self.extent
        return k % self.extent

    def position_at(self, i: int) -> int:
        """Position label stored at array index i."""
        if not 0 <= i < self.dim:
            raise PositionOutOfRangeError(f"index {i} outside [0, {self.dim})")
        return i - self.extent if self.topology is Topology.LINE else i

    def positions(self) -> np.ndarray:
        """All position labels in index order."""
        if self.topology is Topology.LINE:
            return np.arange(-self.extent, self.extent + 1)
        return np.arange(self.extent)


@dataclass(frozen=True)
class CoinState:
    """Internal two-level state, amplitudes (a0, a1) on basis |0>, |1>."""

    a0: complex
    a1: complex

    @staticmethod
    def symmetric() -> "CoinState":
        # (|0> + i|1>)/sqrt(2): the relative phase i makes the walk left/right symmetric.
        return CoinState(1 / np.sqrt(2), 1j / np.sqrt(2))

    @staticmethod
    def plus() -> "CoinState":
        return CoinState(1 / np.sqrt(2), 1 / np.sqrt(2))

    @staticmethod
    def basis(c: int) -> "CoinState":
        return CoinState(1.0 + 0j, 0j) if c == 0 else CoinState(0j, 1.0 + 0j)

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1], dtype=np.complex128)

    def norm_sq(self) -> float:
        return abs(self.a0) ** 2 + abs(self.a1) ** 2


@dataclass(frozen=True)
class PureState:
    """State vector over coin (x) position, flat coin-major layout."""

    space: PositionSpace
    amps: np.ndarray  # shape (2*dim,), complex128

    def __post_init__(self) -> None:
        expected = 2 * self.space.dim
        if self.amps.shape != (expected,):
            raise ValueError(f"amplitude vector must have shape ({expected},), got {self.amps.shape}")

    def blocks(self) -> np.ndarray:
        """(2, dim) view: row c holds the coin-c amplitudes over positions."""
        return self.amps.reshape(2, self.space.dim)

    def amplitude(self, c: int, k: int) -> complex:
        return self.amps[c * self.space.dim + self.space.index_of(k)]

    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def check_normalized(self, tol: float = 1e-10) -> None:
        if abs(self.norm_sq() - 1.0) > tol:
            raise ValueError(f"state norm^2 = {self.norm_sq()} deviates from 1 beyond {tol}")


@dataclass(frozen=True)
class DensityOperator:
    """Density operator over coin (x) position, same flat index on both axes.

    ``normalized=False`` marks the unnormalized conditional states used while
    tracking survival under absorbing barriers; there trace < 1 is legitimate
    and equals the survival probability.
    """

    space: PositionSpace
    matrix: np.ndarray  # shape (2*dim, 2*dim), complex128
    normalized: bool = True

    def __post_init__(self) -> None:
        expected = 2 * self.space.dim
        if self.matrix.shape != (expected, expected):
            raise ValueError(
                f"density matrix must have shape ({expected}, {expected}), got {self.matrix.shape}"
            )

    def blocks(self) -> np.ndarray:
        """(2, dim, 2, dim) view: block [c, :, d, :] couples coin c to coin d."""
        d = self.space.dim
        return self.matrix.reshape(2, d, 2, d)

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def validate(self, tol: float = 1e-10) -> None:
        """Check Hermiticity, and trace 1 unless flagged unnormalized."""
        dev = np.max(np.abs(self.matrix - self.matrix.conj().T))
        if dev > tol:
            raise ValueError(f"density matrix not Hermitian: max |rho - rho^dag| = {dev}")
        if self.normalized and abs(self.trace() - 1.0) > tol:
            raise ValueError(f"trace = {self.trace()} deviates from 1 beyond {tol}")


State = PureState | DensityOperator


def make_initial(space: PositionSpace, coin: CoinState, k0: int = 0) -> PureState:
    """Product state: the given coin state localized at position k0."""
    if abs(coin.norm_sq() - 1.0) > 1e-12:
        raise ValueError(f"initial coin state not normalized: |a0|^2 + |a1|^2 = {coin.norm_sq()}")
    dim = space.dim
    idx = space.index_of(k0)
    amps = np.zeros(2 * dim, dtype=np.complex128)
    amps[idx] = coin.a0
    amps[dim + idx] = coin.a1
    return PureState(space, amps)


def to_density(psi: PureState) -> DensityOperator:
    """Rank-1 density operator |psi><psi|."""
    return DensityOperator(psi.space, np.outer(psi.amps, psi.amps.conj()))


def grow_window(state: State, margin: int) -> State:
    """Re-embed a line state in a window widened by ``margin`` sites per side.

    Amplitudes are copied verbatim; the embedding is exact.  Sized so that an
    n-step walk fits in a window with n_max >= n (support moves at most one
    site per step), making later shifts pure index permutations.
    """
    if state.space.topology is not Topology.LINE:
        raise UnsupportedTopologyError("grow_window applies to line windows only")
    if margin < 0:
        raise ValueError(f"margin must be >= 0, got {margin}")
    old = state.space
    new = PositionSpace.line(old.extent + margin)
    lo = margin  # old index 0 lands here
    hi = margin + old.dim
    if isinstance(state, PureState):
        amps = np.zeros(2 * new.dim, dtype=np.complex128)
        amps.reshape(2, new.dim)[:, lo:hi] = state.blocks()
        return PureState(new, amps)
    mat = np.zeros((2 * new.dim, 2 * new.dim), dtype=np.complex128)
    mat.reshape(2, new.dim, 2, new.dim)[:, lo:hi, :, lo:hi] = state.blocks()
    return DensityOperator(new, mat, normalized=state.normalized)
