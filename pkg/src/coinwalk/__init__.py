"""coinwalk: discrete-time coined quantum walks on a line or circle.

Exact pure-state and density-operator evolution, three decoherence channels
with Monte Carlo unraveling, absorbing barriers, classical baselines, and a
config-driven experiment harness.  A FastAPI service wraps the package; the
bundled CLI is a thin client of that service.
"""

__version__ = "0.1.0"

from .hilbert import (
    CoinState,
    DensityOperator,
    PositionSpace,
    PositionOutOfRangeError,
    PureState,
    Topology,
    UnsupportedTopologyError,
    WindowOverflowError,
    grow_window,
    make_initial,
    to_density,
)
from .dynamics import (
    CoinChoice,
    CoinOperator,
    Protocol,
    ProtocolVariant,
    apply_coin,
    conjugated_hadamard,
    hadamard,
    hadamard_from_three_pulses,
    half_pi_pulse,
    run_standard,
    run_symmetrized,
    shift,
    step,
)
from .channels import (
    Channel,
    NoiseSpec,
    depolarizing_coin,
    dephasing_coin,
    run_noisy,
    run_trajectory,
    tunneling,
    unravel,
)
from .classical import ClassicalDistribution, binomial_walk, classical_dp_step, run_dp
from .absorbing import AbsorptionRecord, BarrierConfig, bounded_step, run_bounded
from .measurement import (
    Distribution,
    PreMeasurementFlip,
    SummaryStats,
    TrajectorySpec,
    conditional_distributions,
    position_distribution,
    sample_positions,
    summary,
    tv_distance,
)
from .experiments import (
    Curve,
    ExperimentConfig,
    ExperimentResult,
    NoisePoint,
    TopologySpec,
    load_manifest_config,
    preset,
    run_experiment,
    write_result,
)

__all__ = [
    "__version__",
    "AbsorptionRecord",
    "BarrierConfig",
    "Channel",
    "ClassicalDistribution",
    "CoinChoice",
    "CoinOperator",
    "CoinState",
    "Curve",
    "DensityOperator",
    "Distribution",
    "ExperimentConfig",
    "ExperimentResult",
    "NoisePoint",
    "NoiseSpec",
    "PositionOutOfRangeError",
    "PositionSpace",
    "PreMeasurementFlip",
    "Protocol",
    "ProtocolVariant",
    "PureState",
    "SummaryStats",
    "Topology",
    "TopologySpec",
    "TrajectorySpec",
    "UnsupportedTopologyError",
    "WindowOverflowError",
    "apply_coin",
    "binomial_walk",
    "bounded_step",
    "classical_dp_step",
    "conditional_distributions",
    "conjugated_hadamard",
    "dephasing_coin",
    "depolarizing_coin",
    "grow_window",
    "hadamard",
    "hadamard_from_three_pulses",
    "half_pi_pulse",
    "load_manifest_config",
    "make_initial",
    "position_distribution",
    "preset",
    "run_bounded",
    "run_dp",
    "run_experiment",
    "run_noisy",
    "run_standard",
    "run_symmetrized",
    "run_trajectory",
    "sample_positions",
    "shift",
    "step",
    "summary",
    "to_density",
    "tunneling",
    "tv_distance",
    "unravel",
    "write_result",
]
