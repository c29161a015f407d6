"""Pydantic request/response models for the HTTP service.

Requests reuse the experiment-config building blocks (`NoisePoint`,
`TopologySpec`, `ExperimentConfig`) so the wire format and the manifest format
never drift apart.
"""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..experiments import ExperimentConfig, NoisePoint, TopologySpec


class HealthResponse(BaseModel):
    status: Literal["ok"]
    version: str


class DistributionPayload(BaseModel):
    """A position distribution as parallel arrays, sorted by position."""

    positions: list[int]
    probabilities: list[float]
    total: float
    subnormalized: bool = False
    meta: dict[str, Any] = Field(default_factory=dict)


class StatsPayload(BaseModel):
    mean: float
    std_dev: float
    interval_mass: Optional[float] = None


class WalkRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    protocol: Literal["standard", "symmetrized"] = "standard"
    coin: Literal["hadamard", "halfpi"] = "hadamard"
    topology: TopologySpec = Field(default_factory=TopologySpec)
    steps: int = Field(ge=0)
    noise: NoisePoint = Field(default_factory=NoisePoint)
    initial_coin: Literal["auto", "symmetric", "plus", "zero", "one"] = "auto"
    trajectories: int = Field(default=0, ge=0)
    seed: Optional[int] = None
    conditionals: bool = False
    pre_measurement_flip: bool = False  # 50/50 coin flip before coin-selective readout

    @model_validator(mode="after")
    def _seed_with_trajectories(self) -> "WalkRequest":
        if self.trajectories > 0 and self.seed is None:
            raise ValueError("seed is required whenever trajectories > 0")
        return self


class WalkResponse(BaseModel):
    distribution: DistributionPayload
    stats: StatsPayload
    conditional_coin0: Optional[DistributionPayload] = None
    conditional_coin1: Optional[DistributionPayload] = None


class BoundedRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    coin: Literal["hadamard", "halfpi"] = "hadamard"
    steps: int = Field(ge=1)
    barriers: list[int] = Field(min_length=1, max_length=2)
    noise: NoisePoint = Field(default_factory=NoisePoint)
    initial_coin: Literal["auto", "symmetric", "plus", "zero", "one"] = "auto"
    include_classical: bool = False

    @model_validator(mode="after")
    def _barriers_off_start(self) -> "BoundedRequest":
        if 0 in self.barriers:
            raise ValueError("a barrier cannot sit on the start site 0")
        if len(set(self.barriers)) != len(self.barriers):
            raise ValueError("barrier positions must be distinct")
        return self


class AbsorptionSeries(BaseModel):
    steps: list[int]
    increments: list[float]
    cumulative: list[float]
    survival: float


class BoundedResponse(BaseModel):
    quantum: AbsorptionSeries
    classical: Optional[AbsorptionSeries] = None


class ClassicalRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    steps: int = Field(ge=0)
    barriers: list[int] = Field(default_factory=list, max_length=2)


class ClassicalResponse(BaseModel):
    distribution: Optional[DistributionPayload] = None
    absorption: Optional[AbsorptionSeries] = None


class SampleRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    protocol: Literal["standard", "symmetrized"] = "standard"
    coin: Literal["hadamard", "halfpi"] = "hadamard"
    topology: TopologySpec = Field(default_factory=TopologySpec)
    steps: int = Field(ge=0)
    noise: NoisePoint = Field(default_factory=NoisePoint)
    initial_coin: Literal["auto", "symmetric", "plus", "zero", "one"] = "auto"
    shots: int = Field(ge=1)
    seed: int


class SampleResponse(BaseModel):
    distribution: DistributionPayload
    shots: int


class PresetList(BaseModel):
    presets: list[str]


__all__ = [
    "AbsorptionSeries",
    "BoundedRequest",
    "BoundedResponse",
    "ClassicalRequest",
    "ClassicalResponse",
    "DistributionPayload",
    "ExperimentConfig",
    "HealthResponse",
    "NoisePoint",
    "PresetList",
    "SampleRequest",
    "SampleResponse",
    "StatsPayload",
    "TopologySpec",
    "WalkRequest",
    "WalkResponse",
]
