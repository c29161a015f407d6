"""Config-driven experiment harness.

An :class:`ExperimentConfig` describes one run: what to simulate (walk,
bounded walk, classical baseline, or shot sampling), over which parameter
points, and how to reproduce it (seed).  Running one yields a set of named
curves plus a manifest that round-trips the exact configuration.

Bundled presets (``fig1`` .. ``fig4``) cover the standard demonstration
plots: the depolarizing-noise ladder, dephasing at several durations, coin
noise combined with tunneling, and the absorbed fraction at a barrier.
"""

from __future__ import annotations

import json
import time
from pathlib import Path
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from . import __version__
from .hilbert import CoinState, PositionSpace
from .dynamics import (
    CoinChoice,
    Protocol,
    ProtocolVariant,
    coin_for,
    paired_initial_coin,
    protocol_schedule,
    run_schedule,
)
from .channels import NoiseSpec, average_trajectories, run_noisy
from .classical import binomial_walk, run_dp
from .absorbing import BarrierConfig, run_bounded
from .measurement import Distribution, TrajectorySpec, position_distribution, sample_positions, summary

Kind = Literal["walk", "bounded", "classical", "sample"]

INITIAL_COIN_STATES = {
    "symmetric": CoinState.symmetric,
    "plus": CoinState.plus,
    "zero": lambda: CoinState.basis(0),
    "one": lambda: CoinState.basis(1),
}


def resolve_initial_coin(name: str, coin: str) -> CoinState:
    """Map a named initial coin to a state; ``auto`` follows the coin pairing."""
    if name == "auto":
        return paired_initial_coin(CoinChoice(coin))
    return INITIAL_COIN_STATES[name]()


class NoisePoint(BaseModel):
    """One setting of the error channels; a ``None`` parameter disables that channel."""

    model_config = ConfigDict(extra="forbid")

    p: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    p_prime: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    q: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    label: Optional[str] = None
    tunnel_before_shift: bool = False
    allow_combined_coin_noise: bool = False

    @model_validator(mode="after")
    def _coin_channels_exclusive(self) -> "NoisePoint":
        if self.p is not None and self.p_prime is not None and not self.allow_combined_coin_noise:
            raise ValueError(
                "p and p_prime both set; pass allow_combined_coin_noise to compose "
                "depolarizing with dephasing deliberately"
            )
        return self

    @property
    def any_enabled(self) -> bool:
        return any(v is not None for v in (self.p, self.p_prime, self.q))

    def to_noise_spec(self) -> NoiseSpec:
        return NoiseSpec.from_parameters(
            p=self.p,
            p_prime=self.p_prime,
            q=self.q,
            allow_combined_coin_noise=self.allow_combined_coin_noise,
            tunnel_before_shift=self.tunnel_before_shift,
        )

    def slug(self) -> str:
        if self.label:
            return self.label
        parts = []
        if self.p is not None:
            parts.append(f"p{self.p:g}")
        if self.p_prime is not None:
            parts.append(f"pp{self.p_prime:g}")
        if self.q is not None:
            parts.append(f"q{self.q:g}")
        return "_".join(parts) if parts else "ideal"

    def meta(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        if self.p is not None:
            out["p"] = self.p
        if self.p_prime is not None:
            out["p_prime"] = self.p_prime
        if self.q is not None:
            out["q"] = self.q
        return out


class TopologySpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["line", "circle"] = "line"
    size: Optional[int] = Field(default=None, ge=2)  # circle site count

    @model_validator(mode="after")
    def _check(self) -> "TopologySpec":
        if self.kind == "circle" and self.size is None:
            raise ValueError("circle topology requires a site count (circle:N)")
        if self.kind == "line" and self.size is not None:
            raise ValueError("line windows are sized automatically; size applies to circles only")
        return self

    def to_space(self, steps: int, reach_per_step: int = 1) -> PositionSpace:
        if self.kind == "circle":
            return PositionSpace.circle(self.size)
        return PositionSpace.line(max(steps * reach_per_step, 1))


class ExperimentConfig(BaseModel):
    """Everything needed to reproduce one experiment."""

    model_config = ConfigDict(extra="forbid")

    kind: Kind = "walk"
    protocol: Literal["standard", "symmetrized"] = "standard"
    coin: Literal["hadamard", "halfpi"] = "hadamard"
    topology: TopologySpec = Field(default_factory=TopologySpec)
    steps: list[int]
    noise: list[NoisePoint] = Field(default_factory=lambda: [NoisePoint()])
    barriers: list[int] = Field(default_factory=list)
    initial_coin: Literal["auto", "symmetric", "plus", "zero", "one"] = "auto"
    include_classical: bool = False
    trajectories: int = Field(default=0, ge=0)  # 0 = exact evolution
    seed: Optional[int] = None
    output_format: Literal["csv", "json"] = "csv"

    @field_validator("steps", mode="before")
    @classmethod
    def _steps_as_list(cls, v: Any) -> Any:
        return [v] if isinstance(v, int) else v

    @field_validator("steps")
    @classmethod
    def _steps_valid(cls, v: list[int]) -> list[int]:
        if not v:
            raise ValueError("at least one step count is required")
        for n in v:
            if n < 0:
                raise ValueError(f"step counts must be >= 0, got {n}")
        return v

    @field_validator("noise")
    @classmethod
    def _noise_nonempty(cls, v: list[NoisePoint]) -> list[NoisePoint]:
        if not v:
            raise ValueError("at least one noise point is required")
        return v

    @field_validator("barriers")
    @classmethod
    def _barriers_valid(cls, v: list[int]) -> list[int]:
        if len(v) > 2:
            raise ValueError("at most two barriers are supported")
        if len(set(v)) != len(v):
            raise ValueError("barrier positions must be distinct")
        if 0 in v:
            raise ValueError("a barrier cannot sit on the start site 0")
        return v

    @model_validator(mode="after")
    def _cross_checks(self) -> "ExperimentConfig":
        if self.trajectories > 0 and self.seed is None:
            raise ValueError("seed is required whenever trajectories > 0")
        if self.kind == "bounded":
            if not self.barriers:
                raise ValueError("bounded runs require at least one barrier")
            if len(self.steps) != 1:
                raise ValueError("bounded runs take exactly one step count")
            if self.topology.kind != "line":
                raise ValueError("bounded runs are defined on the line")
            if self.protocol != "standard":
                raise ValueError("bounded runs use the standard protocol")
            if self.trajectories > 0:
                raise ValueError("bounded runs are exact; trajectories are not supported")
        elif self.barriers and self.kind != "classical":
            raise ValueError("barriers apply to bounded or classical runs only")
        if self.kind == "sample":
            if self.trajectories < 1:
                raise ValueError("sample runs need trajectories >= 1 (the shot count)")
            if len(self.steps) != 1:
                raise ValueError("sample runs take exactly one step count")
        if self.kind == "classical" and any(pt.any_enabled for pt in self.noise):
            raise ValueError("classical runs take no noise parameters")
        if self.protocol == "symmetrized" and self.coin != "hadamard":
            raise ValueError("the symmetrized protocol is built from the hadamard coin")
        return self

    def to_protocol(self) -> Protocol:
        return Protocol(ProtocolVariant(self.protocol), CoinChoice(self.coin))

    def resolve_initial_coin(self) -> CoinState:
        return resolve_initial_coin(self.initial_coin, self.coin)

    def non_standard_reasons(self) -> list[str]:
        """Configurations outside the standard pairings, recorded in the manifest."""
        reasons = []
        paired = "symmetric" if self.coin == "hadamard" else "plus"
        if self.initial_coin not in ("auto", paired):
            reasons.append("initial_coin_override")
        for pt in self.noise:
            if pt.allow_combined_coin_noise and pt.p is not None and pt.p_prime is not None:
                reasons.append("combined_coin_noise")
            if pt.p_prime is not None and pt.q is not None:
                reasons.append("dephasing_with_tunneling")
            if pt.tunnel_before_shift:
                reasons.append("tunnel_before_shift")
        return sorted(set(reasons))


class Curve(BaseModel):
    """One named table: a position distribution or an absorption time series."""

    name: str
    kind: Literal["distribution", "absorption"]
    columns: tuple[str, str]
    rows: list[tuple[int, float]]
    meta: dict[str, Any] = Field(default_factory=dict)


class ExperimentResult(BaseModel):
    config: ExperimentConfig
    curves: list[Curve]
    package_version: str
    wall_time_s: float


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------

def walk_distribution(
    *,
    protocol: Protocol,
    topology: TopologySpec,
    steps: int,
    noise: NoisePoint,
    initial_coin: CoinState,
    trajectories: int = 0,
    seed: Optional[int] = None,
) -> Distribution:
    """One walk curve: exact (pure or density) or trajectory-averaged."""
    spec = noise.to_noise_spec()
    space = topology.to_space(steps, spec.reach_per_step)
    schedule = protocol_schedule(protocol, steps)
    meta: dict[str, Any] = {"steps": steps, "protocol": protocol.variant.value, **noise.meta()}
    if trajectories > 0:
        if seed is None:
            raise ValueError("trajectory averaging needs a seed")
        probs = average_trajectories(space, schedule, initial_coin, spec, trajectories, seed)
        meta.update(trajectories=trajectories, seed=seed)
        return Distribution(
            {int(k): float(v) for k, v in zip(space.positions(), probs)}, meta
        )
    if spec.any_enabled:
        return position_distribution(run_noisy(space, schedule, initial_coin, spec), meta)
    return position_distribution(run_schedule(space, schedule, initial_coin), meta)


def bounded_curve_rows(
    *,
    coin: CoinChoice,
    steps: int,
    barriers: list[int],
    noise: NoisePoint,
    initial_coin: CoinState,
) -> list[tuple[int, float]]:
    cfg = BarrierConfig(tuple(barriers), max_steps=steps)
    records = run_bounded(cfg, coin_for(coin), noise.to_noise_spec(), steps, initial_coin)
    return [(r.step, r.cumulative) for r in records]


def classical_absorption_rows(steps: int, barriers: list[int]) -> list[tuple[int, float]]:
    run = run_dp(steps, barriers)
    return [(m + 1, c) for m, c in enumerate(run.cumulative)]


def _distribution_curve(name: str, dist: Distribution) -> Curve:
    stats = summary(dist)
    meta = dict(dist.meta)
    meta.update(total=dist.total(), mean=stats.mean, std_dev=stats.std_dev)
    return Curve(
        name=name,
        kind="distribution",
        columns=("k", "probability"),
        rows=[(k, dist.probs[k]) for k in dist.positions()],
        meta=meta,
    )


def _absorption_curve(name: str, rows: list[tuple[int, float]], meta: dict[str, Any]) -> Curve:
    return Curve(
        name=name, kind="absorption", columns=("step", "cumulative_absorbed"), rows=rows, meta=meta
    )


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every parameter point of a config and collect the curves.

    Exact runs are deterministic outright; trajectory runs are reproducible
    for a fixed seed (each curve draws from its own child stream).
    """
    started = time.perf_counter()
    curves: list[Curve] = []
    protocol = config.to_protocol()
    coin0 = config.resolve_initial_coin()

    curve_seeds: dict[int, int] = {}
    if config.seed is not None:
        n_points = len(config.steps) * len(config.noise)
        states = np.random.SeedSequence(config.seed).generate_state(max(n_points, 1))
        curve_seeds = {i: int(s) for i, s in enumerate(states)}

    if config.kind == "walk":
        index = 0
        for n in config.steps:
            for pt in config.noise:
                dist = walk_distribution(
                    protocol=protocol,
                    topology=config.topology,
                    steps=n,
                    noise=pt,
                    initial_coin=coin0,
                    trajectories=config.trajectories,
                    seed=curve_seeds.get(index),
                )
                curves.append(_distribution_curve(f"n{n}_{pt.slug()}", dist))
                index += 1
    elif config.kind == "bounded":
        n = config.steps[0]
        for pt in config.noise:
            rows = bounded_curve_rows(
                coin=CoinChoice(config.coin),
                steps=n,
                barriers=config.barriers,
                noise=pt,
                initial_coin=coin0,
            )
            meta = {"steps": n, "barriers": config.barriers, **pt.meta()}
            curves.append(_absorption_curve(f"absorbed_{pt.slug()}", rows, meta))
        if config.include_classical:
            rows = classical_absorption_rows(n, config.barriers)
            curves.append(
                _absorption_curve(
                    "absorbed_classical", rows, {"steps": n, "barriers": config.barriers}
                )
            )
    elif config.kind == "classical":
        for n in config.steps:
            if config.barriers:
                rows = classical_absorption_rows(n, config.barriers)
                curves.append(
                    _absorption_curve(
                        f"classical_absorbed_n{n}", rows, {"steps": n, "barriers": config.barriers}
                    )
                )
            else:
                dist = binomial_walk(n)
                curves.append(
                    _distribution_curve(
                        f"classical_n{n}",
                        Distribution(dict(sorted(dist.probs.items())), {"steps": n}),
                    )
                )
    elif config.kind == "sample":
        n = config.steps[0]
        pt = config.noise[0]
        spec = pt.to_noise_spec()
        space = config.topology.to_space(n, spec.reach_per_step)
        if spec.any_enabled:
            source: Any = TrajectorySpec(space, n, spec, protocol, coin0)
        else:
            source = run_schedule(space, protocol_schedule(protocol, n), coin0)
        dist = sample_positions(source, config.trajectories, config.seed)
        meta = dict(dist.meta)
        meta.update({"steps": n, "seed": config.seed, **pt.meta()})
        curves.append(
            _distribution_curve(f"sample_n{n}_{pt.slug()}", Distribution(dist.probs, meta))
        )

    return ExperimentResult(
        config=config,
        curves=curves,
        package_version=__version__,
        wall_time_s=time.perf_counter() - started,
    )


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

PRESET_NAMES = ("fig1", "fig2", "fig3", "fig4")


def preset(name: str) -> ExperimentConfig:
    """Bundled example configurations.

    fig1: 200-step walk under depolarizing coin noise, p = 1, 0.99, 0.97,
          0.95, 0 (the last one reproduces the classical walk).
    fig2: ideal walk vs dephasing p' = 0.98 after 50, 100, 150, 200 steps.
    fig3: 200-step walk under depolarizing coin noise combined with
          tunneling, (p, q) in {(1,1), (1,0.95), (0.99,1), (0.99,0.95)}.
    fig4: absorbed fraction at a barrier at -10 over 1000 steps: ideal
          quantum, p = 0.99, and the classical walk.
    """
    if name == "fig1":
        return ExperimentConfig(
            kind="walk",
            steps=[200],
            noise=[
                NoisePoint(p=1.0),
                NoisePoint(p=0.99),
                NoisePoint(p=0.97),
                NoisePoint(p=0.95),
                NoisePoint(p=0.0),
            ],
        )
    if name == "fig2":
        return ExperimentConfig(
            kind="walk",
            steps=[50, 100, 150, 200],
            noise=[NoisePoint(), NoisePoint(p_prime=0.98)],
        )
    if name == "fig3":
        return ExperimentConfig(
            kind="walk",
            steps=[200],
            noise=[
                NoisePoint(p=1.0, q=1.0),
                NoisePoint(p=1.0, q=0.95),
                NoisePoint(p=0.99, q=1.0),
                NoisePoint(p=0.99, q=0.95),
            ],
        )
    if name == "fig4":
        return ExperimentConfig(
            kind="bounded",
            steps=[1000],
            barriers=[-10],
            noise=[NoisePoint(p=1.0), NoisePoint(p=0.99)],
            include_classical=True,
        )
    raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")


# ---------------------------------------------------------------------------
# Output files
# ---------------------------------------------------------------------------

def curve_csv_bytes(curve: Curve) -> bytes:
    lines = [",".join(curve.columns)]
    lines.extend(f"{k},{v!r}" for k, v in curve.rows)
    return ("\n".join(lines) + "\n").encode("utf-8")


def curve_json_bytes(curve: Curve) -> bytes:
    payload = {"name": curve.name, "columns": list(curve.columns), "rows": curve.rows}
    return (json.dumps(payload, indent=2) + "\n").encode("utf-8")


def write_result(result: ExperimentResult, out_dir: Path | str, fmt: Optional[str] = None) -> Path:
    """Write one file per curve plus ``manifest.json``; returns the manifest path.

    Curve files are byte-identical across reruns of the same config and seed;
    the manifest additionally records wall time, which is not.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fmt = fmt or result.config.output_format
    files: dict[str, str] = {}
    for curve in result.curves:
        fname = f"{curve.name}.{fmt}"
        data = curve_csv_bytes(curve) if fmt == "csv" else curve_json_bytes(curve)
        (out / fname).write_bytes(data)
        files[curve.name] = fname
    manifest = {
        "config": result.config.model_dump(mode="json"),
        "package_version": result.package_version,
        "wall_time_s": result.wall_time_s,
        "non_standard": result.config.non_standard_reasons(),
        "curves": {c.name: c.meta for c in result.curves},
        "files": files,
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest_path


def load_manifest_config(path: Path | str) -> ExperimentConfig:
    """Parse an emitted manifest back into the exact originating config."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return ExperimentConfig.model_validate(payload["config"])
