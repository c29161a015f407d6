"""FastAPI service wrapping the simulator.

Endpoints mirror the CLI subcommands: single walks, bounded walks, classical
baselines, shot sampling, presets, and full experiment configs.  Responses
carry plain arrays so any client can plot or persist them; the CLI writes
them to CSV files.
"""

from __future__ import annotations

import functools

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..absorbing import BarrierConfig, run_bounded
from ..channels import run_noisy
from ..classical import binomial_walk, run_dp
from ..dynamics import CoinChoice, Protocol, ProtocolVariant, coin_for, protocol_schedule, run_schedule
from ..hilbert import WindowOverflowError
from ..measurement import (
    Distribution,
    PreMeasurementFlip,
    TrajectorySpec,
    conditional_distributions,
    position_distribution,
    sample_positions,
    summary,
)
from ..experiments import (
    PRESET_NAMES,
    ExperimentConfig,
    ExperimentResult,
    preset,
    resolve_initial_coin,
    run_experiment,
    walk_distribution,
)
from .schemas import (
    AbsorptionSeries,
    BoundedRequest,
    BoundedResponse,
    ClassicalRequest,
    ClassicalResponse,
    DistributionPayload,
    HealthResponse,
    PresetList,
    SampleRequest,
    SampleResponse,
    StatsPayload,
    WalkRequest,
    WalkResponse,
)

app = FastAPI(
    title="coinwalk",
    version=__version__,
    description="Discrete-time coined quantum walk simulator",
)


def _payload(dist: Distribution) -> DistributionPayload:
    ks = dist.positions()
    return DistributionPayload(
        positions=ks,
        probabilities=[dist.probs[k] for k in ks],
        total=dist.total(),
        subnormalized=dist.subnormalized,
        meta=dist.meta,
    )


def _translate_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, KeyError, WindowOverflowError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    return wrapper


@app.get("/healthz", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/v1/walk", response_model=WalkResponse, response_model_exclude_none=True)
@_translate_errors
def walk(req: WalkRequest) -> WalkResponse:
    protocol = Protocol(ProtocolVariant(req.protocol), CoinChoice(req.coin))
    coin0 = resolve_initial_coin(req.initial_coin, req.coin)
    if req.trajectories > 0:
        if req.conditionals:
            raise ValueError("conditionals are available for exact runs only")
        dist = walk_distribution(
            protocol=protocol,
            topology=req.topology,
            steps=req.steps,
            noise=req.noise,
            initial_coin=coin0,
            trajectories=req.trajectories,
            seed=req.seed,
        )
        stats = summary(dist)
        return WalkResponse(
            distribution=_payload(dist),
            stats=StatsPayload(mean=stats.mean, std_dev=stats.std_dev, interval_mass=stats.interval_mass),
        )
    spec = req.noise.to_noise_spec()
    space = req.topology.to_space(req.steps, spec.reach_per_step)
    schedule = protocol_schedule(protocol, req.steps)
    meta = {"steps": req.steps, "protocol": req.protocol, **req.noise.meta()}
    if spec.any_enabled:
        state = run_noisy(space, schedule, coin0, spec)
    else:
        state = run_schedule(space, schedule, coin0)
    dist = position_distribution(state, meta)
    stats = summary(dist)
    cond0 = cond1 = None
    if req.conditionals:
        flip = PreMeasurementFlip.RANDOM_SIGMA_X if req.pre_measurement_flip else PreMeasurementFlip.NONE
        c0, c1 = conditional_distributions(state, flip)
        cond0, cond1 = _payload(c0), _payload(c1)
    return WalkResponse(
        distribution=_payload(dist),
        stats=StatsPayload(mean=stats.mean, std_dev=stats.std_dev, interval_mass=stats.interval_mass),
        conditional_coin0=cond0,
        conditional_coin1=cond1,
    )


def _series(steps: list[int], increments: list[float], cumulative: list[float]) -> AbsorptionSeries:
    survival = 1.0 - cumulative[-1] if cumulative else 1.0
    return AbsorptionSeries(
        steps=steps, increments=increments, cumulative=cumulative, survival=survival
    )


@app.post("/v1/bounded", response_model=BoundedResponse, response_model_exclude_none=True)
@_translate_errors
def bounded(req: BoundedRequest) -> BoundedResponse:
    cfg = BarrierConfig(tuple(req.barriers), max_steps=req.steps)
    records = run_bounded(
        cfg,
        coin_for(CoinChoice(req.coin)),
        req.noise.to_noise_spec(),
        req.steps,
        resolve_initial_coin(req.initial_coin, req.coin),
    )
    quantum = AbsorptionSeries(
        steps=[r.step for r in records],
        increments=[r.increment for r in records],
        cumulative=[r.cumulative for r in records],
        survival=records[-1].surviving_trace if records else 1.0,
    )
    classical = None
    if req.include_classical:
        dp = run_dp(req.steps, req.barriers)
        classical = _series(list(range(1, req.steps + 1)), dp.increments, dp.cumulative)
    return BoundedResponse(quantum=quantum, classical=classical)


@app.post("/v1/classical", response_model=ClassicalResponse, response_model_exclude_none=True)
@_translate_errors
def classical(req: ClassicalRequest) -> ClassicalResponse:
    if req.barriers:
        dp = run_dp(req.steps, req.barriers)
        return ClassicalResponse(
            absorption=_series(list(range(1, req.steps + 1)), dp.increments, dp.cumulative)
        )
    dist = binomial_walk(req.steps)
    probs = dict(sorted(dist.probs.items()))
    return ClassicalResponse(
        distribution=_payload(Distribution(probs, {"steps": req.steps}))
    )


@app.post("/v1/sample", response_model=SampleResponse)
@_translate_errors
def sample(req: SampleRequest) -> SampleResponse:
    protocol = Protocol(ProtocolVariant(req.protocol), CoinChoice(req.coin))
    coin0 = resolve_initial_coin(req.initial_coin, req.coin)
    spec = req.noise.to_noise_spec()
    space = req.topology.to_space(req.steps, spec.reach_per_step)
    if spec.any_enabled:
        source = TrajectorySpec(space, req.steps, spec, protocol, coin0)
    else:
        source = run_schedule(space, protocol_schedule(protocol, req.steps), coin0)
    dist = sample_positions(source, req.shots, req.seed)
    return SampleResponse(distribution=_payload(dist), shots=req.shots)


@app.get("/v1/presets", response_model=PresetList)
def presets() -> PresetList:
    return PresetList(presets=list(PRESET_NAMES))


@app.get("/v1/presets/{name}", response_model=ExperimentConfig)
def preset_config(name: str) -> ExperimentConfig:
    try:
        return preset(name)
    except KeyError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc


@app.post("/v1/experiments", response_model=ExperimentResult)
@_translate_errors
def experiments(config: ExperimentConfig) -> ExperimentResult:
    return run_experiment(config)
