"""Command-line interface.

Every run subcommand builds an experiment config, submits it to the service
(in process unless ``--server`` points elsewhere), and writes the returned
curves plus a manifest under ``--out``.  Validation problems print a
machine-readable JSON error and exit nonzero.

    coinwalk walk --steps 200 --p 0.97 --out runs/demo
    coinwalk bounded --steps 1000 --barrier -10 --p 0.99 --include-classical --out runs/barrier
    coinwalk preset fig1 --out runs/fig1
    coinwalk serve --port 8000
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional

from pydantic import ValidationError

from .client import ServiceClient, ServiceError
from .experiments import ExperimentConfig, ExperimentResult, NoisePoint, TopologySpec, write_result


def _parse_topology(text: str) -> TopologySpec:
    if text == "line":
        return TopologySpec(kind="line")
    if text.startswith("circle:"):
        return TopologySpec(kind="circle", size=int(text.split(":", 1)[1]))
    raise argparse.ArgumentTypeError(f"topology must be 'line' or 'circle:N', got {text!r}")


def _parse_int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip() != ""]


def _add_common(parser: argparse.ArgumentParser, *, barriers: bool = False) -> None:
    parser.add_argument("--out", required=True, help="output directory for curve files and manifest")
    parser.add_argument("--format", choices=["csv", "json"], default="csv", dest="output_format")
    parser.add_argument("--server", default=None, help="base URL of a running service; default runs in process")
    if barriers:
        parser.add_argument(
            "--barrier", type=_parse_int_list, default=[], metavar="X[,Y]",
            help="absorbing barrier position(s)",
        )


def _add_walk_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--steps", type=_parse_int_list, required=True, metavar="N[,N...]")
    parser.add_argument("--topology", type=_parse_topology, default=TopologySpec(kind="line"),
                        metavar="line|circle:N")
    parser.add_argument("--protocol", choices=["standard", "symmetrized"], default="standard")
    parser.add_argument("--coin", choices=["hadamard", "halfpi"], default="hadamard")
    parser.add_argument("--initial-coin", choices=["auto", "symmetric", "plus", "zero", "one"],
                        default="auto")
    parser.add_argument("--p", type=float, default=None, help="depolarizing fidelity")
    parser.add_argument("--p-prime", type=float, default=None, help="dephasing fidelity")
    parser.add_argument("--q", type=float, default=None, help="no-tunneling probability")
    parser.add_argument("--tunnel-before-shift", action="store_true")
    parser.add_argument("--allow-combined-coin-noise", action="store_true")
    parser.add_argument("--trajectories", type=int, default=0,
                        help="Monte Carlo trajectory count; 0 = exact evolution")
    parser.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coinwalk", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_walk = sub.add_parser("walk", help="unbounded walk distribution(s)")
    _add_walk_args(p_walk)
    _add_common(p_walk)

    p_bounded = sub.add_parser("bounded", help="walk with absorbing barrier(s)")
    _add_walk_args(p_bounded)
    _add_common(p_bounded, barriers=True)
    p_bounded.add_argument("--include-classical", action="store_true",
                           help="also emit the classical absorption curve")

    p_classical = sub.add_parser("classical", help="classical fair-coin baseline")
    p_classical.add_argument("--steps", type=_parse_int_list, required=True, metavar="N[,N...]")
    _add_common(p_classical, barriers=True)

    p_sample = sub.add_parser("sample", help="empirical distribution from independent shots")
    _add_walk_args(p_sample)
    _add_common(p_sample)

    p_preset = sub.add_parser("preset", help="run a bundled experiment preset")
    p_preset.add_argument("name", help="preset name (fig1, fig2, fig3, fig4) or 'list'")
    p_preset.add_argument("--out", default=None, help="output directory (required unless 'list')")
    p_preset.add_argument("--format", choices=["csv", "json"], default=None, dest="output_format")
    p_preset.add_argument("--server", default=None)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    return parser


def _noise_point(args: argparse.Namespace) -> NoisePoint:
    return NoisePoint(
        p=args.p,
        p_prime=args.p_prime,
        q=args.q,
        tunnel_before_shift=args.tunnel_before_shift,
        allow_combined_coin_noise=args.allow_combined_coin_noise,
    )


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.command == "classical":
        return ExperimentConfig(
            kind="classical",
            steps=args.steps,
            barriers=args.barrier,
            output_format=args.output_format,
        )
    common: dict[str, Any] = dict(
        protocol=args.protocol,
        coin=args.coin,
        topology=args.topology,
        steps=args.steps,
        noise=[_noise_point(args)],
        initial_coin=args.initial_coin,
        trajectories=args.trajectories,
        seed=args.seed,
        output_format=args.output_format,
    )
    if args.command == "walk":
        return ExperimentConfig(kind="walk", **common)
    if args.command == "bounded":
        return ExperimentConfig(
            kind="bounded", barriers=args.barrier,
            include_classical=args.include_classical, **common,
        )
    return ExperimentConfig(kind="sample", **common)


def _fail(kind: str, detail: Any, code: int = 2) -> int:
    print(json.dumps({"error": kind, "detail": detail}), file=sys.stderr)
    return code


def _run_and_write(client: ServiceClient, config: ExperimentConfig,
                   out: str, fmt: Optional[str]) -> int:
    payload = client.post("/v1/experiments", config.model_dump(mode="json"))
    result = ExperimentResult.model_validate(payload)
    manifest = write_result(result, Path(out), fmt)
    print(f"wrote {len(result.curves)} curve file(s) and {manifest.name} to {manifest.parent}")
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    client = ServiceClient(args.server)
    try:
        if args.command == "preset":
            if args.name == "list":
                names = client.get("/v1/presets")["presets"]
                print("\n".join(names))
                return 0
            if args.out is None:
                return _fail("usage", "preset runs require --out DIR")
            config = ExperimentConfig.model_validate(client.get(f"/v1/presets/{args.name}"))
            return _run_and_write(client, config, args.out, args.output_format)
        config = _config_from_args(args)
        return _run_and_write(client, config, args.out, args.output_format)
    except ValidationError as exc:
        detail = [
            {"loc": list(err["loc"]), "msg": err["msg"], "type": err["type"]}
            for err in exc.errors(include_url=False)
        ]
        return _fail("validation", detail)
    except ServiceError as exc:
        code = 2 if exc.status_code in (400, 404, 422) else 1
        return _fail("service", exc.detail, code)
    except OSError as exc:
        return _fail("io", str(exc), 1)


if __name__ == "__main__":
    sys.exit(main())
