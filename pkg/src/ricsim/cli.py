"""Thin command-line client for the simulator service.

Subcommands map one-to-one onto the service endpoints.  By default requests
dispatch to the handlers in-process (no server required); with ``--server``
the same requests go over HTTP to a running ``ricsim serve`` instance.  The
CLI owns only argument parsing, config-file reading, output-file writing,
and one-line summaries -- all simulation logic lives behind the API.

Exit codes: 0 on success, 1 on any runtime or configuration failure, 2 on
usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import api
from .errors import SimulationError

_ENDPOINTS = {
    "synth": (api.SynthRequest, api.SynthResponse, api.handle_synth),
    "train": (api.TrainRequest, api.TrainResponse, api.handle_train),
    "eval": (api.EvalRequest, api.EvalResponse, api.handle_eval),
    "throughput": (api.ThroughputRequest, api.ThroughputResponse, api.handle_throughput),
    "secrecy": (api.SecrecyRequest, api.SecrecyResponse, api.handle_secrecy),
    "optimize-alpha": (api.OptimizeAlphaRequest, api.OptimizeAlphaResponse, api.handle_optimize_alpha),
    "operators": (api.OperatorRequest, api.OperatorResponse, api.handle_operator),
}


class Client:
    """Dispatches requests in-process or to a remote server."""

    def __init__(self, server: str | None):
        self.server = server.rstrip("/") if server else None

    def call(self, endpoint: str, request):
        if self.server is None:
            return _ENDPOINTS[endpoint][2](request)
        import httpx

        url = f"{self.server}/v1/{endpoint}"
        reply = httpx.post(url, json=request.model_dump(), timeout=None)
        if reply.status_code != 200:
            try:
                detail = reply.json().get("detail", reply.text)
            except Exception:
                detail = reply.text
            raise SimulationError(f"{url} failed ({reply.status_code}): {detail}")
        return _ENDPOINTS[endpoint][1].model_validate(reply.json())


def _read_config(path: str | None) -> str | None:
    if path is None:
        return None
    p = Path(path)
    if not p.exists():
        raise SimulationError(f"config file not found: {p}")
    return p.read_text()


def _int_grid(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer grid, got {text!r}")


def _float_grid(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated float grid, got {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ricsim",
        description="Computational-surface simulator: datasets, classifier training, "
        "throughput and secrecy sweeps, analog operators.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to a key=value config file")
    common.add_argument("--seed", type=int, help="master seed override (unsigned 64-bit)")
    common.add_argument("--server", help="base URL of a running service; default is in-process")
    common.add_argument("--workers", type=int, help="parallel workers (results are worker-count independent)")

    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("synth", parents=[common], help="generate a labeled capture dataset")
    p.add_argument("--out", help="dataset directory (default <out_dir>/dataset-<role>)")
    p.add_argument("--per-class", type=int, help="examples per class (default from config)")
    p.add_argument("--role", choices=("train", "test"), default="train", help="which dataset substream to draw")

    p = sub.add_parser("train", parents=[common], help="train the diffractive classifier")
    p.add_argument("--layers", type=int, help="number of phase-mask layers")
    p.add_argument("--out", help="checkpoint path (default <out_dir>/onn-<layers>layer.ckpt)")
    p.add_argument("--data", help="train on an existing dataset directory instead of generating")

    p = sub.add_parser("eval", parents=[common], help="evaluate a checkpoint on the test set")
    p.add_argument("--ckpt", required=True, help="model checkpoint path")
    p.add_argument("--data", help="evaluate on an existing dataset directory")

    p = sub.add_parser("throughput", parents=[common], help="TDMA throughput sweep")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--elements", type=_int_grid, help="element-count grid, e.g. 20,40,60")
    p.add_argument("--trials", type=int, help="Monte-Carlo frames per point")
    p.add_argument("--emulate-accuracy", action="store_true", help="sample inference from stored confusion matrices")
    p.add_argument("--models", help="checkpoint directory (default the config out_dir)")
    p.add_argument("--model-2layer", help="explicit 2-layer checkpoint path")
    p.add_argument("--model-4layer", help="explicit 4-layer checkpoint path")

    p = sub.add_parser("secrecy", parents=[common], help="secrecy-rate sweep with a no-surface baseline")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--elements", type=_int_grid, help="element-count grid")
    p.add_argument("--alpha", type=_float_grid, help="reflected-power grid, e.g. 0.2,0.5,0.8")

    p = sub.add_parser("optimize-alpha", parents=[common], help="grid-search the reflect/refract split")
    p.add_argument("--elements", type=int, help="element count (default from config)")
    p.add_argument("--step", type=float, default=0.01, help="alpha grid step (default 0.01)")

    p = sub.add_parser("operators", parents=[common], help="apply an analog operator to a signal file")
    p.add_argument("--op", required=True, help="differentiate | integrate | convolve | frequency_shift")
    p.add_argument("--in", dest="in_path", required=True, help="input signal file")
    p.add_argument("--out", required=True, help="output signal file")
    p.add_argument("--shift-hz", type=float, default=0.0, help="shift for frequency_shift")
    p.add_argument("--kernel", help="kernel signal file for convolve")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "serve":
        import uvicorn

        from .app import app

        uvicorn.run(app, host=args.host, port=args.port, log_level="info")
        return 0

    client = Client(args.server)
    config_text = _read_config(args.config)

    if args.command == "synth":
        req = api.SynthRequest(
            config_text=config_text,
            seed=args.seed,
            out_dir=args.out,
            per_class=args.per_class,
            role=args.role,
            workers=args.workers,
        )
        resp = client.call("synth", req)
        print(f"wrote {resp.count} captures ({resp.per_class} per class) to {resp.directory}")

    elif args.command == "train":
        req = api.TrainRequest(
            config_text=config_text,
            seed=args.seed,
            checkpoint=args.out,
            layers=args.layers,
            dataset_dir=args.data,
            workers=args.workers,
        )
        resp = client.call("train", req)
        print(
            f"trained {resp.layers}-layer model in {resp.train_seconds:.1f}s "
            f"(loss {resp.loss_first:.4f} -> {resp.loss_final:.4f}); "
            f"test accuracy {resp.test_accuracy:.4f}"
        )
        print(f"checkpoint: {resp.checkpoint}")

    elif args.command == "eval":
        req = api.EvalRequest(
            config_text=config_text,
            seed=args.seed,
            checkpoint=args.ckpt,
            dataset_dir=args.data,
            workers=args.workers,
        )
        resp = client.call("eval", req)
        print(f"accuracy {resp.accuracy!r}")

    elif args.command == "throughput":
        req = api.ThroughputRequest(
            config_text=config_text,
            seed=args.seed,
            elements=args.elements,
            trials=args.trials,
            emulate_accuracy=args.emulate_accuracy,
            models_dir=args.models,
            model_2layer=args.model_2layer,
            model_4layer=args.model_4layer,
            workers=args.workers,
        )
        resp = client.call("throughput", req)
        _write_csv(args.out, resp.csv)

    elif args.command == "secrecy":
        req = api.SecrecyRequest(
            config_text=config_text,
            seed=args.seed,
            elements=args.elements,
            alphas=args.alpha,
        )
        resp = client.call("secrecy", req)
        _write_csv(args.out, resp.csv)

    elif args.command == "optimize-alpha":
        req = api.OptimizeAlphaRequest(
            config_text=config_text,
            seed=args.seed,
            n_elements=args.elements,
            grid_step=args.step,
        )
        resp = client.call("optimize-alpha", req)
        print(f"N={resp.n_elements}: alpha*={resp.alpha_star!r} secrecy*={resp.secrecy_star!r} bps/Hz")

    elif args.command == "operators":
        req = api.OperatorRequest(
            op=args.op,
            in_path=args.in_path,
            out_path=args.out,
            shift_hz=args.shift_hz,
            kernel_path=args.kernel,
        )
        resp = client.call("operators", req)
        print(
            f"applied {args.op}: {resp.n_samples} samples, "
            f"power {resp.power_in!r} -> {resp.power_out!r}, wrote {resp.out_path}"
        )

    else:  # pragma: no cover - argparse enforces the choices
        raise SimulationError(f"unknown command {args.command!r}")
    return 0


def _write_csv(out: str | None, csv: str) -> None:
    if out:
        Path(out).write_bytes(csv.encode("utf-8"))
        print(f"wrote {csv.count(chr(10)) - 1} rows to {out}")
    else:
        sys.stdout.write(csv)


def run(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (SimulationError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
