"""Service surface: pydantic request/response models and their handlers.

Every operation of the simulator is exposed as a handler taking a request
model and returning a response model.  The FastAPI app in :mod:`ricsim.app`
binds these handlers to HTTP routes; the CLI calls the same handlers
in-process by default, so both entry points share one code path and one
determinism contract.

Requests carry the raw config-file text (if any) plus targeted overrides;
resolution and validation happen here, server-side.  File paths in requests
are interpreted on the machine running the handlers.
"""

from __future__ import annotations

import time
from pathlib import Path

from pydantic import BaseModel, Field

from . import onn as onn_mod
from .config import Config, build_scenario, parse_config_text
from .errors import SimulationError
from .rng import child_seed
from .secrecy import SecrecyPoint, optimize_alpha, run_secrecy_experiment
from .signals import OperatorSpec, apply_operator, read_signal, write_signal
from .spectrum import Dataset, generate_captures, load_dataset, make_dataset, save_dataset
from .surface import configure_ra
from .throughput import (
    SCHEME_2LAYER,
    SCHEME_4LAYER,
    ThroughputPoint,
    run_throughput_experiment,
)

# -- requests ----------------------------------------------------------------


class BaseRequest(BaseModel):
    config_text: str | None = None
    seed: int | None = Field(default=None, ge=0, lt=2**64)


class SynthRequest(BaseRequest):
    out_dir: str | None = None  # default: <run.out_dir>/dataset-<role>
    per_class: int | None = Field(default=None, ge=1)
    role: str = "train"  # picks the dataset substream and the per-class default
    workers: int | None = Field(default=None, ge=1)


class TrainRequest(BaseRequest):
    checkpoint: str | None = None  # default: <run.out_dir>/onn-<layers>layer.ckpt
    layers: int | None = Field(default=None, ge=1)
    dataset_dir: str | None = None
    workers: int | None = Field(default=None, ge=1)


class EvalRequest(BaseRequest):
    checkpoint: str
    dataset_dir: str | None = None
    workers: int | None = Field(default=None, ge=1)


class ThroughputRequest(BaseRequest):
    elements: list[int] | None = None
    trials: int | None = Field(default=None, ge=1)
    emulate_accuracy: bool = True
    models_dir: str | None = None
    model_2layer: str | None = None
    model_4layer: str | None = None
    workers: int | None = Field(default=None, ge=1)


class SecrecyRequest(BaseRequest):
    elements: list[int] | None = None
    alphas: list[float] | None = None


class OptimizeAlphaRequest(BaseRequest):
    n_elements: int | None = Field(default=None, ge=2)
    grid_step: float = Field(default=0.01, gt=0, le=0.5)


class OperatorRequest(BaseModel):
    op: str
    in_path: str
    out_path: str
    shift_hz: float = 0.0
    kernel_path: str | None = None


# -- responses ---------------------------------------------------------------


class HealthResponse(BaseModel):
    status: str
    version: str


class SynthResponse(BaseModel):
    directory: str
    count: int
    per_class: int


class TrainResponse(BaseModel):
    checkpoint: str
    confusion_path: str
    layers: int
    epochs: int
    loss_first: float
    loss_final: float
    test_accuracy: float
    confusion: list[list[float]]
    train_seconds: float


class EvalResponse(BaseModel):
    accuracy: float
    confusion: list[list[float]]


class ThroughputRow(BaseModel):
    scheme: str
    n_elements: int
    mean_throughput_bps: float
    ci95_bps: float


class ThroughputResponse(BaseModel):
    rows: list[ThroughputRow]
    csv: str


class SecrecyRow(BaseModel):
    alpha: float | None
    n_elements: int
    rate_legit: float
    rate_eve: float
    secrecy_rate: float


class SecrecyResponse(BaseModel):
    rows: list[SecrecyRow]
    csv: str


class OptimizeAlphaResponse(BaseModel):
    n_elements: int
    alpha_star: float
    secrecy_star: float


class OperatorResponse(BaseModel):
    out_path: str
    n_samples: int
    power_in: float
    power_out: float


# -- helpers -----------------------------------------------------------------


def _resolve(req: BaseRequest, **section_overrides) -> Config:
    overrides = dict(section_overrides)
    if req.seed is not None:
        overrides.setdefault("run", {})["seed"] = req.seed
    return parse_config_text(req.config_text or "", overrides)


def _sensing_profile(cfg: Config):
    return configure_ra(cfg.surface.n_elements, cfg.surface.n_absorb)


def _dataset(cfg: Config, role: str, per_class: int | None = None, workers: int = 1) -> Dataset:
    if role not in ("train", "test"):
        raise SimulationError(f"dataset role must be 'train' or 'test', got {role!r}")
    n = per_class or (cfg.onn.train_per_class if role == "train" else cfg.onn.test_per_class)
    seed = child_seed(cfg.run.seed, f"dataset-{role}")
    return make_dataset(n, _sensing_profile(cfg), build_scenario(cfg), seed, cfg.onn.n_samples, workers)


def throughput_csv(rows: list[ThroughputPoint]) -> str:
    lines = ["scheme,n_elements,mean_throughput_bps,ci95_bps"]
    for r in rows:
        lines.append(f"{r.scheme},{r.n_elements},{r.mean_throughput_bps!r},{r.ci95_bps!r}")
    return "\n".join(lines) + "\n"


def secrecy_csv(points: list[SecrecyPoint]) -> str:
    lines = ["alpha,n_elements,rate_legit,rate_eve,secrecy_rate"]
    for p in points:
        alpha = "baseline" if p.alpha is None else repr(p.alpha)
        lines.append(f"{alpha},{p.n_elements},{p.rate_legit!r},{p.rate_eve!r},{p.secrecy!r}")
    return "\n".join(lines) + "\n"


# -- handlers ----------------------------------------------------------------


def handle_health() -> HealthResponse:
    from importlib.metadata import version

    try:
        ver = version("ricsim")
    except Exception:
        ver = "unknown"
    return HealthResponse(status="ok", version=ver)


def handle_synth(req: SynthRequest) -> SynthResponse:
    cfg = _resolve(req)
    if req.role not in ("train", "test"):
        raise SimulationError(f"dataset role must be 'train' or 'test', got {req.role!r}")
    per_class = req.per_class or (
        cfg.onn.train_per_class if req.role == "train" else cfg.onn.test_per_class
    )
    seed = child_seed(cfg.run.seed, f"dataset-{req.role}")
    captures, labels, images = generate_captures(
        per_class,
        _sensing_profile(cfg),
        build_scenario(cfg),
        seed,
        cfg.onn.n_samples,
        workers=req.workers or cfg.experiment.workers,
    )
    out_dir = Path(req.out_dir) if req.out_dir else Path(cfg.run.out_dir) / f"dataset-{req.role}"
    save_dataset(out_dir, captures, [int(l) for l in labels], images)
    return SynthResponse(directory=str(out_dir), count=len(labels), per_class=per_class)


def handle_train(req: TrainRequest) -> TrainResponse:
    cfg = _resolve(req)
    layers = req.layers or cfg.onn.layers
    workers = req.workers or cfg.experiment.workers
    if req.dataset_dir is not None:
        train_ds = load_dataset(req.dataset_dir)
    else:
        train_ds = _dataset(cfg, "train", workers=workers)
    model = onn_mod.init_model(layers, child_seed(cfg.run.seed, "model-init", layers), grid=cfg.onn.grid)
    t0 = time.perf_counter()
    model, history = onn_mod.train(
        model,
        train_ds,
        epochs=cfg.onn.epochs,
        learning_rate=cfg.onn.learning_rate,
        batch_size=cfg.onn.batch_size,
        seed=child_seed(cfg.run.seed, "train-order", layers),
        lr_decay_every=cfg.onn.lr_decay_every,
        lr_decay_factor=cfg.onn.lr_decay_factor,
    )
    elapsed = time.perf_counter() - t0
    test_ds = _dataset(cfg, "test", workers=workers)
    accuracy, confusion = onn_mod.evaluate(model, test_ds)
    ckpt = Path(req.checkpoint) if req.checkpoint else Path(cfg.run.out_dir) / f"onn-{layers}layer.ckpt"
    ckpt.parent.mkdir(parents=True, exist_ok=True)
    onn_mod.save_model(model, ckpt)
    sidecar = onn_mod.save_confusion(ckpt, accuracy, confusion)
    return TrainResponse(
        checkpoint=str(ckpt),
        confusion_path=str(sidecar),
        layers=layers,
        epochs=cfg.onn.epochs,
        loss_first=history[0],
        loss_final=history[-1],
        test_accuracy=accuracy,
        confusion=confusion.tolist(),
        train_seconds=elapsed,
    )


def handle_eval(req: EvalRequest) -> EvalResponse:
    cfg = _resolve(req)
    model = onn_mod.load_model(req.checkpoint)
    if req.dataset_dir is not None:
        ds = load_dataset(req.dataset_dir)
    else:
        ds = _dataset(cfg, "test", workers=req.workers or cfg.experiment.workers)
    accuracy, confusion = onn_mod.evaluate(model, ds)
    return EvalResponse(accuracy=accuracy, confusion=confusion.tolist())


def _classifier_paths(req: ThroughputRequest, cfg: Config) -> dict[str, Path]:
    models_dir = req.models_dir or cfg.run.out_dir
    paths = {}
    for scheme, explicit, default_name in (
        (SCHEME_2LAYER, req.model_2layer, "onn-2layer.ckpt"),
        (SCHEME_4LAYER, req.model_4layer, "onn-4layer.ckpt"),
    ):
        paths[scheme] = Path(explicit) if explicit else Path(models_dir) / default_name
        if not paths[scheme].exists():
            raise SimulationError(f"missing model checkpoint for {scheme}: {paths[scheme]}")
    return paths


def handle_throughput(req: ThroughputRequest) -> ThroughputResponse:
    cfg = _resolve(req)
    scenario = build_scenario(cfg)
    paths = _classifier_paths(req, cfg)
    confusions = models = None
    if req.emulate_accuracy:
        confusions = {s: onn_mod.load_confusion(p)[1] for s, p in paths.items()}
    else:
        models = {s: onn_mod.load_model(p) for s, p in paths.items()}
    rows = run_throughput_experiment(
        scenario,
        list(req.elements or cfg.surface.element_grid),
        frames=req.trials or cfg.experiment.frames,
        frame_slots=cfg.experiment.frame_slots,
        slot_duration_s=cfg.experiment.slot_duration_s,
        payload_bits=cfg.experiment.payload_bits,
        n_absorb=cfg.surface.n_absorb,
        seed=child_seed(cfg.run.seed, "throughput"),
        confusions=confusions,
        models=models,
        n_samples=cfg.onn.n_samples,
        workers=req.workers or cfg.experiment.workers,
    )
    return ThroughputResponse(
        rows=[ThroughputRow(**r.__dict__) for r in rows],
        csv=throughput_csv(rows),
    )


def handle_secrecy(req: SecrecyRequest) -> SecrecyResponse:
    cfg = _resolve(req)
    points = run_secrecy_experiment(
        build_scenario(cfg),
        list(req.elements or cfg.surface.element_grid),
        list(req.alphas or cfg.surface.alpha_grid),
        seed=child_seed(cfg.run.seed, "secrecy"),
        fading_trials=cfg.experiment.fading_trials,
    )
    return SecrecyResponse(
        rows=[
            SecrecyRow(
                alpha=p.alpha,
                n_elements=p.n_elements,
                rate_legit=p.rate_legit,
                rate_eve=p.rate_eve,
                secrecy_rate=p.secrecy,
            )
            for p in points
        ],
        csv=secrecy_csv(points),
    )


def handle_optimize_alpha(req: OptimizeAlphaRequest) -> OptimizeAlphaResponse:
    cfg = _resolve(req)
    n = req.n_elements or cfg.surface.n_elements
    alpha_star, secrecy_star = optimize_alpha(build_scenario(cfg), n, req.grid_step)
    return OptimizeAlphaResponse(n_elements=n, alpha_star=alpha_star, secrecy_star=secrecy_star)


def handle_operator(req: OperatorRequest) -> OperatorResponse:
    sig = read_signal(req.in_path)
    kernel = None
    if req.kernel_path is not None:
        kernel = read_signal(req.kernel_path).samples
    spec = OperatorSpec(kind=req.op, kernel=kernel, shift_hz=req.shift_hz)
    out = apply_operator(spec, sig)
    write_signal(out, req.out_path)
    return OperatorResponse(
        out_path=str(req.out_path),
        n_samples=len(out),
        power_in=sig.power(),
        power_out=out.power(),
    )
