"""FastAPI application exposing the simulator handlers."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import api
from .errors import SimulationError


def create_app() -> FastAPI:
    app = FastAPI(
        title="ricsim",
        description="Computational-surface simulator: spectrum sensing, throughput and secrecy experiments.",
    )

    def guarded(fn, *args):
        try:
            return fn(*args)
        except (SimulationError, FileNotFoundError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.get("/v1/health", response_model=api.HealthResponse)
    def health():
        return api.handle_health()

    @app.post("/v1/synth", response_model=api.SynthResponse)
    def synth(req: api.SynthRequest):
        return guarded(api.handle_synth, req)

    @app.post("/v1/train", response_model=api.TrainResponse)
    def train(req: api.TrainRequest):
        return guarded(api.handle_train, req)

    @app.post("/v1/eval", response_model=api.EvalResponse)
    def eval_(req: api.EvalRequest):
        return guarded(api.handle_eval, req)

    @app.post("/v1/throughput", response_model=api.ThroughputResponse)
    def throughput(req: api.ThroughputRequest):
        return guarded(api.handle_throughput, req)

    @app.post("/v1/secrecy", response_model=api.SecrecyResponse)
    def secrecy(req: api.SecrecyRequest):
        return guarded(api.handle_secrecy, req)

    @app.post("/v1/optimize-alpha", response_model=api.OptimizeAlphaResponse)
    def optimize_alpha(req: api.OptimizeAlphaRequest):
        return guarded(api.handle_optimize_alpha, req)

    @app.post("/v1/operators", response_model=api.OperatorResponse)
    def operators(req: api.OperatorRequest):
        return guarded(api.handle_operator, req)

    return app


app = create_app()
