"""FastAPI app: thin HTTP routing over the handler functions.

Error mapping: ValueError (domain validation) -> 400; pydantic catches
malformed bodies with 422; runtime failures (simulation safety cap, solver
failure) -> 500 with the message in `detail`.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..sim import SimulationCapError
from . import handlers
from .models import (
    BoundRequest,
    BoundResponse,
    ClassifyRequest,
    ClassifyResponse,
    EstimateRequest,
    EstimateResponse,
    GenGraphRequest,
    GenGraphResponse,
    SimulateRequest,
    SimulateResponse,
    SweepRequest,
    SweepResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(title="pcosync", version="0.1.0")

    def run(handler, req):
        try:
            return handler(req)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except (SimulationCapError, RuntimeError) as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest) -> SimulateResponse:
        return run(handlers.handle_simulate, req)

    @app.post("/estimate", response_model=EstimateResponse)
    def estimate(req: EstimateRequest) -> EstimateResponse:
        return run(handlers.handle_estimate, req)

    @app.post("/bound", response_model=BoundResponse)
    def bound(req: BoundRequest) -> BoundResponse:
        return run(handlers.handle_bound, req)

    @app.post("/classify", response_model=ClassifyResponse)
    def classify(req: ClassifyRequest) -> ClassifyResponse:
        return run(handlers.handle_classify, req)

    @app.post("/sweep", response_model=SweepResponse)
    def sweep(req: SweepRequest) -> SweepResponse:
        return run(handlers.handle_sweep, req)

    @app.post("/gen-graph", response_model=GenGraphResponse)
    def gen_graph(req: GenGraphRequest) -> GenGraphResponse:
        return run(handlers.handle_gen_graph, req)

    return app
