"""FastAPI application exposing the bound computations."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import CapacityError, InputError, PreconditionError
from . import handlers
from . import schemas as sc


def create_app() -> FastAPI:
    app = FastAPI(title="mrfuq", version=__version__)

    @app.exception_handler(InputError)
    async def _input_error(request: Request, exc: InputError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(CapacityError)
    async def _capacity_error(request: Request, exc: CapacityError):
        return JSONResponse(status_code=413, content={"detail": str(exc)})

    @app.exception_handler(PreconditionError)
    async def _precondition_error(request: Request, exc: PreconditionError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/healthz", response_model=sc.HealthResponse)
    def healthz() -> sc.HealthResponse:
        return sc.HealthResponse(status="ok", version=__version__)

    @app.post("/bound", response_model=sc.BoundResponse)
    def bound(req: sc.BoundRequest) -> sc.BoundResponse:
        return handlers.handle_bound(req)

    @app.post("/medical", response_model=sc.MedicalResponse)
    def medical(req: sc.MedicalRequest) -> sc.MedicalResponse:
        return handlers.handle_medical(req)

    @app.post("/ising/band", response_model=sc.IsingBandResponse)
    def ising_band(req: sc.IsingBandRequest) -> sc.IsingBandResponse:
        return handlers.handle_ising_band(req)

    @app.post("/ising/finite", response_model=sc.IsingFiniteResponse)
    def ising_finite(req: sc.IsingFiniteRequest) -> sc.IsingFiniteResponse:
        return handlers.handle_ising_finite(req)

    @app.post("/ising/coarse", response_model=sc.IsingCoarseResponse)
    def ising_coarse(req: sc.IsingCoarseRequest) -> sc.IsingCoarseResponse:
        return handlers.handle_ising_coarse(req)

    @app.post("/ising/longrange", response_model=sc.IsingLongRangeResponse)
    def ising_longrange(req: sc.IsingLongRangeRequest) -> sc.IsingLongRangeResponse:
        return handlers.handle_ising_longrange(req)

    return app


app = create_app()
