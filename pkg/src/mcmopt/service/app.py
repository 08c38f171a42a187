"""FastAPI wrapper around the solve/verify pipeline.

Run with ``uvicorn mcmopt.service.app:app``.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..backend import available_profiles, solver_available
from . import operations as ops
from .schemas import (
    CostResponse,
    EmitRequest,
    EmitResponse,
    ErrorResponse,
    GraphRequest,
    OracleRequest,
    OracleResponse,
    ReportResponse,
    SolveRequest,
)

ERRORS = {422: {"model": ErrorResponse}}


def create_app() -> FastAPI:
    api = FastAPI(title="mcmopt", version=__version__)

    @api.exception_handler(ops.RequestError)
    async def _request_error(_: Request, exc: ops.RequestError) -> JSONResponse:
        return JSONResponse(status_code=422, content=ErrorResponse(stage=exc.stage, detail=exc.detail).model_dump())

    @api.get("/health")
    def health() -> dict:
        return {
            "status": "ok",
            "version": __version__,
            "solvers": {p: solver_available(p) for p in available_profiles()},
        }

    # plain `def` routes run in the threadpool, so a long solve does not block the loop
    @api.post("/solve", response_model=ReportResponse, responses=ERRORS)
    def solve(req: SolveRequest) -> ReportResponse:
        report, _ = ops.run_solve(req)
        return report

    @api.post("/verify", response_model=ReportResponse, responses=ERRORS)
    def verify(req: GraphRequest) -> ReportResponse:
        return ops.run_verify(req)

    @api.post("/cost", response_model=CostResponse, responses=ERRORS)
    def cost(req: GraphRequest) -> CostResponse:
        return ops.run_cost(req)

    @api.post("/emit", response_model=EmitResponse, responses=ERRORS)
    def emit(req: EmitRequest) -> EmitResponse:
        return ops.run_emit(req)

    @api.post("/oracle", response_model=OracleResponse, responses=ERRORS)
    def oracle(req: OracleRequest) -> OracleResponse:
        return ops.run_oracle(req)

    return api


app = create_app()
