"""FastAPI application exposing the analysis handlers over HTTP.

Input problems surface as 400 with a machine-readable code, an exhausted
enumeration budget as 422 with code "budget"; anything else bubbles up as
an ordinary 500.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import BudgetExceededError
from ..errors import ValidationError as CoreValidationError
from . import handlers, schemas


def create_app() -> FastAPI:
    app = FastAPI(
        title="reluscope",
        version="0.1.0",
        description="Piecewise-affine analysis of feedforward ReLU networks",
    )

    @app.exception_handler(CoreValidationError)
    async def _validation_handler(request: Request, exc: CoreValidationError):
        return JSONResponse(
            status_code=400,
            content={"detail": {"code": "validation", "message": str(exc)}},
        )

    @app.exception_handler(BudgetExceededError)
    async def _budget_handler(request: Request, exc: BudgetExceededError):
        return JSONResponse(
            status_code=422,
            content={"detail": {"code": "budget", "message": str(exc)}},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return handlers.health()

    @app.post("/analyze", response_model=schemas.AnalyzeResponse)
    def analyze(req: schemas.AnalyzeRequest):
        return handlers.analyze(req)

    @app.post("/enumerate", response_model=schemas.EnumerateResponse)
    def enumerate_regions(req: schemas.EnumerateRequest):
        return handlers.enumerate_handler(req)

    @app.post("/tile2d", response_model=schemas.Tile2dResponse)
    def tile2d(req: schemas.Tile2dRequest):
        return handlers.tile2d(req)

    @app.post("/bounds", response_model=schemas.BoundsResponse)
    def bounds(req: schemas.BoundsRequest):
        return handlers.bounds(req)

    return app


app = create_app()
