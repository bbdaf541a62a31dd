"""HTTP/JSON service for the elicitation UI.

POST /v1/fit-roulette   chip histogram -> fitted t prior with feedback
POST /v1/fit-quantiles  percentile triple -> fitted t prior
POST /v1/analyze        t-test summary + prior -> full report
GET  /v1/health

Schema violations answer 400 with field-level messages, numerical
precondition failures 422, anything unexpected a sanitised 500. Every
response carries ``schema_version``.
"""

from __future__ import annotations

from typing import List, Literal, Optional, Union

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .elicitation import (
    ElicitationSheet,
    fit_t_to_histogram,
    fit_t_to_quantiles,
)
from .errors import DomainError
from .model import (
    NormalPrior,
    Orientation,
    StudentTPrior,
    TTestSummary,
    Truncation,
)
from .reports import (
    SCHEMA_VERSION,
    AnalysisRequest,
    build_report,
    fit_result_to_dict,
)

__all__ = ["create_app"]


class TPriorBody(BaseModel):
    family: Literal["t"]
    location: float
    scale: float
    df: float
    truncation: Literal["none", "pos", "neg"] = "none"


class NormalPriorBody(BaseModel):
    family: Literal["normal"]
    mean: float
    variance: float
    truncation: Literal["none", "pos", "neg"] = "none"


PriorBody = Union[TPriorBody, NormalPriorBody]


class FitRouletteBody(BaseModel):
    bin_edges: List[float] = Field(min_length=2)
    chip_counts: List[int] = Field(min_length=1)
    df: Optional[float] = None
    direction_hint: Optional[Literal["pos", "neg"]] = None


class FitQuantilesBody(BaseModel):
    p33: float
    p50: float
    p66: float
    df: float = 3.0


class AnalyzeBody(BaseModel):
    design: Literal["one", "two"]
    t: float
    n1: int
    n2: Optional[int] = None
    prior: PriorBody = Field(discriminator="family")
    direction: Optional[Literal["pos", "neg"]] = None
    compare_default: bool = False
    grid: bool = False


def _to_prior(body: PriorBody):
    if isinstance(body, TPriorBody):
        return StudentTPrior(body.location, body.scale, body.df, Truncation(body.truncation))
    return NormalPrior(body.mean, body.variance, Truncation(body.truncation))


def create_app(static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="informed-ttest", version="0.1.0")

    @app.exception_handler(RequestValidationError)
    async def on_schema_violation(request: Request, exc: RequestValidationError):
        details = [
            {
                "field": ".".join(str(p) for p in err.get("loc", []) if p != "body"),
                "message": err.get("msg", "invalid"),
            }
            for err in exc.errors()
        ]
        return JSONResponse(
            status_code=400,
            content={"schema_version": SCHEMA_VERSION, "errors": details},
        )

    @app.exception_handler(DomainError)
    async def on_precondition(request: Request, exc: DomainError):
        return JSONResponse(
            status_code=422,
            content={"schema_version": SCHEMA_VERSION, "error": str(exc)},
        )

    @app.exception_handler(Exception)
    async def on_unexpected(request: Request, exc: Exception):
        return JSONResponse(
            status_code=500,
            content={"schema_version": SCHEMA_VERSION, "error": "internal error"},
        )

    @app.get("/v1/health")
    async def health():
        return {"schema_version": SCHEMA_VERSION, "status": "ok"}

    @app.post("/v1/fit-roulette")
    async def fit_roulette(body: FitRouletteBody):
        sheet = ElicitationSheet(
            tuple(body.bin_edges),
            tuple(body.chip_counts),
            Truncation(body.direction_hint) if body.direction_hint else None,
        )
        fit = fit_t_to_histogram(sheet, body.df)
        return fit_result_to_dict(
            fit,
            overlay_range=(sheet.bin_edges[0], sheet.bin_edges[-1]),
            overlay_points=201,
        )

    @app.post("/v1/fit-quantiles")
    async def fit_quantiles(body: FitQuantilesBody):
        fit = fit_t_to_quantiles(body.p33, body.p50, body.p66, body.df)
        return fit_result_to_dict(fit, overlay_points=201)

    @app.post("/v1/analyze")
    async def analyze(body: AnalyzeBody):
        if body.design == "one":
            if body.n2 is not None:
                raise DomainError("n2 is only meaningful for design=two")
            summary = TTestSummary.one_sample(body.t, body.n1)
        else:
            if body.n2 is None:
                raise DomainError("design=two requires n2")
            summary = TTestSummary.two_sample(body.t, body.n1, body.n2)
        request = AnalysisRequest(
            summary=summary,
            prior=_to_prior(body.prior),
            direction=Orientation(body.direction) if body.direction else None,
            compare_default=body.compare_default,
            grid=body.grid,
        )
        return build_report(request)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
