"""FastAPI service exposing the run engine to HTTP clients.

One POST /run endpoint executes any run configuration and returns the series
plus its manifest; the CLI is a thin client of this surface (it can also call
the engine in-process, which goes through the identical code path).  Floats
round-trip JSON exactly, so a remote client writes byte-identical data files.
"""

from __future__ import annotations

import math

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict

from . import __version__, runs
from .core import InvariantError
from .emit import _sanitize

__all__ = ["app", "RunRequest", "RunResponse"]


class RunRequest(BaseModel):
    """Mirror of the run configuration keys; unknown fields are rejected."""

    model_config = ConfigDict(extra="forbid")

    mode: str
    eta: float | None = None
    omega_hz: float | None = None
    g: float | None = None
    cutoff: int | None = None
    t_start_us: float | None = None
    t_end_us: float | None = None
    samples: int | None = None
    n0_mean: float | None = None
    phi: float | None = None
    a: float | None = None
    b: float | None = None
    c: float | None = None
    phi1: float | None = None
    phi2: float | None = None
    dist_kind: str | None = None
    dist_mean: float | None = None
    family: str | None = None
    refine_rounds: int | None = None
    n0_max: float | None = None
    seed: int | None = None
    trials: int | None = None


class RunResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mode: str
    columns: list[str]
    rows: list[list[float | str | None]]
    manifest: dict


class HealthResponse(BaseModel):
    status: str
    version: str


app = FastAPI(
    title="ionjcm",
    description="Exact red-sideband Jaynes-Cummings dynamics of two trapped ions",
    version=__version__,
)


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.get("/modes")
def modes() -> dict:
    return {"modes": list(runs.MODES)}


def _cell(value):
    if isinstance(value, str):
        return value
    v = float(value)
    return None if math.isnan(v) else v


@app.post("/run", response_model=RunResponse)
def run(request: RunRequest) -> RunResponse:
    mapping = {k: v for k, v in request.model_dump().items() if v is not None}
    try:
        config = runs.build_config(mapping)
    except runs.ConfigError as err:
        raise HTTPException(status_code=400, detail=str(err)) from err
    try:
        result = runs.execute(config)
    except InvariantError as err:
        raise HTTPException(
            status_code=500,
            detail={"error": "numerical invariant violated", "module": err.module,
                    "message": str(err)},
        ) from err
    rows = [[_cell(cell) for cell in row] for row in result.rows]
    return RunResponse(mode=result.mode, columns=result.columns, rows=rows,
                       manifest=_sanitize(result.manifest))
