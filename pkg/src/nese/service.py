"""HTTP service wrapping the simulator.

Endpoints mirror the CLI subcommands: POST /run and /sweep execute a
config file on the server's filesystem, POST /gen synthesizes a scene,
GET /tables returns the calibration tables. The CLI can act as a thin
client against this service (see ``nese --server``).
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__, runner
from .config import load_run_config
from .errors import NeseError

app = FastAPI(title="nese", version=__version__)


class RunRequest(BaseModel):
    config_path: str = Field(description="Path to a run config (INI) on the server")


class RunResponse(BaseModel):
    summary: dict


class SweepResponse(BaseModel):
    rows: list[dict]


class GenRequest(BaseModel):
    scene_path: str
    out_dir: str
    seed: int = 0


class GenResponse(BaseModel):
    frames: int
    width: int
    height: int
    out_dir: str


class TablesResponse(BaseModel):
    text: str


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/run", response_model=RunResponse)
def run(req: RunRequest) -> RunResponse:
    try:
        cfg = load_run_config(req.config_path)
        return RunResponse(summary=runner.run_simulation(cfg))
    except NeseError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@app.post("/sweep", response_model=SweepResponse)
def sweep(req: RunRequest) -> SweepResponse:
    try:
        cfg = load_run_config(req.config_path)
        return SweepResponse(rows=runner.run_sweep(cfg))
    except NeseError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@app.post("/gen", response_model=GenResponse)
def gen(req: GenRequest) -> GenResponse:
    try:
        return GenResponse(**runner.generate_scene(req.scene_path, req.out_dir, req.seed))
    except NeseError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@app.get("/tables", response_model=TablesResponse)
def tables() -> TablesResponse:
    return TablesResponse(text=runner.render_tables())
