"""FastAPI application exposing calibration and scenario runs."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import ValidationError

from .. import __version__
from ..channel import ChannelSpec, calibrate, default_timestep, max_timestep
from ..errors import VanetChainError
from ..runner import run_scenario
from ..scenarios import BUILTIN_SCENARIOS, load_builtin, load_scenario
from .schemas import CalibrateRequest, CalibrateResponse, RunRequest, ScenarioInfo


def create_app() -> FastAPI:
    app = FastAPI(title="vanet-chain", version=__version__,
                  description="Connectivity statistics for a chain of vehicles "
                              "linked by two-state Markov channels.")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/scenarios", response_model=list[ScenarioInfo])
    def list_scenarios():
        return [ScenarioInfo(name=name, description=doc.get("description", ""))
                for name, doc in BUILTIN_SCENARIOS.items()]

    @app.get("/scenarios/{name}")
    def scenario_detail(name: str) -> dict:
        if name not in BUILTIN_SCENARIOS:
            raise HTTPException(status_code=404, detail=f"unknown scenario {name!r}")
        return BUILTIN_SCENARIOS[name]

    @app.post("/calibrate", response_model=CalibrateResponse)
    def calibrate_channel(request: CalibrateRequest) -> CalibrateResponse:
        try:
            spec = ChannelSpec.from_road_units(request.speed_kmh, request.carrier_ghz,
                                               request.symbol_rate, request.threshold_ratio)
            link = calibrate(spec, dt=request.dt_s)
        except VanetChainError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return CalibrateResponse(f_d_hz=link.f_d, dt_max_s=max_timestep(link.f_d),
                                 dt_default_s=default_timestep(link.f_d), dt_s=link.dt,
                                 p=link.p, q=link.q, p_good=link.p_good)

    @app.post("/run")
    def run(request: RunRequest) -> dict:
        if (request.builtin is None) == (request.scenario is None):
            raise HTTPException(status_code=400,
                                detail="provide exactly one of 'builtin' or 'scenario'")
        try:
            if request.builtin is not None:
                scenario = load_builtin(request.builtin)
            else:
                scenario = load_scenario(request.scenario)
        except KeyError:
            raise HTTPException(status_code=404,
                                detail=f"unknown scenario {request.builtin!r}") from None
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        try:
            return run_scenario(scenario, seed=request.seed, trials=request.trials,
                                threads=request.threads)
        except VanetChainError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    return app


app = create_app()
