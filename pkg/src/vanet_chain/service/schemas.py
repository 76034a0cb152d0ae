"""Request and response bodies of the HTTP interface."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class CalibrateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    speed_kmh: float = Field(gt=0)
    carrier_ghz: float = Field(default=3.9, gt=0)
    symbol_rate: float = Field(default=1e5, gt=0)
    threshold_ratio: float = Field(default=0.1, gt=0)
    dt_s: float | None = Field(default=None, gt=0)


class CalibrateResponse(BaseModel):
    """Derived chain parameters; p, q, dt_s feed back in as a direct calibration."""

    f_d_hz: float
    dt_max_s: float
    dt_default_s: float
    dt_s: float
    p: float
    q: float
    p_good: float


class ScenarioInfo(BaseModel):
    name: str
    description: str = ""


class RunRequest(BaseModel):
    """Run a built-in scenario by name or an inline scenario document."""

    model_config = ConfigDict(extra="forbid")

    builtin: str | None = None
    scenario: dict | None = None
    seed: int | None = Field(default=None, ge=0, lt=2 ** 64)
    trials: int | None = Field(default=None, ge=1)
    threads: int = Field(default=1, ge=1)
