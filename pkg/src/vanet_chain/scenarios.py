"""Scenario schema and the built-in scenario catalog.

A scenario is one JSON document: a calibration (physical road parameters
or direct p, q, dt), a fleet size, and a list of experiments. Each
experiment evaluates one analytic quantity and optionally re-estimates
it by simulation. Everything an experiment needs is validated here, at
load time, against the preconditions of the module that owns it.
"""

from __future__ import annotations

from typing import Literal, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .analytics import ClusterSpec
from .channel import ChannelSpec, MarkovLink, calibrate
from .errors import VanetChainError
from .stability import StabilityQuery

_NAME_PATTERN = r"^[A-Za-z0-9][A-Za-z0-9._-]*$"


class PhysicalCalibration(BaseModel):
    """Road-unit inputs; p, q and the timestep are derived."""

    model_config = ConfigDict(extra="forbid")

    speed_kmh: float = Field(gt=0)
    carrier_ghz: float = Field(default=3.9, gt=0)
    symbol_rate: float = Field(default=1e5, gt=0)
    threshold_ratio: float = Field(default=0.1, gt=0)
    dt_s: float | None = Field(default=None, gt=0)


class DirectCalibration(BaseModel):
    """Ready-made chain parameters; extra keys (a calibrate dump) are ignored."""

    model_config = ConfigDict(extra="ignore")

    p: float = Field(gt=0, lt=1)
    q: float = Field(gt=0, lt=1)
    dt_s: float = Field(gt=0)


Calibration = Union[PhysicalCalibration, DirectCalibration]


def _coerce_calibration(value):
    if isinstance(value, (PhysicalCalibration, DirectCalibration)) or value is None:
        return value
    if not isinstance(value, dict):
        raise ValueError("calibration must be an object")
    physical = "speed_kmh" in value
    direct = "p" in value or "q" in value
    if physical and direct:
        raise ValueError("calibration must be physical (speed_kmh, ...) or direct (p, q, dt_s), not both")
    if physical:
        return PhysicalCalibration(**value)
    return DirectCalibration(**value)


def calibration_link(calibration: Calibration) -> MarkovLink:
    """Turn either calibration style into a MarkovLink."""
    if isinstance(calibration, DirectCalibration):
        return MarkovLink.from_rates(calibration.p, calibration.q, calibration.dt_s)
    spec = ChannelSpec.from_road_units(calibration.speed_kmh, calibration.carrier_ghz,
                                       calibration.symbol_rate, calibration.threshold_ratio)
    return calibrate(spec, dt=calibration.dt_s)


class ClusterBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    first_car: int = Field(ge=1)
    link_count: int = Field(ge=1)


class SimulationBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    trials: int = Field(ge=1)
    seed: int | None = Field(default=None, ge=0, lt=2 ** 64)
    horizon: int | None = Field(default=None, ge=1)


ExperimentKind = Literal["link_duration", "cluster_lifetime", "cluster_existence", "omega_stable"]


class Experiment(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: ExperimentKind
    name: str | None = Field(default=None, pattern=_NAME_PATTERN)
    calibration: Calibration | None = None
    cluster: ClusterBlock | None = None
    start: int | None = None
    end_first: int | None = None
    end_last: int | None = None
    window: int | None = None
    tail_tolerance: float = Field(default=1e-9, gt=0, lt=1)
    mass_floor: float | None = Field(default=None, gt=0)
    max_ci_violation_rate: float = Field(default=0.02, ge=0, le=1)
    simulation: SimulationBlock | None = None

    @field_validator("calibration", mode="before")
    @classmethod
    def _calibration(cls, value):
        return _coerce_calibration(value)

    @model_validator(mode="after")
    def _check_kind_fields(self):
        if self.kind in ("cluster_lifetime", "cluster_existence") and self.cluster is None:
            raise ValueError(f"a {self.kind} experiment needs a cluster block")
        if self.kind in ("cluster_existence", "omega_stable"):
            for name in ("start", "end_first", "end_last"):
                if getattr(self, name) is None:
                    raise ValueError(f"a {self.kind} experiment needs {name}")
            if self.end_last < self.end_first:
                raise ValueError(f"end_last={self.end_last} is below end_first={self.end_first}")
            if self.end_first < self.start:
                raise ValueError(f"end_first={self.end_first} is below start={self.start}")
        if self.kind == "cluster_existence" and self.start < 1:
            raise ValueError(f"cluster_existence needs start >= 1, got {self.start}")
        if self.kind == "omega_stable":
            if self.window is None:
                raise ValueError("an omega_stable experiment needs a window")
            if self.end_first < self.start + self.window:
                raise ValueError(f"omega_stable needs end_first >= start + window, "
                                 f"got {self.end_first} < {self.start} + {self.window}")
        return self


class Scenario(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(pattern=_NAME_PATTERN)
    description: str = ""
    fleet_size: int = Field(ge=2)
    calibration: Calibration
    experiments: list[Experiment] = Field(min_length=1)

    @field_validator("calibration", mode="before")
    @classmethod
    def _calibration(cls, value):
        return _coerce_calibration(value)

    @model_validator(mode="after")
    def _check_domain(self):
        """Build every domain object once so bad parameters fail at load time."""
        try:
            calibration_link(self.calibration)
            for exp in self.experiments:
                if exp.calibration is not None:
                    calibration_link(exp.calibration)
                if exp.cluster is not None:
                    ClusterSpec(first_car=exp.cluster.first_car, link_count=exp.cluster.link_count,
                                fleet_size=self.fleet_size)
                if exp.kind == "omega_stable":
                    StabilityQuery(start=exp.start, end=exp.end_first, window=exp.window)
        except VanetChainError as exc:
            raise ValueError(str(exc)) from exc
        return self

    def experiment_name(self, index: int) -> str:
        exp = self.experiments[index]
        return exp.name if exp.name else f"{exp.kind}_{index}"


def load_scenario(data: dict) -> Scenario:
    """Validate a raw scenario document."""
    return Scenario.model_validate(data)


def load_builtin(name: str) -> Scenario:
    if name not in BUILTIN_SCENARIOS:
        raise KeyError(name)
    return load_scenario(BUILTIN_SCENARIOS[name])


def builtin_names() -> list[str]:
    return list(BUILTIN_SCENARIOS)


_V60 = {"speed_kmh": 60, "carrier_ghz": 3.9, "symbol_rate": 1e5, "threshold_ratio": 0.1}
_V90 = {"speed_kmh": 90, "carrier_ghz": 3.9, "symbol_rate": 1e5, "threshold_ratio": 0.1}

_THREE_SPEEDS = [("v30", None), ("v60", _V60), ("v90", _V90)]


def _speed_variants(base: dict) -> list[dict]:
    out = []
    for name, cal in _THREE_SPEEDS:
        exp = dict(base)
        exp["name"] = name
        if cal is not None:
            exp["calibration"] = cal
        out.append(exp)
    return out


BUILTIN_SCENARIOS: dict[str, dict] = {
    "paper-sec6": {
        "name": "paper-sec6",
        "description": "Calibration showcase at 30/60/90 km/h: derived f_D, dt, p, q "
                       "plus the analytic link-duration curve for each speed.",
        "fleet_size": 2,
        "calibration": {"speed_kmh": 30, "carrier_ghz": 3.9, "symbol_rate": 1e5,
                        "threshold_ratio": 0.1},
        "experiments": _speed_variants({"kind": "link_duration"}),
    },
    "paper-fig3": {
        "name": "paper-fig3",
        "description": "Link-duration pmf at 30/60/90 km/h, analytic only.",
        "fleet_size": 2,
        "calibration": {"speed_kmh": 30, "carrier_ghz": 3.9, "symbol_rate": 1e5,
                        "threshold_ratio": 0.1},
        "experiments": _speed_variants({"kind": "link_duration"}),
    },
    "paper-fig4": {
        "name": "paper-fig4",
        "description": "Lifetime pmf of the cluster of cars 2-3-4 in a 10-car fleet "
                       "at 30/60/90 km/h, analytic only.",
        "fleet_size": 10,
        "calibration": {"speed_kmh": 30, "carrier_ghz": 3.9, "symbol_rate": 1e5,
                        "threshold_ratio": 0.1},
        "experiments": _speed_variants({"kind": "cluster_lifetime",
                                        "cluster": {"first_car": 2, "link_count": 2}}),
    },
    "paper-fig5": {
        "name": "paper-fig5",
        "description": "Probability that the cluster of cars 2-3-4 lives exactly from "
                       "step 2 to step l, l = 2..30, at 30/60/90 km/h.",
        "fleet_size": 10,
        "calibration": {"speed_kmh": 30, "carrier_ghz": 3.9, "symbol_rate": 1e5,
                        "threshold_ratio": 0.1},
        "experiments": _speed_variants({"kind": "cluster_existence",
                                        "cluster": {"first_car": 2, "link_count": 2},
                                        "start": 2, "end_first": 2, "end_last": 30}),
    },
    "paper-fig6": {
        "name": "paper-fig6",
        "description": "3-stable connection probability from step 2 to step l at "
                       "30 km/h, recurrence vs 50000-trial simulation.",
        "fleet_size": 2,
        "calibration": {"speed_kmh": 30, "carrier_ghz": 3.9, "symbol_rate": 1e5,
                        "threshold_ratio": 0.1},
        "experiments": [
            {"kind": "omega_stable", "name": "stable3", "start": 2, "window": 3,
             "end_first": 5, "end_last": 30, "max_ci_violation_rate": 0.0,
             "simulation": {"trials": 50000, "seed": 16}},
        ],
    },
    "paper-fig7": {
        "name": "paper-fig7",
        "description": "Link-duration pmf at inflated error rates (p=q=0.02, dt=0.01s), "
                       "analytic vs 100000-trial simulation.",
        "fleet_size": 2,
        "calibration": {"p": 0.02, "q": 0.02, "dt_s": 0.01},
        "experiments": [
            {"kind": "link_duration", "name": "duration",
             "simulation": {"trials": 100000, "seed": 5}},
        ],
    },
    "paper-fig8": {
        "name": "paper-fig8",
        "description": "Lifetime pmf of the cluster of cars 2-3-4 in a 10-car fleet at "
                       "p=q=0.02, analytic vs 100000-trial simulation.",
        "fleet_size": 10,
        "calibration": {"p": 0.02, "q": 0.02, "dt_s": 0.01},
        "experiments": [
            {"kind": "cluster_lifetime", "name": "lifetime",
             "cluster": {"first_car": 2, "link_count": 2},
             "simulation": {"trials": 100000, "seed": 5, "horizon": 2000}},
        ],
    },
    "paper-fig9": {
        "name": "paper-fig9",
        "description": "Cluster existence from step 15 to step l, l = 15..30, at "
                       "p=q=0.05, analytic vs 1000000-trial simulation.",
        "fleet_size": 10,
        "calibration": {"p": 0.05, "q": 0.05, "dt_s": 0.01},
        "experiments": [
            {"kind": "cluster_existence", "name": "existence",
             "cluster": {"first_car": 2, "link_count": 2},
             "start": 15, "end_first": 15, "end_last": 30,
             "max_ci_violation_rate": 0.125,
             "simulation": {"trials": 1000000, "seed": 1}},
        ],
    },
}
