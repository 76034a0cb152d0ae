"""Physical-layer calibration of the two-state link channel.

Maps road parameters (vehicle speed, carrier frequency, symbol rate,
fading threshold) to the per-step transition probabilities of a Good/Bad
Markov link. The reduction goes through the level crossing rate of a
Rayleigh envelope: the rate at which the envelope drops below the
threshold fixes the Good-to-Bad probability per transmitted symbol, and
the stationary Good probability fixes the return rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateChain, NyquistViolation, OutOfRange

LIGHT_SPEED = 2.998e8  # m/s

_EQUILIBRIUM_TOL = 1e-15


def kmh_to_mps(speed_kmh: float) -> float:
    """Convert km/h to m/s."""
    return speed_kmh * (1000.0 / 3600.0)


@dataclass(frozen=True)
class ChannelSpec:
    """Physical inputs from which the link chain is derived.

    speed is in m/s, carrier_freq and symbol_rate in Hz; threshold_ratio
    is the squared fading threshold over the mean squared envelope, so the
    two never need to be known separately.
    """

    speed: float
    carrier_freq: float
    symbol_rate: float
    threshold_ratio: float
    light_speed: float = LIGHT_SPEED

    def __post_init__(self):
        for name in ("speed", "carrier_freq", "symbol_rate", "threshold_ratio", "light_speed"):
            value = getattr(self, name)
            if not value > 0.0:
                raise OutOfRange(f"{name} must be positive, got {value}")

    @classmethod
    def from_road_units(cls, speed_kmh: float, carrier_ghz: float, symbol_rate: float,
                        threshold_ratio: float, light_speed: float = LIGHT_SPEED) -> "ChannelSpec":
        """Build a spec from km/h and GHz, the units scenarios are written in."""
        return cls(speed=kmh_to_mps(speed_kmh), carrier_freq=carrier_ghz * 1e9,
                   symbol_rate=symbol_rate, threshold_ratio=threshold_ratio,
                   light_speed=light_speed)


@dataclass(frozen=True)
class MarkovLink:
    """A calibrated two-state link: Good decays at rate p, Bad at rate q.

    p_good/p_bad are the equilibrium state probabilities. dt is the step
    length in seconds. f_d, when known, records the Doppler shift the
    chain was calibrated at and gates dt against the sampling limit.
    """

    p: float
    q: float
    dt: float
    p_good: float
    p_bad: float
    f_d: float | None = None

    def __post_init__(self):
        for name in ("p", "q"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise OutOfRange(f"{name} must lie in (0, 1), got {value}")
        if not self.dt > 0.0:
            raise OutOfRange(f"dt must be positive, got {self.dt}")
        total = self.p + self.q
        if abs(self.p_good - self.q / total) > _EQUILIBRIUM_TOL:
            raise OutOfRange(f"p_good={self.p_good} is not the equilibrium q/(p+q)")
        if abs(self.p_bad - self.p / total) > _EQUILIBRIUM_TOL:
            raise OutOfRange(f"p_bad={self.p_bad} is not the equilibrium p/(p+q)")
        if self.p_good + self.p_bad != 1.0:
            raise OutOfRange("p_good + p_bad must equal 1 exactly; use MarkovLink.from_rates")
        if self.f_d is not None and self.dt > max_timestep(self.f_d):
            raise NyquistViolation(
                f"dt={self.dt} exceeds the sampling limit 1/(2 f_d)={max_timestep(self.f_d)}")

    @classmethod
    def from_rates(cls, p: float, q: float, dt: float, f_d: float | None = None) -> "MarkovLink":
        """Construct from transition probabilities, normalizing the equilibrium."""
        p_good, p_bad = equilibrium(p, q)
        return cls(p=p, q=q, dt=dt, p_good=p_good, p_bad=p_bad, f_d=f_d)


def doppler_shift(spec: ChannelSpec) -> float:
    """Maximum Doppler shift in Hz: v * f_c / c."""
    return spec.speed * spec.carrier_freq / spec.light_speed


def level_crossing_rate(threshold_ratio: float, f_d: float) -> float:
    """Expected downward threshold crossings per second of a Rayleigh envelope."""
    if not threshold_ratio > 0.0:
        raise OutOfRange(f"threshold_ratio must be positive, got {threshold_ratio}")
    if not f_d > 0.0:
        raise OutOfRange(f"f_d must be positive, got {f_d}")
    r = threshold_ratio
    return math.sqrt(2.0 * math.pi * r) * f_d * math.exp(-r)


def transition_probs(spec: ChannelSpec) -> tuple[float, float]:
    """Per-symbol transition probabilities (p, q) of the Good/Bad chain.

    p is the crossing rate per transmitted symbol given the link is Good;
    the envelope-level factor exp(-r) cancels between the crossing rate
    and the stationary Good probability. q keeps the equilibrium at the
    stationary Rayleigh value exp(-r).
    """
    r = spec.threshold_ratio
    p = math.sqrt(2.0 * math.pi * r) * spec.speed * spec.carrier_freq / (spec.symbol_rate * spec.light_speed)
    q = p * math.exp(-r) / -math.expm1(-r)
    if p >= 1.0:
        raise OutOfRange(f"calibrated p={p} is not a probability; channel parameters are inconsistent")
    if q >= 1.0:
        raise OutOfRange(f"calibrated q={q} is not a probability; channel parameters are inconsistent")
    return p, q


def equilibrium(p: float, q: float) -> tuple[float, float]:
    """Stationary (p_good, p_bad) of the chain; their sum is exactly 1."""
    if p < 0.0 or q < 0.0:
        raise OutOfRange(f"p and q must be non-negative, got p={p}, q={q}")
    if p + q == 0.0:
        raise DegenerateChain("p + q must be positive for a unique equilibrium")
    p_good = q / (p + q)
    return p_good, 1.0 - p_good


def max_timestep(f_d: float) -> float:
    """Longest step that still samples the fading process fast enough: 1/(2 f_d)."""
    if not f_d > 0.0:
        raise OutOfRange(f"f_d must be positive, got {f_d}")
    return 1.0 / (2.0 * f_d)


def default_timestep(f_d: float) -> float:
    """Default step 1/(10 f_d), five times finer than the sampling limit."""
    if not f_d > 0.0:
        raise OutOfRange(f"f_d must be positive, got {f_d}")
    return 1.0 / (10.0 * f_d)


def calibrate(spec: ChannelSpec, dt: float | None = None) -> MarkovLink:
    """Derive the full MarkovLink for a channel spec.

    dt defaults to default_timestep of the derived Doppler shift; an
    explicit dt above the sampling limit raises NyquistViolation.
    """
    f_d = doppler_shift(spec)
    p, q = transition_probs(spec)
    if dt is None:
        dt = default_timestep(f_d)
    return MarkovLink.from_rates(p, q, dt, f_d=f_d)
