"""Closed-form distributions for link and cluster connectivity.

Everything here follows from one fact: with independent Good/Bad links,
any specific configuration of a set of links survives each step with a
fixed probability, so durations are geometric. The quantities covered
are the duration of a single link's Good run, the lifetime of a vehicle
cluster, and the probability that a cluster forms at one timestep and
dies at another.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import MarkovLink
from .errors import BadInterval, DegenerateChain, NonSummable, OutOfRange

DEFAULT_TAIL_TOLERANCE = 1e-9

# masses this small are reported as exact zeros
_UNDERFLOW_FLOOR = 1e-300

_NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class ClusterSpec:
    """A candidate cluster: cars first_car .. first_car + link_count.

    Car indices are 1-based. link_count is the number of internal links,
    so the cluster spans link_count + 1 cars; a lone car is not a cluster.
    """

    first_car: int
    link_count: int
    fleet_size: int

    def __post_init__(self):
        if self.fleet_size < 2:
            raise OutOfRange(f"fleet_size must be at least 2, got {self.fleet_size}")
        if self.first_car < 1:
            raise OutOfRange(f"first_car is 1-based, got {self.first_car}")
        if self.link_count < 1:
            raise OutOfRange(f"link_count must be at least 1, got {self.link_count}")
        if self.first_car + self.link_count > self.fleet_size:
            raise OutOfRange(
                f"cluster of cars {self.first_car}..{self.first_car + self.link_count} "
                f"does not fit a fleet of {self.fleet_size}")

    def gamma(self) -> int:
        """Number of boundary links (0, 1 or 2) the cluster must keep Bad."""
        left = 1 if self.first_car > 1 else 0
        right = 1 if self.first_car + self.link_count < self.fleet_size else 0
        return left + right

    def internal_links(self) -> range:
        """0-based indices of the links inside the cluster (must be Good)."""
        return range(self.first_car - 1, self.first_car - 1 + self.link_count)

    def boundary_links(self) -> tuple[int, ...]:
        """0-based indices of the links at the cluster edges (must be Bad)."""
        links = []
        if self.first_car > 1:
            links.append(self.first_car - 2)
        if self.first_car + self.link_count < self.fleet_size:
            links.append(self.first_car + self.link_count - 1)
        return tuple(links)


@dataclass(frozen=True)
class Pmf:
    """A probability mass function on consecutive integers.

    masses[i] is the mass at support_start + i; tail_mass is the exact
    analytic remainder beyond the last bin. Empirical pmfs additionally
    carry the raw episode counts and their total, so confidence intervals
    can be computed from integers.
    """

    support_start: int
    masses: np.ndarray
    tail_mass: float = 0.0
    counts: np.ndarray | None = None
    total: int | None = None

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float)
        masses.setflags(write=False)
        object.__setattr__(self, "masses", masses)
        if self.counts is not None:
            counts = np.asarray(self.counts, dtype=np.int64)
            counts.setflags(write=False)
            object.__setattr__(self, "counts", counts)
            if len(counts) != len(masses):
                raise OutOfRange("counts and masses must have the same length")
        if masses.size == 0:
            raise OutOfRange("a pmf needs at least one bin")
        if float(masses.min()) < 0.0 or float(masses.max()) > 1.0:
            raise OutOfRange("every mass must lie in [0, 1]")
        if not 0.0 <= self.tail_mass <= 1.0:
            raise OutOfRange(f"tail_mass must lie in [0, 1], got {self.tail_mass}")
        if abs(float(masses.sum()) + self.tail_mass - 1.0) > _NORMALIZATION_TOL:
            raise OutOfRange("masses + tail_mass must sum to 1")

    def __len__(self) -> int:
        return len(self.masses)

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.support_start, self.support_start + len(self.masses))


def gamma_factor(cluster: ClusterSpec) -> int:
    """Boundary-link count of the cluster; see ClusterSpec.gamma."""
    return cluster.gamma()


def geometric_pmf(ratio: float, m: int) -> float:
    """Mass at m >= 1 of the geometric law ratio**(m-1) * (1 - ratio)."""
    if m < 1:
        raise OutOfRange(f"m must be at least 1, got {m}")
    if not 0.0 <= ratio < 1.0:
        raise OutOfRange(f"ratio must lie in [0, 1), got {ratio}")
    mass = (1.0 - ratio) * ratio ** (m - 1)
    return mass if mass >= _UNDERFLOW_FLOOR else 0.0


def geometric_moments(ratio: float, dt: float) -> tuple[float, float]:
    """Mean and variance, in seconds, of dt times a geometric variable."""
    if not dt > 0.0:
        raise OutOfRange(f"dt must be positive, got {dt}")
    if ratio < 0.0:
        raise OutOfRange(f"ratio must be non-negative, got {ratio}")
    if ratio >= 1.0:
        raise DegenerateChain(f"moments are infinite at survival ratio {ratio}")
    survive = 1.0 - ratio
    return dt / survive, ratio * dt * dt / (survive * survive)


def link_duration_pmf(link: MarkovLink, m: int) -> float:
    """Probability an established connection lives exactly m steps."""
    return geometric_pmf(1.0 - link.p, m)


def link_duration_moments(link: MarkovLink) -> tuple[float, float]:
    """Mean dt/p and variance (1-p) dt^2/p^2 of the connection duration."""
    return geometric_moments(1.0 - link.p, link.dt)


def cluster_survival_ratio(link: MarkovLink, cluster: ClusterSpec) -> float:
    """Per-step probability that an existing cluster keeps its exact extent."""
    return (1.0 - link.p) ** cluster.link_count * (1.0 - link.q) ** cluster.gamma()


def cluster_lifetime_pmf(link: MarkovLink, cluster: ClusterSpec, m: int) -> float:
    """Probability a formed cluster exists exactly m steps."""
    return geometric_pmf(cluster_survival_ratio(link, cluster), m)


def cluster_lifetime_moments(link: MarkovLink, cluster: ClusterSpec) -> tuple[float, float]:
    """Mean dt/(1-rho) and variance rho dt^2/(1-rho)^2 of the cluster lifetime."""
    return geometric_moments(cluster_survival_ratio(link, cluster), link.dt)


def stationary_cluster_prob(p_good: float, link_count: int, gamma: int) -> float:
    """Equilibrium probability that one specific cluster configuration holds."""
    if not 0.0 <= p_good <= 1.0:
        raise OutOfRange(f"p_good must lie in [0, 1], got {p_good}")
    if link_count < 1 or gamma < 0:
        raise OutOfRange(f"need link_count >= 1 and gamma >= 0, got {link_count}, {gamma}")
    return p_good ** link_count * (1.0 - p_good) ** gamma


def cluster_formation_prob(link: MarkovLink, cluster: ClusterSpec) -> float:
    """Probability the cluster holds at a timestep but did not at the previous one."""
    rho = cluster_survival_ratio(link, cluster)
    stationary = stationary_cluster_prob(link.p_good, cluster.link_count, cluster.gamma())
    return stationary * (1.0 - rho)


def cluster_existence_prob(link: MarkovLink, cluster: ClusterSpec, m: int, l: int) -> float:
    """Probability the cluster forms at step m and dies right after step l.

    The event is: cluster absent at m-1, present at every step m..l,
    absent again at l+1. Stationarity makes the value depend on l-m only.
    """
    if m < 1:
        raise OutOfRange(f"m must be at least 1, got {m}")
    if l < m:
        raise BadInterval(f"l must be at least m, got m={m}, l={l}")
    rho = cluster_survival_ratio(link, cluster)
    value = cluster_formation_prob(link, cluster) * rho ** (l - m) * (1.0 - rho)
    return value if value >= _UNDERFLOW_FLOOR else 0.0


def truncate_pmf(pmf: Callable[[int], float], ratio: float, *,
                 tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
                 horizon: int | None = None, support_start: int = 1) -> Pmf:
    """Materialize a geometric-family pmf out to an analytic tail bound.

    Parameters
    ----------
    pmf : callable giving the mass at index m.
    ratio : geometric decay of the tail; sizes the truncation and gives
        the exact remaining mass ratio**bins.
    tail_tolerance : emit bins until the tail drops below this.
    horizon : emit exactly this many bins instead.
    """
    if ratio < 0.0:
        raise OutOfRange(f"ratio must be non-negative, got {ratio}")
    if ratio >= 1.0:
        raise NonSummable(f"tail ratio must be below 1, got {ratio}")
    if horizon is None:
        if not 0.0 < tail_tolerance < 1.0:
            raise OutOfRange(f"tail_tolerance must lie in (0, 1), got {tail_tolerance}")
        if ratio == 0.0:
            horizon = 1
        else:
            horizon = math.floor(math.log(tail_tolerance) / math.log(ratio)) + 1
    if horizon < 1:
        raise OutOfRange(f"horizon must be at least 1, got {horizon}")
    masses = np.array([pmf(support_start + i) for i in range(horizon)], dtype=float)
    tail = 0.0 if ratio == 0.0 else ratio ** horizon
    return Pmf(support_start=support_start, masses=masses, tail_mass=tail)


def link_duration_distribution(link: MarkovLink, *, tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
                               horizon: int | None = None) -> Pmf:
    """Truncated pmf of the connection duration in steps."""
    return truncate_pmf(lambda m: link_duration_pmf(link, m), 1.0 - link.p,
                        tail_tolerance=tail_tolerance, horizon=horizon)


def cluster_lifetime_distribution(link: MarkovLink, cluster: ClusterSpec, *,
                                  tail_tolerance: float = DEFAULT_TAIL_TOLERANCE,
                                  horizon: int | None = None) -> Pmf:
    """Truncated pmf of the cluster lifetime in steps."""
    return truncate_pmf(lambda m: cluster_lifetime_pmf(link, cluster, m),
                        cluster_survival_ratio(link, cluster),
                        tail_tolerance=tail_tolerance, horizon=horizon)


def cluster_existence_curve(link: MarkovLink, cluster: ClusterSpec, m: int, ends) -> np.ndarray:
    """cluster_existence_prob evaluated over an iterable of end steps l."""
    return np.array([cluster_existence_prob(link, cluster, m, l) for l in ends], dtype=float)
