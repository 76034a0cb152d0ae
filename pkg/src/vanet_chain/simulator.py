"""Monte Carlo oracle for fleets of independent Good/Bad links.

Each trial draws its uniforms from a counter-based substream keyed by
(seed, trial index), laid out time-major, so a trial's trace is a pure
function of the seed and its index. Estimates aggregate integer episode
counts only; neither chunking nor worker count can change a single bit
of the result.

Duration estimators follow a fixed protocol: per trial (and per link,
for link durations) they record the first episode that both starts and
ends inside the horizon. A run already in progress at step 0 is skipped,
because its start is unobserved, and a trial whose first episode has not
died by the horizon contributes nothing.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .analytics import ClusterSpec, Pmf
from .channel import MarkovLink
from .errors import BadInterval, InsufficientData, OutOfRange
from .stability import StabilityQuery, stable_paths

# per-chunk uniform buffer target; results never depend on it
_CHUNK_TARGET_BYTES = 64 << 20

_MIN_EPISODES = 100


@dataclass(frozen=True)
class SimConfig:
    """One simulation campaign: a fleet of identical links, many trials."""

    fleet_size: int
    link: MarkovLink
    horizon: int
    trials: int
    seed: int

    def __post_init__(self):
        if self.fleet_size < 2:
            raise OutOfRange(f"fleet_size must be at least 2, got {self.fleet_size}")
        if self.horizon < 1:
            raise OutOfRange(f"horizon must be at least 1, got {self.horizon}")
        if self.trials < 1:
            raise OutOfRange(f"trials must be at least 1, got {self.trials}")
        if not 0 <= self.seed < 2 ** 64:
            raise OutOfRange(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def n_links(self) -> int:
        return self.fleet_size - 1


@dataclass(frozen=True)
class SimTrace:
    """One trial's link states, True = Good, shape (n_links, horizon)."""

    states: np.ndarray


@dataclass(frozen=True)
class CurveEstimate:
    """Per-index success counts out of a fixed number of trials."""

    indices: np.ndarray
    counts: np.ndarray
    trials: int

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.trials


def _batch_states(seed: int, first_trial: int, count: int, n_links: int, horizon: int,
                  p: float, q: float, p_good: float) -> np.ndarray:
    """States for trials first_trial..first_trial+count-1, shape (count, horizon, n_links)."""
    u = np.empty((count, horizon, n_links), dtype=np.float64)
    key = np.array([seed, 0], dtype=np.uint64)
    for b in range(count):
        key[1] = first_trial + b
        u[b] = np.random.Generator(np.random.Philox(key=key.copy())).random((horizon, n_links))
    states = np.empty(u.shape, dtype=bool)
    states[:, 0, :] = u[:, 0, :] < p_good
    for t in range(1, horizon):
        prev = states[:, t - 1, :]
        # Good survives unless u < p; Bad recovers when u < q
        states[:, t, :] = np.where(prev, u[:, t, :] >= p, u[:, t, :] < q)
    return states


def _chunk_spans(config: SimConfig) -> list[tuple[int, int]]:
    per_trial = config.horizon * config.n_links * 8
    chunk = max(1, _CHUNK_TARGET_BYTES // per_trial)
    return [(start, min(chunk, config.trials - start)) for start in range(0, config.trials, chunk)]


def _map_chunks(config: SimConfig, worker: Callable, threads: int) -> list:
    """Run worker(first_trial, count) over every chunk, merged in submission order."""
    if threads < 1:
        raise OutOfRange(f"threads must be at least 1, got {threads}")
    spans = _chunk_spans(config)
    if threads == 1 or len(spans) == 1:
        return [worker(start, count) for start, count in spans]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(worker, start, count) for start, count in spans]
        return [f.result() for f in futures]


def _config_states(config: SimConfig, first_trial: int, count: int) -> np.ndarray:
    link = config.link
    return _batch_states(config.seed, first_trial, count, config.n_links, config.horizon,
                         link.p, link.q, link.p_good)


def simulate(config: SimConfig) -> Iterator[SimTrace]:
    """Yield one SimTrace per trial, in trial order."""
    for start, count in _chunk_spans(config):
        states = _config_states(config, start, count)
        for b in range(count):
            yield SimTrace(states=np.ascontiguousarray(states[b].T))


def _first_episode_lengths(states: np.ndarray) -> np.ndarray:
    """First completed Good-run length per (trial, column) of a (B, H, C) block."""
    horizon = states.shape[1]
    if horizon < 3:
        # an episode needs a Bad step, a Good run and a closing Bad step
        return np.empty(0, dtype=np.int64)
    starts = states[:, 1:, :] & ~states[:, :-1, :]
    has_start = starts.any(axis=1)
    t0 = starts.argmax(axis=1) + 1
    timeline = np.arange(horizon)[None, :, None]
    ended = ~states & (timeline > t0[:, None, :])
    has_end = ended.any(axis=1)
    t1 = ended.argmax(axis=1)
    completed = has_start & has_end
    return (t1 - t0)[completed]


def _histogram(lengths: np.ndarray) -> np.ndarray:
    if lengths.size == 0:
        return np.zeros(0, dtype=np.int64)
    return np.bincount(lengths).astype(np.int64)


def _merge_histograms(parts: list[np.ndarray]) -> np.ndarray:
    width = max((len(part) for part in parts), default=0)
    merged = np.zeros(width, dtype=np.int64)
    for part in parts:
        merged[:len(part)] += part
    return merged


def _episode_pmf(counts_from_zero: np.ndarray) -> Pmf:
    counts = counts_from_zero[1:] if len(counts_from_zero) else counts_from_zero
    total = int(counts.sum()) if counts.size else 0
    if total < _MIN_EPISODES:
        raise InsufficientData(f"only {total} completed episodes; need at least {_MIN_EPISODES}. "
                               "Raise trials or the horizon.")
    return Pmf(support_start=1, masses=counts / total, tail_mass=0.0, counts=counts, total=total)


def estimate_link_duration(config: SimConfig, *, threads: int = 1) -> Pmf:
    """Empirical pmf of connection duration, one episode per trial and link."""

    def worker(first_trial: int, count: int) -> np.ndarray:
        return _histogram(_first_episode_lengths(_config_states(config, first_trial, count)))

    return _episode_pmf(_merge_histograms(_map_chunks(config, worker, threads)))


def _cluster_indicator(states: np.ndarray, cluster: ClusterSpec) -> np.ndarray:
    """Per (trial, step) truth of 'this exact cluster holds', from a (B, H, L) block."""
    held = states[:, :, list(cluster.internal_links())].all(axis=2)
    for j in cluster.boundary_links():
        held &= ~states[:, :, j]
    return held


def _check_cluster(config: SimConfig, cluster: ClusterSpec):
    if cluster.fleet_size != config.fleet_size:
        raise OutOfRange(f"cluster fleet_size={cluster.fleet_size} does not match "
                         f"config fleet_size={config.fleet_size}")


def estimate_cluster_lifetime(config: SimConfig, cluster: ClusterSpec, *, threads: int = 1) -> Pmf:
    """Empirical pmf of cluster lifetime, one formation-to-death episode per trial."""
    _check_cluster(config, cluster)

    def worker(first_trial: int, count: int) -> np.ndarray:
        held = _cluster_indicator(_config_states(config, first_trial, count), cluster)
        return _histogram(_first_episode_lengths(held[:, :, None]))

    return _episode_pmf(_merge_histograms(_map_chunks(config, worker, threads)))


def estimate_cluster_existence(config: SimConfig, cluster: ClusterSpec, m: int,
                               ends, *, threads: int = 1) -> CurveEstimate:
    """Per-l frequency of: cluster absent at m-1, present at m..l, absent at l+1."""
    _check_cluster(config, cluster)
    ends = np.asarray(list(ends), dtype=np.int64)
    if m < 1:
        raise OutOfRange(f"m must be at least 1, got {m}")
    if ends.size == 0 or (ends < m).any():
        raise BadInterval(f"every end must be at least m={m}")
    last = int(ends.max())
    if config.horizon < last + 2:
        raise OutOfRange(f"horizon must cover the step after the last end: need {last + 2}, "
                         f"got {config.horizon}")

    def worker(first_trial: int, count: int) -> np.ndarray:
        held = _cluster_indicator(_config_states(config, first_trial, count), cluster)
        fresh = ~held[:, m - 1]
        alive = np.logical_and.accumulate(held[:, m:last + 1], axis=1)
        return np.array([(fresh & alive[:, l - m] & ~held[:, l + 1]).sum() for l in ends],
                        dtype=np.int64)

    counts = sum(_map_chunks(config, worker, threads))
    return CurveEstimate(indices=ends, counts=counts, trials=config.trials)


def estimate_omega_stable_curve(config: SimConfig, start: int, window: int,
                                ends, *, threads: int = 1) -> CurveEstimate:
    """Per-l frequency of omega-stable trajectories of link 0 over start..l."""
    ends = np.asarray(list(ends), dtype=np.int64)
    if ends.size == 0:
        raise BadInterval("ends must not be empty")
    queries = [StabilityQuery(start=start, end=int(l), window=window) for l in ends]
    last = int(ends.max())
    if config.horizon < last + 1:
        raise OutOfRange(f"horizon must reach the last end: need {last + 1}, got {config.horizon}")

    def worker(first_trial: int, count: int) -> np.ndarray:
        states = _config_states(config, first_trial, count)
        paths = states[:, start:last + 1, 0]
        return np.array([stable_paths(paths[:, :query.end - start + 1], window).sum()
                         for query in queries], dtype=np.int64)

    counts = sum(_map_chunks(config, worker, threads))
    return CurveEstimate(indices=ends, counts=counts, trials=config.trials)


def estimate_omega_stable(config: SimConfig, query: StabilityQuery, *, threads: int = 1) -> float:
    """Fraction of trials whose link-0 trajectory over the query span is stable."""
    curve = estimate_omega_stable_curve(config, query.start, query.window, [query.end],
                                        threads=threads)
    return float(curve.counts[0]) / config.trials
