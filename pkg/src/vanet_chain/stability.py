"""Probability that a link holds an omega-stable connection over a span.

A trajectory over timesteps start..end is omega-stable when some Good
step occurs no later than start + window, consecutive Good steps are
never more than window apart, and some Good step occurs at end - window
or later. Three evaluators of the same quantity live here: a linear-time
recurrence used in production, a quadratic table build, and an
exhaustive path enumeration. The slower two exist to cross-check the
first and stay usable for degenerate chains (q = 0).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .channel import MarkovLink
from .errors import BadInterval, BadWindow, DegenerateChain, OutOfRange, TooLarge

# enumeration is capped at 2**21 trajectories
_MAX_ENUM_SPAN = 20

_CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class StabilityQuery:
    """An omega-stability question: window size over timesteps start..end."""

    start: int
    end: int
    window: int

    def __post_init__(self):
        for name in ("start", "end", "window"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise BadWindow(f"{name} must be an integer, got {value!r}")
        if self.window < 2:
            raise BadWindow(f"window must be at least 2, got {self.window}")
        if self.start < 0:
            raise OutOfRange(f"start must be non-negative, got {self.start}")
        if self.end < self.start:
            raise BadInterval(f"end must be at least start, got start={self.start}, end={self.end}")

    @property
    def span(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class StabilityTables:
    """The two arrays behind the linear recurrence.

    f[i] is the probability of a stable-so-far trajectory whose latest
    Good step is exactly start + i; g[i] is the probability of no Good
    step at all through start + i (zero once i reaches the window).
    Both are indexed from the query start: f covers start..end+1 and
    g covers start..end.
    """

    start: int
    f: np.ndarray
    g: np.ndarray


def stable_paths(paths: np.ndarray, window: int) -> np.ndarray:
    """Mask of rows (trajectories over start..end, True = Good) that are stable.

    This is the predicate shared by the enumeration oracle and the
    Monte Carlo estimator: first Good within window steps of the start,
    gaps between consecutive Goods at most window, last Good within
    window steps of the end.
    """
    paths = np.asarray(paths, dtype=bool)
    if paths.ndim != 2 or paths.shape[1] < 1:
        raise OutOfRange("paths must be a (rows, steps) matrix with at least one step")
    rows, steps = paths.shape
    any_good = paths.any(axis=1)
    first = paths.argmax(axis=1)
    last = steps - 1 - paths[:, ::-1].argmax(axis=1)
    last_seen = np.full(rows, -1, dtype=np.int64)
    max_gap = np.zeros(rows, dtype=np.int64)
    for t in range(steps):
        good = paths[:, t]
        gap = np.where(good & (last_seen >= 0), t - last_seen, 0)
        np.maximum(max_gap, gap, out=max_gap)
        last_seen = np.where(good, t, last_seen)
    return any_good & (first <= window) & (last >= steps - 1 - window) & (max_gap <= window)


def _seed_g(p_bad: float, q: float, span: int, window: int) -> np.ndarray:
    """g over offsets 0..span: still-no-connection probability, cut at the window."""
    g = np.zeros(span + 1, dtype=float)
    limit = min(window, span + 1)
    g[:limit] = p_bad * (1.0 - q) ** np.arange(limit)
    return g


def _linear(p: float, q: float, p_good: float, query: StabilityQuery) -> tuple[StabilityTables, float]:
    if q == 0.0:
        raise DegenerateChain("the linear recurrence divides by q; use the quadratic form for q = 0")
    m, l, w = query.start, query.end, query.window
    if l < m + w:
        raise BadInterval(f"linear recurrence needs end >= start + window, got span {l - m} < {w}")
    span = l - m
    g = _seed_g(1.0 - p_good, q, span, w)
    f = np.empty(span + 2, dtype=float)
    f[0] = f[1] = p_good
    decay = (1.0 - q) ** (w - 1) * p * q
    for a in range(2, span + 2):
        # a is the offset from the start; g beyond the stored range is zero
        value = (f[a - 1] * (2.0 - p - q) - f[a - 2] * (1.0 - p - q)
                 + g[a - 1] * q - g[a - 2] * q * (1.0 - q))
        if a - w - 1 >= 0:
            value -= f[a - w - 1] * decay
        f[a] = value
    tables = StabilityTables(start=m, f=f, g=g)
    prob = (f[span + 1] - f[span] * (1.0 - p - q) + f[span - w] * decay - g[span] * q) / q
    return tables, _clamp(prob)


def _clamp(prob: float) -> float:
    if prob < 0.0 or prob > 1.0:
        if prob < -_CLAMP_TOL or prob > 1.0 + _CLAMP_TOL:
            raise OutOfRange(f"recurrence produced {prob}, outside [0, 1] beyond rounding slack")
        warnings.warn(f"clamping probability {prob} to [0, 1]", stacklevel=3)
        prob = min(max(prob, 0.0), 1.0)
    return prob


def _h_table(p: float, q: float, p_good: float, query: StabilityQuery) -> np.ndarray:
    """Full table h[i, j]: stable so far through offset i, latest Good at offset j."""
    m, l, w = query.start, query.end, query.window
    steps = l - m + 1
    g = _seed_g(1.0 - p_good, q, l - m, w)
    h = np.zeros((steps, steps), dtype=float)
    h[0, 0] = p_good
    for i in range(1, steps):
        lo = max(0, i - w)
        # Good again at i: continue a run, rejoin within the window, or connect first
        rejoin = h[i - 1, lo:i - 1].sum()
        h[i, i] = (1.0 - p) * h[i - 1, i - 1] + q * rejoin + q * g[i - 1]
        h[i, i - 1] = p * h[i - 1, i - 1]
        if lo < i - 1:
            h[i, lo:i - 1] = (1.0 - q) * h[i - 1, lo:i - 1]
    return h


def omega_stable_prob(link: MarkovLink, query: StabilityQuery) -> float:
    """Probability of an omega-stable connection, by the linear recurrence.

    Runs in O(end - start) time and memory. Requires q > 0 and
    end >= start + window; the quadratic form covers the rest.
    """
    return _linear(link.p, link.q, link.p_good, query)[1]


def omega_stable_tables(link: MarkovLink, query: StabilityQuery) -> StabilityTables:
    """The f and g arrays the linear recurrence builds for this query."""
    return _linear(link.p, link.q, link.p_good, query)[0]


def _quadratic(p: float, q: float, p_good: float, query: StabilityQuery) -> float:
    h = _h_table(p, q, p_good, query)
    steps = h.shape[0]
    lo = max(0, steps - 1 - query.window)
    return _clamp(float(h[steps - 1, lo:].sum()))


def omega_stable_prob_quadratic(link: MarkovLink, query: StabilityQuery) -> float:
    """Same probability from the full quadratic table; valid for any end >= start."""
    return _quadratic(link.p, link.q, link.p_good, query)


def _enumerate(p: float, q: float, p_good: float, query: StabilityQuery) -> float:
    span = query.span
    if span > _MAX_ENUM_SPAN:
        raise TooLarge(f"enumeration over {span + 1} steps needs 2**{span + 1} trajectories; "
                       f"the cap is 2**{_MAX_ENUM_SPAN + 1}")
    steps = span + 1
    ids = np.arange(1 << steps, dtype=np.uint32)
    paths = ((ids[:, None] >> np.arange(steps, dtype=np.uint32)[None, :]) & 1).astype(bool)
    weights = np.where(paths[:, 0], p_good, 1.0 - p_good)
    for t in range(1, steps):
        prev, cur = paths[:, t - 1], paths[:, t]
        weights = weights * np.where(prev, np.where(cur, 1.0 - p, p), np.where(cur, q, 1.0 - q))
    mask = stable_paths(paths, query.window)
    return float(weights[mask].sum())


def omega_stable_enumerate(link: MarkovLink, query: StabilityQuery) -> float:
    """Same probability by summing every trajectory; spans above 20 are refused."""
    return _enumerate(link.p, link.q, link.p_good, query)
