"""Independent reference computations backing the test suite.

Nothing in this module calls the closed forms under test. Probabilities
come from raw transition structure (exhaustive trajectory enumeration,
joint-state sums, stationary distributions solved as linear systems),
moments from direct series summation, and the fading physics from a
synthesized Rayleigh envelope. Slow and obvious on purpose.
"""

from __future__ import annotations

import math

import numpy as np

# state encoding used throughout: 1 = Good, 0 = Bad


def transition_matrix(p: float, q: float) -> np.ndarray:
    """Row-stochastic 2x2 matrix indexed [from][to] with 1 = Good."""
    return np.array([[1.0 - q, q], [p, 1.0 - p]])


def stationary(p: float, q: float) -> float:
    """P(Good) at equilibrium, from the balance equations, not a formula."""
    m = transition_matrix(p, q)
    a = np.vstack([(m.T - np.eye(2)), np.ones((1, 2))])
    b = np.array([0.0, 0.0, 1.0])
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    return float(pi[1])


def duration_pmf_enum(p: float, q: float, m: int) -> float:
    """P(an established Good run lasts exactly m steps) by path enumeration.

    Enumerates every continuation of length m after the establishing
    step and keeps those that stay Good m-1 more steps and then leave.
    """
    trans = transition_matrix(p, q)
    total = 0.0
    for path_id in range(1 << m):
        bits = [(path_id >> t) & 1 for t in range(m)]
        states = [1] + bits
        first_bad = next((t for t, s in enumerate(states) if s == 0), None)
        if first_bad != m:
            continue
        prob = 1.0
        for a, b in zip(states[:-1], states[1:]):
            prob *= trans[a][b]
        total += prob
    return total


def _cluster_pattern(s: int, gamma: int) -> list:
    """Joint link states meaning 'the cluster holds its exact extent'."""
    return [1] * s + [0] * gamma


def _joint_states(chains: int):
    for state_id in range(1 << chains):
        yield [(state_id >> c) & 1 for c in range(chains)]


def formation_enum(p: float, q: float, s: int, gamma: int) -> float:
    """P(cluster exists now, did not one step ago), summed over all joint states."""
    trans = transition_matrix(p, q)
    pi = [1.0 - stationary(p, q), stationary(p, q)]
    pattern = _cluster_pattern(s, gamma)
    total = 0.0
    for prev in _joint_states(s + gamma):
        if prev == pattern:
            continue
        weight = 1.0
        for c, state in enumerate(prev):
            weight *= pi[state] * trans[state][pattern[c]]
        total += weight
    return total


def lifetime_pmf_enum(p: float, q: float, s: int, gamma: int, m: int) -> float:
    """P(a formed cluster lives exactly m steps) by joint-path enumeration."""
    trans = transition_matrix(p, q)
    chains = s + gamma
    pattern = _cluster_pattern(s, gamma)
    total = 0.0
    for path_id in range(1 << (chains * m)):
        states = [pattern]
        for t in range(m):
            states.append([(path_id >> (t * chains + c)) & 1 for c in range(chains)])
        if any(states[t] != pattern for t in range(1, m)) or states[m] == pattern:
            continue
        prob = 1.0
        for prev, cur in zip(states[:-1], states[1:]):
            for a, b in zip(prev, cur):
                prob *= trans[a][b]
        total += prob
    return total


def existence_enum_grid(pairs, s: int, gamma: int, span: int,
                        chunk: int = 1 << 20) -> list[tuple[float, float]]:
    """Exhaustive trajectory enumeration of the cluster-existence event.

    Enumerates every joint Good/Bad trajectory of the s+gamma relevant
    links over the window [m-1, l] (span = l-m), weighting each by the
    equilibrium start and per-step transition probabilities. The event
    keeps trajectories with no cluster at m-1 and the cluster at every
    step m..l; the final death step is the enumerated one-step
    probability of leaving the cluster pattern. Returns one (event
    probability, total mass over all trajectories) per (p, q) pair - the
    mass must be 1 and validates the machinery itself. The transition
    counts per trajectory do not depend on (p, q), so evaluating a grid
    of pairs in one sweep costs one enumeration, not len(pairs).
    """
    chains = s + gamma
    steps = span + 2
    bits = chains * steps
    if bits > 26:
        raise ValueError(f"enumeration over {bits} bits is too large")
    pattern = _cluster_pattern(s, gamma)
    max_transitions = chains * (steps - 1)

    tables = []
    for p, q in pairs:
        trans = transition_matrix(p, q)
        pi_good = stationary(p, q)
        death = 1.0
        for c in range(chains):
            death *= trans[pattern[c]][pattern[c]]
        tables.append((pi_good ** np.arange(chains + 1),
                       (1.0 - pi_good) ** np.arange(chains + 1),
                       trans[1][1] ** np.arange(max_transitions + 1),
                       trans[1][0] ** np.arange(max_transitions + 1),
                       trans[0][1] ** np.arange(max_transitions + 1),
                       trans[0][0] ** np.arange(max_transitions + 1),
                       1.0 - death))

    total_mass = [0.0 for _ in pairs]
    event_terms = [[] for _ in pairs]
    for lo in range(0, 1 << bits, chunk):
        ids = np.arange(lo, min(lo + chunk, 1 << bits), dtype=np.uint32)
        state = np.empty((chains, steps, len(ids)), dtype=np.uint8)
        for c in range(chains):
            for t in range(steps):
                state[c, t] = (ids >> np.uint32(c * steps + t)) & np.uint32(1)

        init_good = state[:, 0, :].sum(axis=0, dtype=np.int64)
        prev = state[:, :-1, :]
        cur = state[:, 1:, :]
        n_gg = (prev & cur).sum(axis=(0, 1), dtype=np.int64)
        n_gb = (prev & (1 - cur)).sum(axis=(0, 1), dtype=np.int64)
        n_bg = ((1 - prev) & cur).sum(axis=(0, 1), dtype=np.int64)
        n_bb = ((1 - prev) & (1 - cur)).sum(axis=(0, 1), dtype=np.int64)

        held = np.ones(len(ids), dtype=bool)
        for c in range(chains):
            for t in range(1, steps):
                held &= state[c, t] == pattern[c]
        start_clear = np.zeros(len(ids), dtype=bool)
        for c in range(chains):
            start_clear |= state[c, 0] != pattern[c]
        keep = held & start_clear

        for i, (init_g, init_b, gg, gb, bg, bb, _) in enumerate(tables):
            prob = (init_g[init_good] * init_b[chains - init_good]
                    * gg[n_gg] * gb[n_gb] * bg[n_bg] * bb[n_bb])
            total_mass[i] += float(prob.sum())
            event_terms[i].extend(prob[keep].tolist())

    return [(math.fsum(terms) * tables[i][6], total_mass[i])
            for i, terms in enumerate(event_terms)]


def existence_enum(p: float, q: float, s: int, gamma: int, span: int,
                   chunk: int = 1 << 20) -> tuple[float, float]:
    """Single-pair wrapper around existence_enum_grid."""
    return existence_enum_grid([(p, q)], s, gamma, span, chunk)[0]


def stable_reference(states, window: int) -> bool:
    """Plain restatement of the stability predicate on one Good/Bad sequence."""
    goods = [t for t, s in enumerate(states) if s]
    if not goods:
        return False
    if goods[0] > window:
        return False
    if goods[-1] < len(states) - 1 - window:
        return False
    return all(b - a <= window for a, b in zip(goods[:-1], goods[1:]))


def series_moments(masses, support_start: int, dt: float) -> tuple[float, float]:
    """Mean and variance in seconds by direct summation of a truncated pmf."""
    terms_m = [(support_start + i) * float(v) for i, v in enumerate(masses)]
    terms_m2 = [(support_start + i) ** 2 * float(v) for i, v in enumerate(masses)]
    mean_steps = math.fsum(terms_m)
    second = math.fsum(terms_m2)
    return mean_steps * dt, (second - mean_steps ** 2) * dt * dt


def rayleigh_level_stats(f_d: float, threshold_ratio: float, *, duration_s: float,
                         samples_per_cycle: int = 32, seed: int = 0) -> tuple[float, float]:
    """Synthesize a Rayleigh envelope with the classic U-shaped Doppler
    spectrum and measure it directly.

    Frequency-domain synthesis: each FFT bin gets an independent complex
    Gaussian scaled by the exact integral of the normalized spectrum
    over that bin (the integral of 1/(pi sqrt(f_d^2-f^2)) is
    arcsin(f/f_d)/pi, so the band edges need no special casing).
    Returns (downward crossings of the threshold per second, fraction of
    time spent above the threshold).
    """
    fs = samples_per_cycle * f_d
    n = int(round(duration_s * fs))
    rng = np.random.default_rng(seed)
    freqs = np.fft.fftfreq(n, d=1.0 / fs)
    df = fs / n
    lo = np.clip((freqs - df / 2) / f_d, -1.0, 1.0)
    hi = np.clip((freqs + df / 2) / f_d, -1.0, 1.0)
    amp = np.sqrt((np.arcsin(hi) - np.arcsin(lo)) / np.pi)
    spectrum = amp * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    envelope = np.abs(np.fft.ifft(spectrum))
    level = math.sqrt(threshold_ratio * float(np.mean(envelope ** 2)))
    down = int(np.count_nonzero((envelope[:-1] >= level) & (envelope[1:] < level)))
    above = float(np.mean(envelope >= level))
    return down / duration_s, above
