"""Execute a scenario end to end and assemble a JSON-friendly result.

The runner calibrates each experiment's chain, evaluates the analytic
quantity, optionally runs the Monte Carlo estimator, and compares the
two. The returned payload contains every number needed to rebuild the
CSV outputs byte for byte, so it can travel over HTTP unchanged.
"""

from __future__ import annotations

import math
import os

import numpy as np

from . import __version__
from .analytics import (ClusterSpec, cluster_existence_curve, cluster_lifetime_distribution,
                        cluster_lifetime_moments, cluster_survival_ratio,
                        link_duration_distribution, link_duration_moments)
from .channel import MarkovLink
from .errors import OutOfRange
from .scenarios import Experiment, Scenario, calibration_link
from .simulator import (SimConfig, estimate_cluster_existence, estimate_cluster_lifetime,
                        estimate_link_duration, estimate_omega_stable_curve)
from .stability import StabilityQuery, omega_stable_prob
from .stats import compare_curve, compare_pmf, empirical_mean

SEED_ENV_VAR = "VANET_CHAIN_SEED"


def resolve_seed(override: int | None, block_seed: int | None) -> int:
    """Seed precedence: explicit override, scenario value, environment, zero."""
    if override is not None:
        return override
    if block_seed is not None:
        return block_seed
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is not None and raw.strip():
        try:
            return int(raw)
        except ValueError:
            raise OutOfRange(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None
    return 0


def _calibration_payload(link: MarkovLink) -> dict:
    return {"p": link.p, "q": link.q, "dt_s": link.dt,
            "p_good": link.p_good, "f_d_hz": link.f_d}


def _sim_config(scenario: Scenario, exp: Experiment, link: MarkovLink,
                default_horizon: int, seed: int | None, trials: int | None) -> SimConfig:
    block = exp.simulation
    return SimConfig(fleet_size=scenario.fleet_size, link=link,
                     horizon=block.horizon if block.horizon is not None else default_horizon,
                     trials=trials if trials is not None else block.trials,
                     seed=resolve_seed(seed, block.seed))


def _duration_payload(exp, link, analytic_fn, moments, estimate_fn, config, threads):
    """Shared path for the two duration-style experiments (pmf over m = 1, 2, ...)."""
    out: dict = {"support_start": 1}
    pmf = analytic_fn(link, tail_tolerance=exp.tail_tolerance)
    if config is not None:
        est = estimate_fn(config, threads=threads)
        if len(est.masses) > len(pmf.masses):
            pmf = analytic_fn(link, tail_tolerance=exp.tail_tolerance, horizon=len(est.masses))
        report = compare_pmf(pmf, est, mass_floor=exp.mass_floor)
        mean_s, _ = moments(link)
        emp_mean, emp_err = empirical_mean(est, link.dt)
        out["counts"] = [int(c) for c in est.counts]
        out["episodes"] = est.total
        out["report"] = report.to_dict()
        out["mean_check"] = {"analytic_s": mean_s, "empirical_s": emp_mean,
                             "stderr_s": emp_err,
                             "rel_error": abs(emp_mean - mean_s) / mean_s}
    out["analytic"] = [float(v) for v in pmf.masses]
    out["analytic_tail"] = pmf.tail_mass
    return out


def _curve_payload(exp, analytic, counts, trials):
    out = {"support_start": exp.end_first,
           "analytic": [float(v) for v in analytic],
           "analytic_tail": None}
    if counts is not None:
        report = compare_curve(np.asarray(analytic), counts, trials, mass_floor=exp.mass_floor)
        out["counts"] = [int(c) for c in counts]
        out["episodes"] = trials
        out["report"] = report.to_dict()
    return out


def _run_experiment(scenario: Scenario, index: int, *, seed, trials, threads) -> dict:
    exp = scenario.experiments[index]
    link = calibration_link(exp.calibration) if exp.calibration else calibration_link(scenario.calibration)
    params: dict = {}
    config = None

    if exp.kind == "link_duration":
        if exp.simulation is not None:
            config = _sim_config(scenario, exp, link, math.ceil(50.0 / link.p), seed, trials)
        data = _duration_payload(exp, link, link_duration_distribution, link_duration_moments,
                                 estimate_link_duration, config, threads)

    elif exp.kind == "cluster_lifetime":
        cluster = ClusterSpec(exp.cluster.first_car, exp.cluster.link_count, scenario.fleet_size)
        params = {"first_car": cluster.first_car, "link_count": cluster.link_count,
                  "gamma": cluster.gamma()}
        rho = cluster_survival_ratio(link, cluster)
        if exp.simulation is not None:
            config = _sim_config(scenario, exp, link, math.ceil(50.0 / (1.0 - rho)), seed, trials)

        def analytic_fn(lk, *, tail_tolerance, horizon=None):
            return cluster_lifetime_distribution(lk, cluster, tail_tolerance=tail_tolerance,
                                                 horizon=horizon)

        def moments_fn(lk):
            return cluster_lifetime_moments(lk, cluster)

        def estimate_fn(cfg, *, threads):
            return estimate_cluster_lifetime(cfg, cluster, threads=threads)

        data = _duration_payload(exp, link, analytic_fn, moments_fn, estimate_fn, config, threads)

    elif exp.kind == "cluster_existence":
        cluster = ClusterSpec(exp.cluster.first_car, exp.cluster.link_count, scenario.fleet_size)
        ends = list(range(exp.end_first, exp.end_last + 1))
        params = {"first_car": cluster.first_car, "link_count": cluster.link_count,
                  "gamma": cluster.gamma(), "start": exp.start,
                  "end_first": exp.end_first, "end_last": exp.end_last}
        analytic = cluster_existence_curve(link, cluster, exp.start, ends)
        counts = None
        if exp.simulation is not None:
            config = _sim_config(scenario, exp, link, exp.end_last + 2, seed, trials)
            counts = estimate_cluster_existence(config, cluster, exp.start, ends,
                                                threads=threads).counts
        data = _curve_payload(exp, analytic, counts, config.trials if config else None)

    else:  # omega_stable
        ends = list(range(exp.end_first, exp.end_last + 1))
        params = {"start": exp.start, "window": exp.window,
                  "end_first": exp.end_first, "end_last": exp.end_last}
        analytic = [omega_stable_prob(link, StabilityQuery(exp.start, end, exp.window))
                    for end in ends]
        counts = None
        if exp.simulation is not None:
            config = _sim_config(scenario, exp, link, exp.end_last + 1, seed, trials)
            counts = estimate_omega_stable_curve(config, exp.start, exp.window, ends,
                                                 threads=threads).counts
        data = _curve_payload(exp, analytic, counts, config.trials if config else None)

    report = data.get("report")
    passed = report is None or report["floor_ci_violations"] <= exp.max_ci_violation_rate * report["floor_bins"]
    result = {"name": scenario.experiment_name(index), "kind": exp.kind,
              "calibration": _calibration_payload(link), "params": params,
              "simulation": None, "passed": passed,
              "max_ci_violation_rate": exp.max_ci_violation_rate}
    if config is not None:
        result["simulation"] = {"trials": config.trials, "seed": config.seed,
                                "horizon": config.horizon}
    result.update(data)
    return result


def _manifest(scenario: Scenario, experiments: list[dict]) -> dict:
    entries = []
    for exp in experiments:
        outputs = [f"{exp['name']}_analytic.csv"]
        if exp.get("counts") is not None:
            outputs += [f"{exp['name']}_empirical.csv", f"{exp['name']}_report.json"]
        entries.append({"name": exp["name"], "kind": exp["kind"],
                        "calibration": exp["calibration"], "params": exp["params"],
                        "simulation": exp["simulation"], "outputs": outputs})
    return {"tool": "vanet-chain", "version": __version__, "scenario": scenario.name,
            "description": scenario.description, "fleet_size": scenario.fleet_size,
            "experiments": entries}


def run_scenario(scenario: Scenario, *, seed: int | None = None, trials: int | None = None,
                 threads: int = 1) -> dict:
    """Run every experiment; overrides replace each experiment's own values."""
    experiments = [_run_experiment(scenario, i, seed=seed, trials=trials, threads=threads)
                   for i in range(len(scenario.experiments))]
    return {"scenario": scenario.name, "version": __version__,
            "passed": all(e["passed"] for e in experiments),
            "experiments": experiments,
            "manifest": _manifest(scenario, experiments)}
