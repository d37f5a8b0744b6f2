"""Seeded ensemble execution and empirical change-threshold estimation.

Run ``r`` of an ensemble uses the seed ``splitmix64(master_seed, r)``, so any
single run can be replayed in isolation and results are independent of how
runs are scheduled across workers.  Change detection defaults to reaching
exact consensus; logit runs instead use a sustained-threshold criterion
(``zeta >= 0.95`` for 50 consecutive steps) because their consensus states
are not absorbing.
"""

from __future__ import annotations

import csv
import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import SimulationConfig, Trajectory, simulate
from .errors import DomainError

__all__ = [
    "derive_seed",
    "EnsembleResult",
    "run_ensemble",
    "ThresholdEstimate",
    "estimate_change_threshold",
    "write_ensemble_csv",
    "write_ensemble_summary",
]

_MASK64 = (1 << 64) - 1

LOGIT_CHANGE_ZETA = 0.95
LOGIT_CHANGE_SUSTAIN = 50


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit splitmix mix of (master seed, run index)."""
    z = (master_seed * 0x9E3779B97F4A7C15 + index + 1) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _change_time(traj: Trajectory, change_zeta: float, sustain: int) -> int | None:
    """First step from which zeta stays at or above the criterion for
    ``sustain`` consecutive recorded steps (absorbed runs hold their final
    value, so their last block counts as sustained forever)."""
    z = traj.zeta
    above = z >= change_zeta - 1e-15
    run = 0
    for t, flag in enumerate(above):
        run = run + 1 if flag else 0
        if run >= sustain:
            return t - sustain + 1
    if traj.absorbed_at is not None and above[-1]:
        start = len(above) - 1
        while start > 0 and above[start - 1]:
            start -= 1
        return start
    return None


@dataclass
class EnsembleResult:
    """Per-time envelope and change statistics of a seeded ensemble."""

    runs: int
    master_seed: int
    seeds: tuple[int, ...]
    t: np.ndarray
    q025: np.ndarray
    q500: np.ndarray
    q975: np.ndarray
    mean_zeta: np.ndarray
    change_probability: float
    mean_absorption_time: float | None
    changed: tuple[bool, ...]


def _resolve_change_criterion(config, change_zeta, change_sustain):
    if change_zeta is None:
        change_zeta = LOGIT_CHANGE_ZETA if config.revision.protocol == "logit" else 1.0
    if change_sustain is None:
        change_sustain = LOGIT_CHANGE_SUSTAIN if config.revision.protocol == "logit" else 1
    return change_zeta, change_sustain


def run_ensemble(
    config: SimulationConfig,
    runs: int,
    master_seed: int,
    threads: int = 1,
    change_zeta: float | None = None,
    change_sustain: int | None = None,
) -> EnsembleResult:
    """Execute ``runs`` independent seeded trajectories and pool statistics.

    Quantiles are computed per time step with linear interpolation after
    extending absorbed trajectories by their constant final value.  The
    result is bit-identical for a fixed (config, master_seed, runs) no matter
    how many workers execute it.
    """
    if runs < 1:
        raise DomainError("ensembles need at least one run")
    change_zeta, change_sustain = _resolve_change_criterion(config, change_zeta, change_sustain)
    seeds = tuple(derive_seed(master_seed, r) for r in range(runs))
    configs = [replace(config, seed=s) for s in seeds]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trajectories = list(pool.map(simulate, configs))
    else:
        trajectories = [simulate(c) for c in configs]

    horizon = max(len(tr.zeta) for tr in trajectories)
    stack = np.empty((runs, horizon))
    for r, tr in enumerate(trajectories):
        stack[r, : len(tr.zeta)] = tr.zeta
        stack[r, len(tr.zeta):] = tr.zeta[-1]

    q = np.quantile(stack, [0.025, 0.5, 0.975], axis=0)
    change_times = [_change_time(tr, change_zeta, change_sustain) for tr in trajectories]
    changed = tuple(ct is not None for ct in change_times)
    hits = [ct for ct in change_times if ct is not None]
    return EnsembleResult(
        runs=runs,
        master_seed=master_seed,
        seeds=seeds,
        t=np.arange(horizon),
        q025=q[0],
        q500=q[1],
        q975=q[2],
        mean_zeta=stack.mean(axis=0),
        change_probability=len(hits) / runs,
        mean_absorption_time=float(np.mean(hits)) if hits else None,
        changed=changed,
    )


@dataclass
class ThresholdEstimate:
    """Bisection estimate of the initial adopter fraction needed for change.

    ``threshold`` is None when the probed frequencies were non-monotone
    beyond noise; the bracket and probe list are always reported.
    """

    threshold: float | None
    lo: float
    hi: float
    freq_se: float
    probes: tuple[tuple[float, float], ...]
    monotone: bool


def _probe_config(template: SimulationConfig, zeta0: float, adopters: str) -> SimulationConfig:
    if adopters == "free":
        return replace(template, zeta0=zeta0, committed_nodes=())
    if adopters == "committed":
        n = template.population_size()
        count = int(round(zeta0 * n))
        return replace(template, zeta0=zeta0, committed_nodes=tuple(range(count)))
    raise DomainError(f"unknown adopter mode {adopters!r}")


def estimate_change_threshold(
    template: SimulationConfig,
    runs_per_probe: int,
    tol: float,
    master_seed: int,
    adopters: str = "free",
    threads: int = 1,
) -> ThresholdEstimate:
    """Bisect the initial adopter fraction for 50% empirical change frequency.

    ``adopters`` selects whether probed fractions enter as free agents (they
    can revise away immediately) or as a committed minority.  Frequencies are
    checked for monotonicity in the probe fraction with a 3-sigma binomial
    slack; violations raise a warning and suppress the point estimate.
    """
    if runs_per_probe < 1:
        raise DomainError("need at least one run per probe")
    if tol <= 0:
        raise DomainError("tol must be positive")
    probes: list[tuple[float, float]] = []
    lo, hi = 0.0, 1.0
    probe_idx = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        cfg = _probe_config(template, mid, adopters)
        res = run_ensemble(cfg, runs_per_probe, derive_seed(master_seed, probe_idx), threads)
        probes.append((mid, res.change_probability))
        probe_idx += 1
        if res.change_probability >= 0.5:
            hi = mid
        else:
            lo = mid

    freq_se = float(np.sqrt(0.25 / runs_per_probe))
    ordered = sorted(probes)
    monotone = True
    for (z0, f0), (z1, f1) in zip(ordered, ordered[1:]):
        slack = 3.0 * np.sqrt(f0 * (1 - f0) / runs_per_probe + f1 * (1 - f1) / runs_per_probe)
        if f1 < f0 - slack:
            monotone = False
    if not monotone:
        warnings.warn(
            "change frequency is non-monotone in the initial adopter fraction "
            "beyond binomial noise; reporting the bracket only",
            stacklevel=2,
        )
    return ThresholdEstimate(
        threshold=0.5 * (lo + hi) if monotone else None,
        lo=lo,
        hi=hi,
        freq_se=freq_se,
        probes=tuple(probes),
        monotone=monotone,
    )


def write_ensemble_csv(result: EnsembleResult, path):
    with open(str(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "q025", "q500", "q975", "mean_zeta"])
        for i in range(len(result.t)):
            w.writerow([
                int(result.t[i]),
                repr(float(result.q025[i])),
                repr(float(result.q500[i])),
                repr(float(result.q975[i])),
                repr(float(result.mean_zeta[i])),
            ])


def write_ensemble_summary(result: EnsembleResult, path, meta: dict | None = None):
    payload = {
        "runs": result.runs,
        "master_seed": result.master_seed,
        "seeds": list(result.seeds),
        "change_probability": result.change_probability,
        "mean_absorption_time": result.mean_absorption_time,
        "changed": list(result.changed),
    }
    if meta:
        payload.update(meta)
    with open(str(path), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
