"""Revision dynamics: best response, logit, and trend-mixed protocols.

The engine advances a :class:`~cdsim.games.PopulationState` under a
:class:`RevisionSpec`.  Static-network protocols (best response, logit) read
the influence graph; the trend-mixed protocol replaces the graph with fresh
activity-driven contacts every step and lets each agent copy the direction of
change of the adopter fraction with probability ``u_t`` instead of
best-responding.  Committed agents never revise.

Replay is deterministic: a trajectory is a pure function of (config, seed),
independent of worker counts or the kernel backend.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from . import _backend
from .errors import ConfigError, DomainError
from .games import (
    CoevolutionParams,
    CoordinationParams,
    MatrixGame,
    PggParams,
    PopulationState,
    coordination_matrix,
)
from .graph import Graph
from .tempnet import ContactParams, sample_contacts_uniform, sample_contacts_visibility

__all__ = [
    "RevisionSpec",
    "Trajectory",
    "SimulationConfig",
    "payoff_gap",
    "step_best_response_coordination",
    "step_best_response",
    "step_logit",
    "logit_plus_probability",
    "step_trend_mixed",
    "build_initial_state",
    "simulate",
    "write_trajectory_csv",
]

_TIE_TOL = 1e-12
_Y_FIXED_POINT_TOL = 1e-10

PROTOCOLS = ("best_response", "logit", "trend_mixed")
SCHEDULES = ("synchronous", "async_uniform", "fixed_sequence")
TIE_RULES = ("keep", "prefer_plus", "uniform")


@dataclass(frozen=True)
class RevisionSpec:
    """Revision protocol plus activation schedule.

    ``sigma`` is the logit rationality (scalar or per-agent); ``u_t`` the
    trend sensitivity; ``logit_printed_sign`` flips the exponent to
    ``exp(-sigma f)`` for sensitivity checks (the default positive sign makes
    ``sigma -> inf`` recover best response).
    """

    protocol: str
    schedule: str = "synchronous"
    sigma: float | np.ndarray = 1.0
    u_t: float = 0.0
    tie_rule: str = "keep"
    logit_printed_sign: bool = False

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}")
        if self.schedule not in SCHEDULES:
            raise ConfigError(f"unknown schedule {self.schedule!r}")
        if self.tie_rule not in TIE_RULES:
            raise ConfigError(f"unknown tie rule {self.tie_rule!r}")
        if not 0.0 <= self.u_t <= 1.0:
            raise ConfigError("trend sensitivity u_t must lie in [0, 1]")
        if np.any(np.asarray(self.sigma) < 0):
            raise ConfigError("logit sigma must be nonnegative")


@dataclass
class Trajectory:
    """Recorded run: per-step adopter fraction plus optional state snapshots."""

    zeta: np.ndarray
    absorbed_at: int | None
    seed: int
    final: PopulationState
    snapshots_x: dict[int, np.ndarray] = field(default_factory=dict)
    snapshots_y: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return len(self.zeta) - 1


@dataclass(frozen=True)
class SimulationConfig:
    """Full run specification; ``simulate`` is a pure function of it.

    ``committed_nodes`` are pinned at +1 (action and opinion).  ``zeta0`` is
    the total initial adopter fraction: committed nodes count toward it and
    the lowest-index free agents make up any remainder.  Explicit
    ``initial_x``/``initial_y`` override that construction.
    """

    game: CoordinationParams | PggParams | CoevolutionParams
    revision: RevisionSpec
    graph: Graph | None = None
    graph_w: Graph | None = None
    contacts: ContactParams | None = None
    n: int | None = None
    committed_nodes: tuple[int, ...] = ()
    zeta0: float = 0.0
    initial_x: tuple[int, ...] | None = None
    initial_y: tuple[float, ...] | None = None
    horizon: int = 1000
    snapshot_stride: int = 0
    seed: int = 0

    def population_size(self) -> int:
        if self.graph is not None:
            return self.graph.n
        if isinstance(self.game, PggParams):
            return self.game.n
        if isinstance(self.game, CoevolutionParams):
            return self.game.n
        if self.n is not None:
            return self.n
        raise ConfigError("population size is undetermined (no graph and no n)")

    def validate(self):
        if self.horizon < 1:
            raise ConfigError("horizon must be at least 1")
        if self.snapshot_stride < 0:
            raise ConfigError("snapshot stride must be nonnegative")
        if not 0.0 <= self.zeta0 <= 1.0:
            raise ConfigError("zeta0 must lie in [0, 1]")
        n = self.population_size()
        if any(not 0 <= i < n for i in self.committed_nodes):
            raise ConfigError("committed node index out of range")
        proto = self.revision.protocol
        if proto == "trend_mixed":
            if self.contacts is None:
                raise ConfigError("trend_mixed runs need contact parameters")
            if self.graph is not None:
                raise ConfigError("trend_mixed revises on temporal contacts, not a static network")
            if not isinstance(self.game, CoordinationParams):
                raise ConfigError("trend_mixed is defined for the coordination game")
        else:
            if self.contacts is not None:
                raise ConfigError(f"{proto} runs on a static network, not temporal contacts")
            if isinstance(self.game, CoordinationParams) and self.graph is None:
                raise ConfigError("coordination dynamics need a static graph")
            if isinstance(self.game, CoevolutionParams):
                if self.graph is None:
                    raise ConfigError("coevolution dynamics need an influence graph")
                if proto != "best_response":
                    raise ConfigError("coevolution dynamics use the best_response protocol")


def payoff_gap(g: Graph | None, game, x) -> np.ndarray:
    """Per-agent payoff advantage of +1 over -1 given the others' profile."""
    x = np.asarray(x, dtype=np.float64)
    if isinstance(game, PggParams):
        return np.full(x.shape[0], game.r / game.n - 1.0)
    if isinstance(game, CoordinationParams):
        game = coordination_matrix(game.alpha)
    if not isinstance(game, MatrixGame):
        raise DomainError(f"cannot compute a payoff gap for {type(game).__name__}")
    if g is None:
        raise DomainError("matrix games on networks need a graph")
    m = game.as_array()
    delta = np.where(x == 1, m[1, 1] - m[0, 1], m[1, 0] - m[0, 0])
    return g.matrix @ delta


def _resolve_ties(x_cur, tie_rule, tied, rng):
    if tie_rule == "keep" or not np.any(tied):
        return x_cur
    if tie_rule == "prefer_plus":
        return np.where(tied, 1, x_cur)
    if rng is None:
        raise ConfigError("uniform tie breaking needs an rng")
    coin = rng.random(x_cur.shape[0]) < 0.5
    return np.where(tied, np.where(coin, 1, -1), x_cur)


def step_best_response_coordination(g: Graph, alpha: float, state: PopulationState, active) -> PopulationState:
    """One best-response sweep of the network coordination game.

    Active non-committed agents adopt +1 when their weighted neighborhood
    action average exceeds ``-alpha / (2 + alpha)``, adopt -1 below it, and
    keep their action on a tie.
    """
    if alpha <= -1:
        raise DomainError("alpha must exceed -1")
    m = g.matrix @ state.x.astype(np.float64)
    thr = -alpha / (2.0 + alpha)
    new_x = np.where(m > thr + _TIE_TOL, 1, np.where(m < thr - _TIE_TOL, -1, state.x))
    mask = _active_mask(state, active)
    out = state.copy()
    out.x[mask] = new_x[mask].astype(np.int8)
    return out


def step_best_response(g, game, state, active, tie_rule="keep", rng=None) -> PopulationState:
    """Generic best-response sweep driven by the payoff gap, with a
    configurable tie rule."""
    gap = payoff_gap(g, game, state.x)
    new_x = np.where(gap > _TIE_TOL, 1, np.where(gap < -_TIE_TOL, -1, state.x))
    tied = np.abs(gap) <= _TIE_TOL
    new_x = _resolve_ties(new_x, tie_rule, tied, rng)
    mask = _active_mask(state, active)
    out = state.copy()
    out.x[mask] = new_x[mask].astype(np.int8)
    return out


def logit_plus_probability(gap, sigma, printed_sign: bool = False) -> np.ndarray:
    """Probability of selecting +1 under logit choice with rationality sigma.

    The logistic form keeps the computation finite for any payoff gap.
    """
    sign = -1.0 if printed_sign else 1.0
    return expit(sign * np.asarray(sigma, dtype=np.float64) * np.asarray(gap, dtype=np.float64))


def step_logit(g, game, sigma, state, active, rng, printed_sign=False) -> PopulationState:
    """One logit-choice sweep: active agents sample a strategy with
    probability proportional to the exponentiated payoff."""
    gap = payoff_gap(g, game, state.x)
    p_plus = logit_plus_probability(gap, sigma, printed_sign)
    mask = _active_mask(state, active)
    idx = np.flatnonzero(mask)
    out = state.copy()
    if idx.size:
        u = rng.random(idx.size)
        out.x[idx] = np.where(u < p_plus[idx], 1, -1).astype(np.int8)
    return out


def step_trend_mixed(
    params: ContactParams,
    u_t: float,
    alpha: float,
    state: PopulationState,
    zeta_prev: float,
    rng: np.random.Generator,
) -> PopulationState:
    """One synchronous sweep of the trend-mixed dynamics on fresh contacts.

    Every non-committed agent independently follows the population trend with
    probability ``u_t`` (adopt +1 when the adopter fraction rose since the
    previous step, -1 when it fell, keep on equality) and otherwise
    best-responds to the coordination game on its ``k`` sampled contacts
    with weight ``1/k`` each.  The engine seeds ``zeta_prev`` with
    ``zeta(-1) := zeta(0)`` so trend followers keep their action at t = 0.
    """
    if alpha <= -1:
        raise DomainError("alpha must exceed -1")
    if not 0.0 <= u_t <= 1.0:
        raise DomainError("u_t must lie in [0, 1]")
    n = state.n
    c_prev = int(round(zeta_prev * n))
    x_new, _ = _backend.trend_step(
        state.x, state.committed, params.k, u_t, params.u_v, alpha,
        c_prev, state.adopters, params.include_self, params.with_replacement, rng,
    )
    out = state.copy()
    out.x[:] = x_new
    return out


def _active_mask(state: PopulationState, active) -> np.ndarray:
    if active is None:
        mask = np.ones(state.n, dtype=bool)
    else:
        mask = np.zeros(state.n, dtype=bool)
        mask[np.asarray(list(active), dtype=np.intp)] = True
    return mask & ~state.committed


def build_initial_state(
    n: int,
    committed_nodes=(),
    zeta0: float = 0.0,
    with_opinions: bool = False,
    initial_x=None,
    initial_y=None,
) -> PopulationState:
    """Population start state: committed nodes pinned at +1, everyone else at
    -1 except the lowest-index free agents promoted to reach ``zeta0``."""
    committed = np.zeros(n, dtype=bool)
    committed[np.asarray(list(committed_nodes), dtype=np.intp)] = True
    if initial_x is not None:
        x = np.asarray(initial_x, dtype=np.int8).copy()
        if x.shape != (n,):
            raise ConfigError("initial_x length mismatch")
        x[committed] = 1
    else:
        x = np.full(n, -1, dtype=np.int8)
        x[committed] = 1
        want = int(round(zeta0 * n))
        extra = want - int(committed.sum())
        if extra > 0:
            free = np.flatnonzero(~committed)
            if extra > free.size:
                raise ConfigError("zeta0 exceeds what the free population can provide")
            x[free[:extra]] = 1
    y = None
    if with_opinions:
        if initial_y is not None:
            y = np.asarray(initial_y, dtype=np.float64).copy()
            if y.shape != (n,):
                raise ConfigError("initial_y length mismatch")
            y[committed] = 1.0
        else:
            y = x.astype(np.float64)
    return PopulationState(x, y, committed)


def _active_sets(schedule: str, n: int, rng: np.random.Generator):
    """Yield one activation set per step, forever."""
    t = 0
    while True:
        if schedule == "synchronous":
            yield None
        elif schedule == "async_uniform":
            yield (int(rng.integers(n)),)
        else:
            yield (t % n,)
        t += 1


def _is_fixed_point(cfg: SimulationConfig, state: PopulationState, rule) -> bool:
    """Whether no admissible revision would change the state."""
    if isinstance(cfg.game, CoevolutionParams):
        nxt = rule.step(state, None)
        return bool(
            np.array_equal(nxt.x, state.x)
            and np.max(np.abs(nxt.y - state.y), initial=0.0) < _Y_FIXED_POINT_TOL
        )
    gap = payoff_gap(cfg.graph, cfg.game, state.x)
    free = ~state.committed
    wrong_plus = (gap > _TIE_TOL) & (state.x == -1)
    wrong_minus = (gap < -_TIE_TOL) & (state.x == 1)
    return not np.any(free & (wrong_plus | wrong_minus))


def _trend_async_step(cfg, state, i, c_prev, rng):
    """Single-agent trend-mixed revision (non-default schedules)."""
    params = cfg.contacts
    out = state.copy()
    if state.committed[i]:
        return out
    if rng.random() < cfg.revision.u_t:
        c_now = state.adopters
        if c_now > c_prev:
            out.x[i] = 1
        elif c_now < c_prev:
            out.x[i] = -1
        return out
    if params.u_v == 0.0:
        draws = sample_contacts_uniform(state.n, params, rng)[i]
    else:
        draws = sample_contacts_visibility(state.n, params, state.x, rng)[i]
    s = int(state.x[draws].sum())
    d = s - params.k * (-cfg.game.alpha / (2.0 + cfg.game.alpha))
    if d > params.k * _TIE_TOL:
        out.x[i] = 1
    elif d < -params.k * _TIE_TOL:
        out.x[i] = -1
    return out


def simulate(config: SimulationConfig) -> Trajectory:
    """Run one seeded trajectory of the configured dynamics.

    Stops early on absorption: exact consensus for the stochastic
    best-response-based protocols, a detected fixed point for deterministic
    ones.  Logit runs always continue to the horizon because every state can
    still escape under finite rationality.
    """
    config.validate()
    n = config.population_size()
    rng = np.random.Generator(np.random.PCG64(config.seed))
    with_opinions = isinstance(config.game, CoevolutionParams)
    state = build_initial_state(
        n, config.committed_nodes, config.zeta0, with_opinions,
        config.initial_x, config.initial_y,
    )

    rule = None
    if with_opinions:
        from .coevolution import CoevolutionUpdateRule

        g_w = config.graph_w if config.graph_w is not None else config.graph
        rule = CoevolutionUpdateRule(config.game, config.graph, g_w)

    zetas = [state.zeta]
    snaps_x: dict[int, np.ndarray] = {}
    snaps_y: dict[int, np.ndarray] = {}
    stride = config.snapshot_stride

    def record(t, st):
        if stride and t % stride == 0:
            snaps_x[t] = st.x.copy()
            if st.y is not None:
                snaps_y[t] = st.y.copy()

    record(0, state)
    absorbed_at = None
    proto = config.revision.protocol
    schedule = config.revision.schedule
    activations = _active_sets(schedule, n, rng)
    c_prev = state.adopters
    sync = schedule == "synchronous"
    has_committed_plus = bool(np.any(state.committed & (state.x == 1)))

    for t in range(1, config.horizon + 1):
        active = next(activations)
        if proto == "trend_mixed":
            c_now = state.adopters
            if sync:
                nxt = step_trend_mixed(
                    config.contacts, config.revision.u_t, config.game.alpha,
                    state, c_prev / n, rng,
                )
            else:
                nxt = _trend_async_step(config, state, active[0], c_prev, rng)
            c_prev = c_now
        elif proto == "logit":
            nxt = step_logit(
                config.graph, config.game, config.revision.sigma, state, active, rng,
                config.revision.logit_printed_sign,
            )
        elif with_opinions:
            nxt = rule.step(state, active)
        else:
            nxt = step_best_response(
                config.graph, config.game, state, active, config.revision.tie_rule, rng,
            )

        changed_x = not np.array_equal(nxt.x, state.x)
        y_moved = (
            nxt.y is not None
            and np.max(np.abs(nxt.y - state.y), initial=0.0) >= _Y_FIXED_POINT_TOL
        )
        state = nxt
        zetas.append(state.zeta)
        record(t, state)

        if proto == "logit":
            continue
        c = state.adopters
        if proto == "trend_mixed":
            if c == n or (c == 0 and not has_committed_plus):
                absorbed_at = t
                break
        elif sync:
            if not changed_x and not y_moved:
                absorbed_at = t
                break
        elif t % n == 0 and _is_fixed_point(config, state, rule):
            absorbed_at = t
            break

    if stride and (len(zetas) - 1) not in snaps_x:
        record_t = len(zetas) - 1
        snaps_x[record_t] = state.x.copy()
        if state.y is not None:
            snaps_y[record_t] = state.y.copy()

    return Trajectory(
        zeta=np.asarray(zetas),
        absorbed_at=absorbed_at,
        seed=config.seed,
        final=state,
        snapshots_x=snaps_x,
        snapshots_y=snaps_y,
    )


def write_trajectory_csv(traj: Trajectory, path, meta: dict | None = None):
    """Write ``t,zeta[,x_*][,y_*]`` rows plus a JSON metadata sidecar.

    Without snapshots every step gets a ``t,zeta`` row; with snapshots only
    the recorded steps appear, carrying the full state columns.
    """
    path = str(path)
    n = traj.final.n
    with_snaps = bool(traj.snapshots_x)
    with_y = bool(traj.snapshots_y)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = ["t", "zeta"]
        if with_snaps:
            header += [f"x_{i}" for i in range(n)]
            if with_y:
                header += [f"y_{i}" for i in range(n)]
        w.writerow(header)
        if with_snaps:
            for t in sorted(traj.snapshots_x):
                row = [t, repr(float(traj.zeta[t]))]
                row += [int(v) for v in traj.snapshots_x[t]]
                if with_y:
                    row += [repr(float(v)) for v in traj.snapshots_y[t]]
                w.writerow(row)
        else:
            for t, z in enumerate(traj.zeta):
                w.writerow([t, repr(float(z))])
    sidecar = {
        "seed": traj.seed,
        "absorbed_at": traj.absorbed_at,
        "steps": traj.steps,
        "n": n,
        "backend": _backend.backend_name(),
    }
    if meta:
        sidecar.update(meta)
    with open(path + ".meta.json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
