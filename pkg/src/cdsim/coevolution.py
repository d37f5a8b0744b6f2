"""Coevolutionary action-opinion dynamics and committed-minority control.

A revising agent jointly best-responds in action and opinion.  The action
flips on the sign of a discriminant mixing peer pressure (influence-layer
action average) with social influence (communication-layer opinion average);
the opinion then moves to the convex combination of the neighborhood opinion
average and the agent's new action.  With the population started at the
all-(-1) consensus and a committed set pinned at (+1, +1), synchronous sweeps
are entrywise non-decreasing, which the control routines exploit and assert.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvariantError, IterationError
from .games import CoevolutionParams, PopulationState, coevolution_payoff
from .graph import Graph

__all__ = [
    "CoevolutionUpdateRule",
    "ControlOutcome",
    "ControlReport",
    "discriminant",
    "coevolution_step",
    "joint_best_response_check",
    "all_cooperation_equilibrium_check",
    "reach_collective_change",
    "critical_mass",
    "min_control_set_greedy",
    "linear_opinion_consensus",
]

_TIE_TOL = 1e-12
_SWEEP_TOL = 1e-10
_MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class CoevolutionUpdateRule:
    """Bundles the coevolutionary parameters with the two network layers."""

    params: CoevolutionParams
    graph_a: Graph
    graph_w: Graph

    def __post_init__(self):
        if self.graph_a.n != self.params.n or self.graph_w.n != self.params.n:
            raise DomainError("graph sizes must match the population size")

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def kappa(self) -> np.ndarray:
        """Opinion coefficient of the discriminant: 2*beta*lambda/(beta+lambda)."""
        b, l = self.params.beta_eff, self.params.lam
        return 2.0 * b * l / (b + l)

    def discriminants(self, state: PopulationState) -> np.ndarray:
        p = self.params
        opinion_term = self.kappa * (self.graph_w.matrix @ state.y)
        if p.inner == "coordination":
            return p.gamma * (self.graph_a.matrix @ state.x.astype(np.float64)) + opinion_term
        return p.gamma * (p.r / p.n - 1.0) + opinion_term

    def step(self, state: PopulationState, active=None) -> PopulationState:
        return coevolution_step(self, state, active)


def discriminant(rule: CoevolutionUpdateRule, i: int, state: PopulationState) -> float:
    """Action-switch discriminant of agent ``i``: positive means +1 is the
    jointly optimal action."""
    if not 0 <= i < rule.n:
        raise DomainError(f"node {i} out of range")
    return float(rule.discriminants(state)[i])


def coevolution_step(rule: CoevolutionUpdateRule, state: PopulationState, active=None) -> PopulationState:
    """Joint best-response revision of the active, non-committed agents.

    Action follows the discriminant sign (keep-current on a tie); the new
    opinion is the convex combination of the neighborhood opinion average and
    the new action with weights beta/(beta+lambda) and lambda/(beta+lambda).
    """
    if state.y is None:
        raise DomainError("coevolution dynamics need an opinion vector")
    p = rule.params
    delta = rule.discriminants(state)
    x_new = np.where(delta > _TIE_TOL, 1, np.where(delta < -_TIE_TOL, -1, state.x)).astype(np.int8)
    mw = rule.graph_w.matrix @ state.y
    denom = p.beta_eff + p.lam
    y_new = (p.beta_eff * mw + p.lam * x_new) / denom

    if active is None:
        mask = ~state.committed
    else:
        mask = np.zeros(state.n, dtype=bool)
        mask[np.asarray(list(active), dtype=np.intp)] = True
        mask &= ~state.committed
    out = state.copy()
    out.x[mask] = x_new[mask]
    out.y[mask] = y_new[mask]
    return out


def joint_best_response_check(rule: CoevolutionUpdateRule, i: int, state: PopulationState,
                              tol: float = 1e-10) -> bool:
    """Verify the closed-form update of agent ``i`` against a direct argmax.

    For each candidate action the optimal opinion is the closed-form convex
    combination; the two candidate pairs are compared through the payoff
    function itself.  Committed agents are not best responders, so the check
    is vacuously true for them.
    """
    if state.committed[i]:
        return True
    p = rule.params
    mw = float(rule.graph_w.matrix[i] @ state.y)
    denom = p.beta_eff[i] + p.lam[i]

    def candidate(a):
        s = (p.beta_eff[i] * mw + p.lam[i] * a) / denom
        pay = coevolution_payoff(rule.graph_a, rule.graph_w, p, i, (a, s), state)
        return s, pay

    s_minus, f_minus = candidate(-1)
    s_plus, f_plus = candidate(+1)
    if f_plus > f_minus + _TIE_TOL:
        best = (1, s_plus)
    elif f_minus > f_plus + _TIE_TOL:
        best = (-1, s_minus)
    else:
        cur = int(state.x[i])
        best = (cur, s_plus if cur == 1 else s_minus)

    stepped = coevolution_step(rule, state, active=(i,))
    return int(stepped.x[i]) == best[0] and abs(float(stepped.y[i]) - best[1]) <= tol


def all_cooperation_equilibrium_check(rule: CoevolutionUpdateRule) -> bool:
    """Existence condition for the all-cooperation equilibrium of the
    public-goods coevolution: beta*lambda/(beta+lambda) > gamma*(1 - r/n)
    for every agent."""
    p = rule.params
    if p.inner != "pgg":
        raise DomainError("the all-cooperation condition applies to the pgg inner game")
    lhs = p.beta_eff * p.lam / (p.beta_eff + p.lam)
    rhs = p.gamma * (1.0 - p.r / p.n)
    return bool(np.all(lhs > rhs))


@dataclass
class ControlOutcome:
    changed: bool
    rounds: int
    final: PopulationState


def reach_collective_change(
    rule: CoevolutionUpdateRule,
    committed_nodes,
    tol: float = _SWEEP_TOL,
    max_rounds: int = 1_000_000,
) -> ControlOutcome:
    """Deterministic check that a committed set triggers collective change.

    Starts every free agent at x = y = -1 with the committed set pinned at
    (+1, +1) and runs synchronous sweeps until the state change falls below
    ``tol`` in max norm.  Trajectories in this regime are entrywise
    non-decreasing; any decrease beyond slack aborts, since it would mean the
    implementation left the monotone regime.
    """
    n = rule.n
    committed = np.zeros(n, dtype=bool)
    committed[np.asarray(list(committed_nodes), dtype=np.intp)] = True
    x = np.where(committed, 1, -1).astype(np.int8)
    state = PopulationState(x, x.astype(np.float64), committed)

    for rounds in range(1, max_rounds + 1):
        nxt = coevolution_step(rule, state, None)
        if np.any(nxt.x < state.x) or np.any(nxt.y < state.y - _MONOTONE_SLACK):
            worst = float(np.min(nxt.y - state.y))
            raise InvariantError(
                f"monotone sweep decreased a coordinate (min opinion delta {worst:.3e})"
            )
        moved = np.max(np.abs(nxt.y - state.y), initial=0.0)
        x_moved = not np.array_equal(nxt.x, state.x)
        state = nxt
        if moved < tol and not x_moved:
            return ControlOutcome(bool(np.all(state.x == 1)), rounds, state)
    raise IterationError(f"monotone sweep did not settle within {max_rounds} rounds")


def critical_mass(rule: CoevolutionUpdateRule) -> float:
    """Smallest committed fraction triggering collective change on the rule's
    graph, by bisection over the committed count (nodes taken in index
    order, which is exchangeable on the complete graphs this targets).

    Monotonicity of the dynamics in the committed set makes the count
    predicate monotone, so bisection is exact to 1/n.
    """
    n = rule.n

    def changed(c: int) -> bool:
        return reach_collective_change(rule, range(c)).changed

    lo, hi = 0, n
    if changed(0):
        return 0.0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if changed(mid):
            hi = mid
        else:
            lo = mid
    return hi / n


def nodes_to_change(rule: CoevolutionUpdateRule, ranking) -> int | None:
    """Smallest prefix of ``ranking`` whose commitment flips the population,
    or None when even all-but-one committed nodes fail."""
    ranking = list(int(i) for i in ranking)
    if not ranking:
        raise DomainError("candidate ranking must be nonempty")
    n = rule.n
    limit = min(len(ranking), n - 1)
    if not reach_collective_change(rule, ranking[:limit]).changed:
        return None
    lo, hi = 0, limit
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if reach_collective_change(rule, ranking[:mid]).changed:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class ControlReport:
    committed_nodes: tuple[int, ...]
    changed: bool
    rounds: int
    final_zeta: float
    ranking_used: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "committed_nodes": list(self.committed_nodes),
            "changed": self.changed,
            "rounds": self.rounds,
            "final_zeta": self.final_zeta,
            "ranking_used": list(self.ranking_used),
        }


def min_control_set_greedy(rule: CoevolutionUpdateRule, ranking) -> ControlReport:
    """Grow a committed set along ``ranking`` until collective change succeeds.

    Monotonicity in the committed set lets the growth be resolved by
    bisection over prefix lengths.  When even all but one node committed
    fails, the report flags the failure with an empty set.
    """
    ranking = tuple(int(i) for i in ranking)
    size = nodes_to_change(rule, ranking)
    if size is None:
        limit = min(len(ranking), rule.n - 1)
        outcome = reach_collective_change(rule, ranking[:limit])
        return ControlReport((), False, outcome.rounds, outcome.final.zeta, ranking)
    outcome = reach_collective_change(rule, ranking[:size])
    return ControlReport(tuple(ranking[:size]), True, outcome.rounds, outcome.final.zeta, ranking)


def linear_opinion_consensus(
    g_w: Graph, y0, tol: float = 1e-10, max_iter: int = 1_000_000
) -> tuple[np.ndarray, int]:
    """Iterate plain opinion averaging ``y <- W y`` to its consensus.

    Returns the settled opinion vector and the number of steps taken.  With a
    globally reachable node the limit is the social-power-weighted average of
    the initial opinions.
    """
    if not g_w.row_stochastic:
        raise DomainError("opinion averaging needs a row-stochastic matrix")
    y = np.asarray(y0, dtype=np.float64).copy()
    if y.shape != (g_w.n,):
        raise DomainError("opinion vector length mismatch")
    for t in range(1, max_iter + 1):
        y_next = g_w.matrix @ y
        if np.max(np.abs(y_next - y)) < tol:
            return y_next, t
        y = y_next
    raise IterationError(f"opinion averaging did not converge in {max_iter} steps")
