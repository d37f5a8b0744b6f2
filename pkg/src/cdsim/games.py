"""Payoff functions and best-response sets for the games in the engine.

All binary games use the action set {-1, +1}.  Coordination payoffs reward
matching a neighbor, with ``alpha`` the relative advantage of +1; the linear
public-goods payoff splits a pool ``r * zeta`` evenly across the population.
The coevolutionary payoff couples an action game with quadratic opinion
mismatch and action-opinion consistency penalties.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .graph import Graph

__all__ = [
    "ACTIONS",
    "MatrixGame",
    "CoordinationParams",
    "PggParams",
    "CoevolutionParams",
    "PopulationState",
    "coordination_matrix",
    "network_matrix_payoff",
    "coordination_payoff",
    "pgg_payoff",
    "opinion_payoff",
    "coevolution_payoff",
    "best_response_set",
    "PAYOFF_TIE_TOL",
]

ACTIONS = (-1, 1)

# Payoffs are short sums of products, so exact ties (e.g. the alpha = 1/2
# boundary) must be detected reliably.
PAYOFF_TIE_TOL = 1e-12


@dataclass(frozen=True)
class MatrixGame:
    """2x2 matrix game on actions {-1, +1}.

    ``payoff(a, b)`` is the row player's reward for playing ``a`` against
    ``b``; ``entries[i][j]`` indexes actions in the order (-1, +1).
    """

    entries: tuple[tuple[float, float], tuple[float, float]]

    def payoff(self, a: int, b: int) -> float:
        return self.entries[(a + 1) // 2][(b + 1) // 2]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=np.float64)


def coordination_matrix(alpha: float) -> MatrixGame:
    """Coordination matrix: 1 for matching on -1, ``1 + alpha`` on +1."""
    if alpha <= -1:
        raise DomainError("alpha must exceed -1")
    return MatrixGame(((1.0, 0.0), (0.0, 1.0 + alpha)))


@dataclass(frozen=True)
class CoordinationParams:
    alpha: float

    def __post_init__(self):
        if self.alpha <= -1:
            raise DomainError("alpha must exceed -1")


@dataclass(frozen=True)
class PggParams:
    """Linear public-goods game: multiplier ``r`` over a population of ``n``."""

    r: float
    n: int

    def __post_init__(self):
        if self.n <= 0:
            raise DomainError("population size must be positive")
        if not 1.0 < self.r < self.n:
            warnings.warn(
                f"public goods multiplier r={self.r} outside (1, n={self.n}); "
                "the game has no social dilemma there",
                stacklevel=3,
            )


@dataclass(frozen=True)
class CoevolutionParams:
    """Per-agent weights of the coevolutionary payoff.

    ``gamma`` weights the inner action game, ``beta`` the opinion-mismatch
    term, ``lam`` the action-opinion consistency term.  ``inner`` selects the
    action game ("coordination" plays the alpha = 0 coordination game; "pgg"
    needs the multiplier ``r``).  ``opinion_weight_convention`` chooses the
    coefficient of the opinion term: ``"beta"`` (default) or
    ``"beta_times_one_minus_lambda"``.
    """

    n: int
    gamma: np.ndarray = field(default=None)
    beta: np.ndarray = field(default=None)
    lam: np.ndarray = field(default=None)
    inner: str = "coordination"
    r: float | None = None
    opinion_weight_convention: str = "beta"

    def __post_init__(self):
        if self.n <= 0:
            raise DomainError("population size must be positive")
        for name in ("gamma", "beta", "lam"):
            v = getattr(self, name)
            v = np.full(self.n, 1.0) if v is None else np.broadcast_to(
                np.asarray(v, dtype=np.float64), (self.n,)
            ).copy()
            if np.any(v < 0):
                raise DomainError(f"{name} must be nonnegative")
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        if self.inner not in ("coordination", "pgg"):
            raise DomainError(f"unknown inner game {self.inner!r}")
        if self.inner == "pgg" and self.r is None:
            raise DomainError("pgg inner game needs the multiplier r")
        if self.opinion_weight_convention not in ("beta", "beta_times_one_minus_lambda"):
            raise DomainError(
                f"unknown opinion weight convention {self.opinion_weight_convention!r}"
            )
        if np.any(self.beta_eff < 0):
            raise DomainError("beta*(1-lambda) convention needs lambda <= 1")
        if np.any(self.beta_eff + self.lam <= 0):
            raise DomainError("beta + lambda must be positive for every agent")

    @property
    def beta_eff(self) -> np.ndarray:
        if self.opinion_weight_convention == "beta":
            return self.beta
        return self.beta * (1.0 - self.lam)


class PopulationState:
    """Joint population state: actions ``x``, opinions ``y``, committed mask.

    Committed agents are control inputs: no revision operation ever changes
    their action or opinion.  ``y`` may be omitted for pure action dynamics.
    """

    __slots__ = ("x", "y", "committed")

    def __init__(self, x, y=None, committed=None):
        x = np.asarray(x, dtype=np.int8).copy()
        if x.ndim != 1 or not np.all(np.abs(x) == 1):
            raise DomainError("actions must be a vector of -1/+1")
        n = x.shape[0]
        if y is not None:
            y = np.asarray(y, dtype=np.float64).copy()
            if y.shape != (n,):
                raise DomainError("opinion vector length mismatch")
            if np.any(np.abs(y) > 1.0 + 1e-12):
                raise DomainError("opinions must lie in [-1, 1]")
            np.clip(y, -1.0, 1.0, out=y)
        if committed is None:
            committed = np.zeros(n, dtype=bool)
        else:
            committed = np.asarray(committed, dtype=bool).copy()
            if committed.shape != (n,):
                raise DomainError("committed mask length mismatch")
        self.x = x
        self.y = y
        self.committed = committed

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def zeta(self) -> float:
        """Fraction of the population currently at +1."""
        return self.adopters / self.n

    @property
    def adopters(self) -> int:
        return int(np.count_nonzero(self.x == 1))

    def copy(self) -> "PopulationState":
        return PopulationState(self.x, None if self.y is None else self.y, self.committed)


def _check_node(g: Graph, i: int):
    if not 0 <= i < g.n:
        raise DomainError(f"node {i} out of range for n={g.n}")


def network_matrix_payoff(g: Graph, game: MatrixGame, i: int, a: int, x) -> float:
    """Total payoff of node ``i`` playing ``a``: the 2x2 game against every
    neighbor, weighted by interaction strength."""
    _check_node(g, i)
    if a not in ACTIONS:
        raise DomainError("action must be -1 or +1")
    x = np.asarray(x)
    row = g.matrix[i]
    m = game.as_array()
    vals = m[(a + 1) // 2, ((x + 1) // 2).astype(np.intp)]
    return float(row @ vals)


def coordination_payoff(g: Graph, params: CoordinationParams, i: int, a: int, x) -> float:
    """Coordination payoff of node ``i`` playing ``a`` against profile ``x``."""
    _check_node(g, i)
    x = np.asarray(x, dtype=np.float64)
    row = g.matrix[i]
    if a == 1:
        return float(0.5 * (1.0 + params.alpha) * (row @ (1.0 + x)))
    if a == -1:
        return float(0.5 * (row @ (1.0 - x)))
    raise DomainError("action must be -1 or +1")


def pgg_payoff(params: PggParams, i: int, a: int, x) -> float:
    """Linear public-goods payoff: equal share of the pool minus the unit
    contribution when cooperating.

    Evaluated as ``r * c / n - (a + 1) / 2`` with ``c`` the integer
    cooperator count including the candidate action; this is algebraically
    the usual split-plus-contribution form, but keeps the consensus payoffs
    (0 all-defect, r - 1 all-cooperate) exact in floating point.
    """
    x = np.asarray(x)
    n = params.n
    if n != x.shape[0]:
        raise DomainError("profile length must equal the population size")
    if not 0 <= i < n:
        raise DomainError(f"node {i} out of range for n={n}")
    if a not in ACTIONS:
        raise DomainError("action must be -1 or +1")
    c = int(np.count_nonzero(x == 1)) - (1 if x[i] == 1 else 0) + (1 if a == 1 else 0)
    return float(params.r * c / n - (a + 1) / 2)


def opinion_payoff(g: Graph, i: int, s: float, y) -> float:
    """Quadratic opinion payoff: negative weighted mismatch against neighbors.

    Maximized at the weighted neighborhood average, which is what makes
    linear opinion averaging a best-response update.
    """
    _check_node(g, i)
    y = np.asarray(y, dtype=np.float64)
    row = g.matrix[i]
    return float(-0.5 * (row @ (s - y) ** 2))


def _inner_action_payoff(
    g_a: Graph, params: CoevolutionParams, i: int, a: int, x
) -> float:
    if params.inner == "coordination":
        return coordination_payoff(g_a, CoordinationParams(0.0), i, a, x)
    return pgg_payoff(PggParams(params.r, params.n), i, a, x)


def coevolution_payoff(
    g_a: Graph,
    g_w: Graph,
    params: CoevolutionParams,
    i: int,
    z_i: tuple[int, float],
    state: PopulationState,
) -> float:
    """Joint payoff of agent ``i`` holding action-opinion pair ``z_i``.

    Sum of the weighted inner action game, the opinion-mismatch penalty on
    the communication layer, and the action-opinion consistency penalty.
    """
    a, s = z_i
    if a not in ACTIONS:
        raise DomainError("action must be -1 or +1")
    if not -1.0 <= s <= 1.0:
        raise DomainError(f"opinion {s!r} outside [-1, 1]")
    if state.y is None:
        raise DomainError("coevolution payoff needs an opinion vector")
    action_part = params.gamma[i] * _inner_action_payoff(g_a, params, i, a, state.x)
    opinion_part = params.beta_eff[i] * opinion_payoff(g_w, i, s, state.y)
    consistency = -0.5 * params.lam[i] * (a - s) ** 2
    return float(action_part + opinion_part + consistency)


def best_response_set(evaluate, candidates=ACTIONS, tol: float = PAYOFF_TIE_TOL):
    """Strategies maximizing ``evaluate`` over ``candidates``.

    Real-valued payoffs tie when within ``tol`` of the maximum, so exact
    indifference points are reported as multi-element sets.
    """
    candidates = list(candidates)
    if not candidates:
        raise DomainError("best response needs at least one candidate")
    values = [evaluate(s) for s in candidates]
    top = max(values)
    return [s for s, v in zip(candidates, values) if v >= top - tol]
