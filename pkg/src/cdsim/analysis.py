"""Threshold analysis for trend-driven collective change, plus exact Nash
enumeration on small networks.

``pi_k_alpha`` is the probability that a best-responding agent with ``k``
uniformly sampled contacts adopts +1 when a fraction ``zeta`` of the
population has adopted: the binomial tail from ``floor(k/(2+alpha)) + 1``
successes up.  Collective change under trend sensitivity ``u_t`` hinges on
the sign of ``f_u(zeta) = (1 - u_t) * Pi(zeta) - zeta + u_t``: ``u_star`` is
the smallest sensitivity making ``f_u`` positive on all of (0, 1), and
``zeta_star_u`` the smallest initial adopter fraction above which it stays
positive.  Visibility bias enters mean-field style by replacing ``zeta``
inside ``Pi`` with the boosted single-draw adopter probability
``zeta (1 + u_v) / (1 + u_v zeta)``; the Monte Carlo estimator in
``cdsim.montecarlo`` is the source of truth for that extension.
"""

from __future__ import annotations

import csv
from math import comb, floor

import numpy as np

from .errors import DomainError, SizeError
from .games import CoordinationParams, PggParams
from .graph import Graph

__all__ = [
    "pi_k_alpha",
    "zeta_star",
    "u_star",
    "zeta_star_u",
    "zeta_star_uv",
    "find_nash_bruteforce",
    "threshold_sweep",
    "write_threshold_csv",
]

_GRID_N = 10_001
_BOUNDARY = 1e-12
_BAD_TOL = 1e-13


def _check_k_alpha(k: int, alpha: float):
    if k <= 0:
        raise DomainError("k must be a positive integer")
    if alpha <= -1:
        raise DomainError("alpha must exceed -1")


def _lower_limit(k: int, alpha: float) -> int:
    return floor(k / (2.0 + alpha)) + 1


def pi_k_alpha(zeta, k: int, alpha: float):
    """Adoption probability of a best responder on ``k`` uniform contacts.

    Binomial tail sum from ``floor(k/(2+alpha)) + 1`` adopting contacts up;
    vectorized over ``zeta``.
    """
    _check_k_alpha(k, alpha)
    z = np.asarray(zeta, dtype=np.float64)
    if np.any((z < 0) | (z > 1)):
        raise DomainError("zeta must lie in [0, 1]")
    m = _lower_limit(k, alpha)
    total = np.zeros_like(z)
    for ell in range(m, k + 1):
        total += comb(k, ell) * z**ell * (1.0 - z) ** (k - ell)
    return total if total.ndim else float(total)


def zeta_star(k: int, alpha: float, tol: float = 1e-10) -> float | None:
    """Interior fixed point of ``Pi_{k,alpha}``, or None when there is none.

    The fixed point separates vanishing from spreading adoption under pure
    best response; it disappears when the relative advantage is large enough
    that ``Pi`` dominates the diagonal on all of (0, 1).
    """
    _check_k_alpha(k, alpha)
    if tol <= 0:
        raise DomainError("tol must be positive")
    grid = np.linspace(0.0, 1.0, _GRID_N + 1)[1:-1]
    vals = pi_k_alpha(grid, k, alpha) - grid
    sign_change = np.nonzero(np.diff(np.sign(vals)) != 0)[0]
    if sign_change.size == 0:
        return None
    lo, hi = grid[sign_change[0]], grid[sign_change[0] + 1]
    flo = pi_k_alpha(lo, k, alpha) - lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = pi_k_alpha(mid, k, alpha) - mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _biased_fraction(z, u_v: float):
    """Single-draw adopter probability under visibility boost ``u_v``."""
    return z * (1.0 + u_v) / (1.0 + u_v * z)


def _f_trend(z, k: int, alpha: float, u_t: float, u_v: float):
    """Drift margin of the trend-mixed dynamics at adopter fraction ``z``."""
    return (1.0 - u_t) * pi_k_alpha(_biased_fraction(z, u_v), k, alpha) - np.asarray(z) + u_t


def _golden_min(f, a: float, b: float, tol: float = 1e-12) -> tuple[float, float]:
    """Golden-section minimum of a unimodal-enough scalar function on [a, b]."""
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = c if fc <= fd else d
    return x, min(fc, fd)


def _interior_minima(k: int, alpha: float, u_t: float, u_v: float):
    """Candidate minima of the drift margin on (0, 1).

    Grid scan plus golden refinement of every local minimum bracket; the edge
    brackets extend to just inside the boundaries, where the margin can dip
    below grid resolution near a tangency.
    """
    grid = np.linspace(0.0, 1.0, _GRID_N + 1)[1:-1]
    vals = _f_trend(grid, k, alpha, u_t, u_v)

    def f(z):
        return float(_f_trend(z, k, alpha, u_t, u_v))

    brackets = [(_BOUNDARY, grid[1]), (grid[-2], 1.0 - _BOUNDARY)]
    interior = np.nonzero((vals[1:-1] <= vals[:-2]) & (vals[1:-1] <= vals[2:]))[0] + 1
    for i in interior:
        brackets.append((grid[i - 1], grid[i + 1]))

    candidates = [(float(grid[i]), float(vals[i])) for i in np.argsort(vals)[:4]]
    for a, b in brackets:
        candidates.append(_golden_min(f, a, b))
    return candidates


def _min_f(k: int, alpha: float, u_t: float, u_v: float) -> float:
    return min(v for _, v in _interior_minima(k, alpha, u_t, u_v))


def u_star(k: int, alpha: float, tol: float = 1e-8, u_v: float = 0.0) -> float:
    """Smallest trend sensitivity guaranteeing collective change from any
    positive initial adopter fraction.

    Bisection on ``u`` against the sign of the interior minimum of the drift
    margin; the margin rises pointwise in ``u``, so the predicate is
    monotone.
    """
    _check_k_alpha(k, alpha)
    if tol <= 0:
        raise DomainError("tol must be positive")

    def ok(u: float) -> bool:
        return _min_f(k, alpha, u, u_v) >= -_BAD_TOL

    if ok(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def zeta_star_u(k: int, alpha: float, u_t: float, tol: float = 1e-8) -> float:
    """Smallest initial adopter fraction above which the drift margin stays
    positive all the way to consensus."""
    return zeta_star_uv(k, alpha, u_t, 0.0, tol)


def zeta_star_uv(k: int, alpha: float, u_t: float, u_v: float, tol: float = 1e-8) -> float:
    """Visibility-extended adoption threshold (mean-field construction).

    Replaces the adopter fraction inside ``Pi`` by the boosted single-draw
    probability and returns the rightmost point where the drift margin stops
    being positive, located by scan plus bisection.
    """
    _check_k_alpha(k, alpha)
    if not 0.0 <= u_t <= 1.0:
        raise DomainError("u_t must lie in [0, 1]")
    if u_v < 0:
        raise DomainError("u_v must be nonnegative")
    if tol <= 0:
        raise DomainError("tol must be positive")

    grid = np.linspace(0.0, 1.0, _GRID_N + 1)[1:-1]
    vals = _f_trend(grid, k, alpha, u_t, u_v)
    bad = [float(grid[i]) for i in np.nonzero(vals <= 0.0)[0]]
    bad += [x for x, v in _interior_minima(k, alpha, u_t, u_v) if v <= _BAD_TOL]
    if not bad:
        return 0.0
    lo = max(bad)
    hi_candidates = grid[(grid > lo) & (vals > _BAD_TOL)]
    hi = float(hi_candidates[0]) if hi_candidates.size else 1.0 - _BOUNDARY

    def f(z):
        return float(_f_trend(z, k, alpha, u_t, u_v))

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > _BAD_TOL:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def find_nash_bruteforce(g: Graph, game, max_n: int = 20) -> list[np.ndarray]:
    """All pure Nash profiles of the networked game by exhaustive enumeration.

    A profile qualifies when every agent's current action lies in its
    best-response set, ties included.  Guarded to ``n <= max_n`` since the
    search is exponential.
    """
    n = g.n
    if n > max_n:
        raise SizeError(f"brute force enumeration capped at n={max_n}, got {n}")
    tie = 1e-12
    equilibria: list[np.ndarray] = []
    chunk = 1 << 14
    codes = np.arange(1 << n, dtype=np.uint64)
    bits = (1 << np.arange(n, dtype=np.uint64))[None, :]
    for start in range(0, 1 << n, chunk):
        block = codes[start:start + chunk]
        x = np.where((block[:, None] & bits) != 0, 1, -1).astype(np.int8)
        if isinstance(game, CoordinationParams):
            d = np.where(x == 1, 1.0 + game.alpha, -1.0)
            gap = d @ g.matrix.T
        elif isinstance(game, PggParams):
            if game.n != n:
                raise DomainError("pgg population size must match the graph")
            gap = np.full(x.shape, game.r / game.n - 1.0)
        else:
            raise DomainError(f"unsupported game {type(game).__name__}")
        ok_plus = (x == 1) & (gap >= -tie)
        ok_minus = (x == -1) & (gap <= tie)
        ne = np.all(ok_plus | ok_minus, axis=1)
        equilibria.extend(x[ne])
    return equilibria


def threshold_sweep(k: int, alphas, u_ts, u_vs) -> list[tuple]:
    """Grid of adoption thresholds as ``(k, alpha, u_t, u_v, zeta_star)`` rows."""
    alphas, u_ts, u_vs = list(alphas), list(u_ts), list(u_vs)
    if not alphas or not u_ts or not u_vs:
        raise DomainError("threshold sweep needs nonempty parameter ranges")
    rows = []
    for a in alphas:
        for ut in u_ts:
            for uv in u_vs:
                rows.append((k, a, ut, uv, zeta_star_uv(k, a, ut, uv)))
    return rows


def write_threshold_csv(rows, path):
    with open(str(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "alpha", "u_t", "u_v", "zeta_star"])
        for k, a, ut, uv, zs in rows:
            w.writerow([k, repr(float(a)), repr(float(ut)), repr(float(uv)), repr(float(zs))])
