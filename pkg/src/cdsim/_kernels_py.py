"""Pure-numpy revision kernel for the trend-mixed temporal dynamics.

This is the fallback used when the compiled extension is unavailable; both
implementations consume the generator's uniform stream in the same order and
produce bit-identical states:

* default contact mode (self-inclusive, with replacement): one block of
  ``n * (1 + k)`` uniforms per step, row ``i`` holding agent ``i``'s
  trend-vs-game coin followed by its ``k`` contact draws (drawn for every
  agent, committed or trend-following ones included, so the layout is fixed);
* any other contact mode: a sequential per-agent walk where committed agents
  consume nothing and trend followers consume only their coin.

Contact draws map one uniform to one node.  Uniform sampling truncates
``u * pool``; visibility-biased sampling splits [0, 1) into an adopter block
of mass ``n_a (1 + u_v) / (n + u_v n_a)`` and a complement, then reuses the
rescaled uniform to index inside the block.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

_TIE_TOL = 1e-12


def trend_step(
    x: np.ndarray,
    committed: np.ndarray,
    k: int,
    u_t: float,
    u_v: float,
    alpha: float,
    c_prev: int,
    c_now: int,
    include_self: bool,
    with_replacement: bool,
    rng: np.random.Generator,
) -> tuple[np.ndarray, int]:
    """Advance the trend-mixed dynamics one synchronous step.

    Every non-committed agent follows the population trend (adopt +1 when the
    adopter count rose, -1 when it fell, keep on equality) with probability
    ``u_t`` and otherwise best-responds on ``k`` freshly sampled contacts
    with weight ``1/k`` each.  Returns the new action vector and its adopter
    count.
    """
    n = x.shape[0]
    if include_self and with_replacement:
        x_new = _fast_step(x, committed, k, u_t, u_v, alpha, c_prev, c_now, rng)
    else:
        x_new = _scalar_step(
            x, committed, k, u_t, u_v, alpha, c_prev, c_now,
            include_self, with_replacement, rng,
        )
    return x_new, int(np.count_nonzero(x_new == 1))


def _trend_action(x_i: int, c_prev: int, c_now: int) -> int:
    if c_now > c_prev:
        return 1
    if c_now < c_prev:
        return -1
    return x_i


def _fast_step(x, committed, k, u_t, u_v, alpha, c_prev, c_now, rng):
    n = x.shape[0]
    u = rng.random((n, 1 + k))
    mode_trend = u[:, 0] < u_t
    draws = u[:, 1:]

    if u_v == 0.0:
        contacts = np.minimum((draws * n).astype(np.int64), n - 1)
        vals = x[contacts].astype(np.int64)
    else:
        # Only the adopter/non-adopter class of a contact enters the
        # best-response sum, so the within-class index is never materialized.
        na = int(np.count_nonzero(x == 1))
        if na == n:
            vals = np.ones((n, k), dtype=np.int64)
        elif na == 0:
            vals = np.full((n, k), -1, dtype=np.int64)
        else:
            p_a = (na * (1.0 + u_v)) / (n + u_v * na)
            vals = np.where(draws < p_a, 1, -1).astype(np.int64)

    s = vals.sum(axis=1)
    kt = k * (-alpha / (2.0 + alpha))
    d = s - kt
    eps = k * _TIE_TOL
    br = np.where(d > eps, 1, np.where(d < -eps, -1, x)).astype(np.int8)

    if c_now > c_prev:
        trend = np.ones(n, dtype=np.int8)
    elif c_now < c_prev:
        trend = np.full(n, -1, dtype=np.int8)
    else:
        trend = x

    x_new = np.where(mode_trend, trend, br).astype(np.int8)
    x_new[committed] = x[committed]
    return x_new


def _scalar_step(x, committed, k, u_t, u_v, alpha, c_prev, c_now,
                 include_self, with_replacement, rng):
    n = x.shape[0]
    kt = k * (-alpha / (2.0 + alpha))
    eps = k * _TIE_TOL
    x_new = x.copy()
    for i in range(n):
        if committed[i]:
            continue
        if rng.random() < u_t:
            x_new[i] = _trend_action(int(x[i]), c_prev, c_now)
            continue
        if u_v == 0.0:
            s = _draw_uniform_sum(x, i, k, include_self, with_replacement, rng)
        else:
            s = _draw_visibility_sum(x, i, k, u_v, include_self, with_replacement, rng)
        d = s - kt
        if d > eps:
            x_new[i] = 1
        elif d < -eps:
            x_new[i] = -1
    return x_new


def _draw_uniform_sum(x, i, k, include_self, with_replacement, rng):
    n = x.shape[0]
    s = 0
    seen: set[int] = set()
    for _ in range(k):
        while True:
            u = rng.random()
            if include_self:
                j = min(int(u * n), n - 1)
            else:
                j = min(int(u * (n - 1)), n - 2)
                if j >= i:
                    j += 1
            if with_replacement or j not in seen:
                break
        seen.add(j)
        s += int(x[j])
    return s


def _draw_visibility_sum(x, i, k, u_v, include_self, with_replacement, rng):
    n = x.shape[0]
    mask = np.ones(n, dtype=bool)
    if not include_self:
        mask[i] = False
    adopters = np.flatnonzero(mask & (x == 1))
    others = np.flatnonzero(mask & (x != 1))
    na, nd = adopters.size, others.size
    p_a = na * (1.0 + u_v) / (na * (1.0 + u_v) + nd)
    s = 0
    seen: set[int] = set()
    for _ in range(k):
        while True:
            u = rng.random()
            if nd == 0:
                j = int(adopters[min(int(u * na), na - 1)])
            elif na == 0:
                j = int(others[min(int(u * nd), nd - 1)])
            elif u < p_a:
                j = int(adopters[min(int(u / p_a * na), na - 1)])
            else:
                j = int(others[min(int((u - p_a) / (1.0 - p_a) * nd), nd - 1)])
            if with_replacement or j not in seen:
                break
        seen.add(j)
        s += int(x[j])
    return s
