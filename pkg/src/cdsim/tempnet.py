"""Temporal contact generation for activity-driven interaction networks.

Each agent independently draws ``k`` social contacts per time step.  Draws
are uniform over the population, or biased toward current adopters of +1
when the visibility boost ``u_v`` is positive: an adopter is sampled with
probability ``(1 + u_v) / (n * (1 + u_v * zeta))`` per draw and a
non-adopter with probability ``1 / (n * (1 + u_v * zeta))``, which sums to
one for every adopter fraction ``zeta`` and reduces to ``1/n`` at
``u_v = 0``.  Every drawn contact carries weight ``1/k``; repeated draws of
the same node accumulate.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "ContactParams",
    "sample_contacts_uniform",
    "sample_contacts_visibility",
    "contact_probabilities",
    "to_weighted_lists",
]


@dataclass(frozen=True)
class ContactParams:
    """Contact-generation knobs: ``k`` draws per agent per step, visibility
    boost ``u_v``, and the self/replacement toggles for sensitivity checks."""

    k: int
    u_v: float = 0.0
    include_self: bool = True
    with_replacement: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("k must be at least 1")
        if self.k < 2:
            warnings.warn("contact counts below k = 2 are outside the model's regime",
                          stacklevel=3)
        if self.u_v < 0:
            raise DomainError("visibility boost must be nonnegative")


def _pool_size(n: int, params: ContactParams) -> int:
    return n if params.include_self else n - 1


def _check_population(n: int, params: ContactParams):
    if n < 2:
        raise DomainError("contact sampling needs n >= 2")
    if not params.with_replacement and params.k > _pool_size(n, params):
        raise DomainError("cannot draw k distinct contacts from a smaller pool")


def sample_contacts_uniform(n: int, params: ContactParams, rng: np.random.Generator) -> np.ndarray:
    """Draw each agent's ``k`` contacts uniformly from the population.

    Returns an ``(n, k)`` array of node indices; row ``i`` lists agent ``i``'s
    draws in order.  Each draw hits any admissible node with equal
    probability (``1/n`` with the default self-inclusive replacement mode).
    """
    _check_population(n, params)
    k = params.k
    if params.with_replacement:
        u = rng.random((n, k))
        if params.include_self:
            return np.minimum((u * n).astype(np.int64), n - 1)
        j = np.minimum((u * (n - 1)).astype(np.int64), n - 2)
        j += j >= np.arange(n)[:, None]
        return j
    draws = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        seen: set[int] = set()
        for d in range(k):
            while True:
                u = rng.random()
                if params.include_self:
                    j = min(int(u * n), n - 1)
                else:
                    j = min(int(u * (n - 1)), n - 2)
                    if j >= i:
                        j += 1
                if j not in seen:
                    break
            seen.add(j)
            draws[i, d] = j
    return draws


def sample_contacts_visibility(
    n: int, params: ContactParams, x, rng: np.random.Generator
) -> np.ndarray:
    """Draw contacts with adopters of +1 boosted by the visibility factor.

    Sampling is by inverse-CDF composition: one uniform decides the adopter /
    non-adopter class (total adopter mass ``n_a (1+u_v) / (n + u_v n_a)``)
    and its rescaled remainder picks uniformly inside the class.
    """
    _check_population(n, params)
    x = np.asarray(x)
    if x.shape != (n,):
        raise DomainError("action vector length mismatch")
    if params.u_v == 0.0:
        return sample_contacts_uniform(n, params, rng)
    k = params.k
    uv = params.u_v

    if params.include_self and params.with_replacement:
        adopters = np.flatnonzero(x == 1)
        others = np.flatnonzero(x != 1)
        na, nd = adopters.size, others.size
        if na == 0 or nd == 0:
            # Homogeneous population: the bias cancels and draws are uniform.
            return sample_contacts_uniform(n, params, rng)
        p_a = na * (1.0 + uv) / (n + uv * na)
        u = rng.random((n, k))
        take_a = u < p_a
        out = np.empty((n, k), dtype=np.int64)
        ia = np.minimum((u[take_a] / p_a * na).astype(np.int64), na - 1)
        out[take_a] = adopters[ia]
        id_ = np.minimum(((u[~take_a] - p_a) / (1.0 - p_a) * nd).astype(np.int64), nd - 1)
        out[~take_a] = others[id_]
        return out

    draws = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        mask = np.ones(n, dtype=bool)
        if not params.include_self:
            mask[i] = False
        adopters = np.flatnonzero(mask & (x == 1))
        others = np.flatnonzero(mask & (x != 1))
        na, nd = adopters.size, others.size
        p_a = na * (1.0 + uv) / (na * (1.0 + uv) + nd)
        seen: set[int] = set()
        for d in range(k):
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
                if params.with_replacement or j not in seen:
                    break
            seen.add(j)
            draws[i, d] = j
    return draws


def contact_probabilities(n: int, params: ContactParams, x) -> np.ndarray:
    """Per-node probability of being hit by a single contact draw.

    Analytic counterpart of the samplers in the default self-inclusive
    replacement mode; sums to one for every adopter fraction.
    """
    if n < 2:
        raise DomainError("contact sampling needs n >= 2")
    x = np.asarray(x)
    if x.shape != (n,):
        raise DomainError("action vector length mismatch")
    na = int(np.count_nonzero(x == 1))
    zeta = na / n
    denom = n * (1.0 + params.u_v * zeta)
    p = np.where(x == 1, (1.0 + params.u_v) / denom, 1.0 / denom)
    return p


def to_weighted_lists(draws: np.ndarray, k: int) -> list[dict[int, float]]:
    """Collapse raw draws into per-agent ``{neighbor: weight}`` maps, with
    weight ``1/k`` per draw and duplicates accumulating."""
    out = []
    for row in draws:
        w: dict[int, float] = {}
        for j in row:
            w[int(j)] = w.get(int(j), 0.0) + 1.0 / k
        out.append(w)
    return out
