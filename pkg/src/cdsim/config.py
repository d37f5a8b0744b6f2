"""Run-configuration schema: JSON documents to validated simulation configs.

Unknown keys are rejected and every omitted field is filled with its default,
so the resolved document emitted next to the results replays the run
byte-identically.  Field errors carry dotted paths into the offending key.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .dynamics import RevisionSpec, SimulationConfig
from .errors import ConfigError
from .games import CoevolutionParams, CoordinationParams, PggParams
from .graph import (
    Graph,
    complete_graph,
    erdos_renyi_graph,
    load_edge_list,
    rank_nodes,
    ring_graph,
    row_normalize,
    star_graph,
    two_triangle_graph,
)
from .montecarlo import derive_seed
from .tempnet import ContactParams

__all__ = ["ResolvedRun", "parse_run_config", "resolved_json", "config_hash"]

_RANKING_SEED_TAG = 0xC0


def _require(mapping: dict, path: str, key: str):
    if key not in mapping:
        raise ConfigError(f"{path}.{key}: missing required field")
    return mapping[key]


def _check_keys(mapping: dict, path: str, allowed):
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}: unknown field")


def _number(value, path: str, lo=None, hi=None) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    v = float(value)
    if lo is not None and v < lo:
        raise ConfigError(f"{path}: must be >= {lo}, got {v}")
    if hi is not None and v > hi:
        raise ConfigError(f"{path}: must be <= {hi}, got {v}")
    return v


def _integer(value, path: str, lo=None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(f"{path}: must be >= {lo}, got {value}")
    return value


def _boolean(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{path}: expected a boolean, got {value!r}")
    return value


def _string(value, path: str, choices=None) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"{path}: expected a string, got {value!r}")
    if choices is not None and value not in choices:
        raise ConfigError(f"{path}: expected one of {sorted(choices)}, got {value!r}")
    return value


@dataclass
class ResolvedRun:
    """Validated run: the simulation config plus its replayable document."""

    sim: SimulationConfig
    resolved: dict
    graph_raw: Graph | None
    labels: tuple[str, ...] | None

    @property
    def hash(self) -> str:
        return config_hash(self.resolved)


def _parse_network(spec: dict, path: str):
    kind = _string(_require(spec, path, "kind"), f"{path}.kind",
                   {"file", "generator", "temporal"})
    if kind == "file":
        _check_keys(spec, path, {"kind", "path", "symmetrize", "normalize"})
        fpath = _string(_require(spec, path, "path"), f"{path}.path")
        symmetrize = _boolean(spec.get("symmetrize", False), f"{path}.symmetrize")
        normalize = _boolean(spec.get("normalize", True), f"{path}.normalize")
        try:
            with open(fpath) as fh:
                raw = load_edge_list(fh.read(), symmetrize=symmetrize)
        except OSError as exc:
            raise ConfigError(f"{path}.path: cannot read {fpath!r} ({exc})") from exc
        resolved = {"kind": "file", "path": fpath, "symmetrize": symmetrize,
                    "normalize": normalize}
        return raw, (row_normalize(raw) if normalize else raw), None, resolved
    if kind == "generator":
        _check_keys(spec, path, {"kind", "name", "n", "p", "gen_seed", "normalize"})
        name = _string(_require(spec, path, "name"), f"{path}.name",
                       {"complete", "star", "ring", "two_triangle", "erdos_renyi"})
        normalize = _boolean(spec.get("normalize", True), f"{path}.normalize")
        gen_seed = _integer(spec.get("gen_seed", 0), f"{path}.gen_seed", lo=0)
        n = spec.get("n")
        p = spec.get("p")
        if name == "two_triangle":
            raw = two_triangle_graph()
        elif name == "erdos_renyi":
            n = _integer(_require(spec, path, "n"), f"{path}.n", lo=2)
            p = _number(_require(spec, path, "p"), f"{path}.p", lo=0.0, hi=1.0)
            raw = erdos_renyi_graph(n, p, np.random.Generator(np.random.PCG64(gen_seed)))
        else:
            n = _integer(_require(spec, path, "n"), f"{path}.n", lo=2)
            raw = {"complete": complete_graph, "star": lambda m: star_graph(m - 1),
                   "ring": ring_graph}[name](n)
        resolved = {"kind": "generator", "name": name, "normalize": normalize,
                    "gen_seed": gen_seed}
        if n is not None:
            resolved["n"] = n
        if p is not None:
            resolved["p"] = p
        return raw, (row_normalize(raw) if normalize else raw), None, resolved
    _check_keys(spec, path, {"kind", "n", "k", "u_v", "include_self", "with_replacement"})
    n = _integer(_require(spec, path, "n"), f"{path}.n", lo=2)
    contacts = ContactParams(
        k=_integer(_require(spec, path, "k"), f"{path}.k", lo=1),
        u_v=_number(spec.get("u_v", 0.0), f"{path}.u_v", lo=0.0),
        include_self=_boolean(spec.get("include_self", True), f"{path}.include_self"),
        with_replacement=_boolean(spec.get("with_replacement", True), f"{path}.with_replacement"),
    )
    resolved = {"kind": "temporal", "n": n, "k": contacts.k, "u_v": contacts.u_v,
                "include_self": contacts.include_self,
                "with_replacement": contacts.with_replacement}
    return None, None, (n, contacts), resolved


def _parse_game(spec: dict, path: str, n: int | None):
    kind = _string(_require(spec, path, "kind"), f"{path}.kind",
                   {"coordination", "pgg", "coevolution"})
    if kind == "coordination":
        _check_keys(spec, path, {"kind", "alpha"})
        alpha = _number(spec.get("alpha", 0.0), f"{path}.alpha")
        if alpha <= -1:
            raise ConfigError(f"{path}.alpha: must exceed -1")
        return CoordinationParams(alpha), {"kind": kind, "alpha": alpha}
    if n is None:
        raise ConfigError(f"{path}: population size is needed for the {kind} game")
    if kind == "pgg":
        _check_keys(spec, path, {"kind", "r"})
        r = _number(_require(spec, path, "r"), f"{path}.r")
        return PggParams(r=r, n=n), {"kind": kind, "r": r}
    _check_keys(spec, path, {"kind", "inner", "gamma", "beta", "lambda", "r",
                             "opinion_weight_convention"})
    inner = _string(spec.get("inner", "coordination"), f"{path}.inner",
                    {"coordination", "pgg"})
    gamma = _number(spec.get("gamma", 1.0), f"{path}.gamma", lo=0.0)
    beta = _number(spec.get("beta", 1.0), f"{path}.beta", lo=0.0)
    lam = _number(spec.get("lambda", 1.0), f"{path}.lambda", lo=0.0)
    convention = _string(spec.get("opinion_weight_convention", "beta"),
                         f"{path}.opinion_weight_convention",
                         {"beta", "beta_times_one_minus_lambda"})
    r = spec.get("r")
    if inner == "pgg":
        r = _number(_require(spec, path, "r"), f"{path}.r")
    params = CoevolutionParams(n=n, gamma=gamma, beta=beta, lam=lam, inner=inner,
                               r=r, opinion_weight_convention=convention)
    resolved = {"kind": kind, "inner": inner, "gamma": gamma, "beta": beta,
                "lambda": lam, "opinion_weight_convention": convention}
    if r is not None:
        resolved["r"] = r
    return params, resolved


def _parse_committed(spec, path: str, n: int, graph_raw: Graph | None, seed: int):
    if spec is None:
        return (), {"nodes": []}
    _check_keys(spec, path, {"count", "nodes", "top_k", "ranking"})
    forms = [k for k in ("count", "nodes", "top_k") if k in spec]
    if len(forms) != 1:
        raise ConfigError(f"{path}: give exactly one of count / nodes / top_k")
    if "count" in spec:
        count = _integer(spec["count"], f"{path}.count", lo=0)
        if count > n:
            raise ConfigError(f"{path}.count: exceeds population size {n}")
        nodes = tuple(range(count))
    elif "nodes" in spec:
        raw_nodes = spec["nodes"]
        if not isinstance(raw_nodes, list):
            raise ConfigError(f"{path}.nodes: expected a list of node indices")
        nodes = tuple(_integer(v, f"{path}.nodes[{i}]", lo=0) for i, v in enumerate(raw_nodes))
        if any(v >= n for v in nodes):
            raise ConfigError(f"{path}.nodes: index out of range for n={n}")
    else:
        top_k = _integer(spec["top_k"], f"{path}.top_k", lo=0)
        if top_k > n:
            raise ConfigError(f"{path}.top_k: exceeds population size {n}")
        ranking = _string(spec.get("ranking", "eigenvector"), f"{path}.ranking",
                          {"eigenvector", "degree", "random"})
        if graph_raw is None:
            raise ConfigError(f"{path}.top_k: ranking needs a static network")
        rng = np.random.Generator(np.random.PCG64(derive_seed(seed, _RANKING_SEED_TAG)))
        order = rank_nodes(graph_raw, ranking, rng)
        nodes = tuple(int(i) for i in order[:top_k])
    return nodes, {"nodes": list(nodes)}


_TOP_KEYS = {"game", "network", "revision", "committed", "zeta0", "initial_x",
             "initial_y", "horizon", "snapshot_stride", "seed"}


def parse_run_config(doc: dict, seed_override: int | None = None) -> ResolvedRun:
    """Validate a config document and build the simulation config.

    ``seed_override`` (the CLI ``--seed`` flag) wins over the document's
    seed; the resolved document records whichever was used.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config root: expected an object")
    _check_keys(doc, "config", _TOP_KEYS)

    seed = doc.get("seed")
    if seed_override is not None:
        seed = seed_override
    if seed is None:
        raise ConfigError("config.seed: a seed is required (give it in the file or via --seed)")
    seed = _integer(seed, "config.seed", lo=0)

    graph_raw, graph_norm, temporal, net_resolved = _parse_network(
        _require(doc, "config", "network"), "network")
    if temporal is not None:
        n, contacts = temporal
        graph = None
    else:
        n, contacts = graph_norm.n, None
        graph = graph_norm

    game, game_resolved = _parse_game(_require(doc, "config", "game"), "game", n)

    rev_spec = _require(doc, "config", "revision")
    _check_keys(rev_spec, "revision", {"protocol", "schedule", "sigma", "u_t",
                                       "tie_rule", "logit_printed_sign"})
    revision = RevisionSpec(
        protocol=_string(_require(rev_spec, "revision", "protocol"), "revision.protocol"),
        schedule=_string(rev_spec.get("schedule", "synchronous"), "revision.schedule"),
        sigma=_number(rev_spec.get("sigma", 1.0), "revision.sigma", lo=0.0),
        u_t=_number(rev_spec.get("u_t", 0.0), "revision.u_t", lo=0.0, hi=1.0),
        tie_rule=_string(rev_spec.get("tie_rule", "keep"), "revision.tie_rule"),
        logit_printed_sign=_boolean(rev_spec.get("logit_printed_sign", False),
                                    "revision.logit_printed_sign"),
    )

    committed, committed_resolved = _parse_committed(
        doc.get("committed"), "committed", n, graph_raw, seed)

    zeta0 = _number(doc.get("zeta0", 0.0), "config.zeta0", lo=0.0, hi=1.0)
    horizon = _integer(doc.get("horizon", 1000), "config.horizon", lo=1)
    stride = _integer(doc.get("snapshot_stride", 0), "config.snapshot_stride", lo=0)

    initial_x = doc.get("initial_x")
    if initial_x is not None:
        if not isinstance(initial_x, list) or len(initial_x) != n:
            raise ConfigError(f"config.initial_x: expected a list of length {n}")
        if any(v not in (-1, 1) for v in initial_x):
            raise ConfigError("config.initial_x: entries must be -1 or +1")
        initial_x = tuple(int(v) for v in initial_x)
    initial_y = doc.get("initial_y")
    if initial_y is not None:
        if not isinstance(initial_y, list) or len(initial_y) != n:
            raise ConfigError(f"config.initial_y: expected a list of length {n}")
        initial_y = tuple(_number(v, f"config.initial_y[{i}]", lo=-1.0, hi=1.0)
                          for i, v in enumerate(initial_y))

    sim = SimulationConfig(
        game=game, revision=revision, graph=graph, contacts=contacts, n=n,
        committed_nodes=committed, zeta0=zeta0, initial_x=initial_x,
        initial_y=initial_y, horizon=horizon, snapshot_stride=stride, seed=seed,
    )
    sim.validate()

    resolved = {
        "game": game_resolved,
        "network": net_resolved,
        "revision": {
            "protocol": revision.protocol,
            "schedule": revision.schedule,
            "sigma": float(np.asarray(revision.sigma)),
            "u_t": revision.u_t,
            "tie_rule": revision.tie_rule,
            "logit_printed_sign": revision.logit_printed_sign,
        },
        "committed": committed_resolved,
        "zeta0": zeta0,
        "horizon": horizon,
        "snapshot_stride": stride,
        "seed": seed,
    }
    if initial_x is not None:
        resolved["initial_x"] = list(initial_x)
    if initial_y is not None:
        resolved["initial_y"] = list(initial_y)
    labels = graph_raw.labels if graph_raw is not None else None
    return ResolvedRun(sim=sim, resolved=resolved, graph_raw=graph_raw, labels=labels)


def resolved_json(resolved: dict) -> str:
    return json.dumps(resolved, indent=2, sort_keys=True) + "\n"


def config_hash(resolved: dict) -> str:
    canonical = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()
