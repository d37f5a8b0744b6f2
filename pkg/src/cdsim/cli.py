"""Command-line front end.

Subcommands: ``simulate``, ``ensemble``, ``thresholds``, ``nash``,
``controlset``, ``graph-info``.  Every randomized command takes an explicit
seed (in the config or via ``--seed``) or generates one and prints it; the
resolved configuration written next to the results replays the run
byte-identically.  Exit codes: 0 success, 2 configuration error, 3 runtime or
domain error.  Set ``CD_LOG`` to a level name for diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import find_nash_bruteforce, threshold_sweep, write_threshold_csv
from .config import parse_run_config, resolved_json
from .coevolution import CoevolutionUpdateRule, min_control_set_greedy
from .dynamics import simulate, write_trajectory_csv
from .errors import CdsimError, ConfigError, ParseError
from .games import CoevolutionParams, CoordinationParams, PggParams
from .graph import eigenvector_centrality, load_edge_list, rank_nodes, row_normalize, social_power
from .montecarlo import derive_seed, run_ensemble, write_ensemble_csv, write_ensemble_summary

log = logging.getLogger("cdsim")


def _setup_logging():
    level = os.environ.get("CD_LOG")
    if level:
        logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO),
                            stream=sys.stderr,
                            format="%(levelname)s %(name)s: %(message)s")


def _out_dir(arg: str | None) -> Path:
    out = Path(arg) if arg else Path.cwd()
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_config_document(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from exc


def _resolve_seed(doc: dict, flag_seed: int | None) -> int:
    if flag_seed is not None:
        return flag_seed
    if isinstance(doc, dict) and doc.get("seed") is not None:
        return doc["seed"]
    seed = int.from_bytes(os.urandom(8), "big") >> 1
    print(f"generated seed: {seed}")
    return seed


def _write(path: Path, content: str):
    path.write_text(content)
    log.info("wrote %s", path)


def _emit_labels(run, out: Path):
    if run.labels is not None:
        _write(out / "labels.json",
               json.dumps({"labels": list(run.labels)}, indent=2, sort_keys=True) + "\n")


def _load_graph_arg(path: str, symmetrize: bool, normalize: bool):
    try:
        with open(path) as fh:
            raw = load_edge_list(fh.read(), symmetrize=symmetrize)
    except OSError as exc:
        raise ConfigError(f"cannot read graph file {path!r}: {exc}") from exc
    return raw, (row_normalize(raw) if normalize else raw)


def _parse_values(text: str, name: str) -> list[float]:
    """Comma list (``0,0.5,1``) or inclusive range (``lo:hi:step``)."""
    text = text.strip()
    if not text:
        raise ConfigError(f"{name}: empty range")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{name}: range syntax is lo:hi:step")
        try:
            lo, hi, step = (float(p) for p in parts)
        except ValueError:
            raise ConfigError(f"{name}: bad number in range {text!r}") from None
        if step <= 0 or hi < lo:
            raise ConfigError(f"{name}: need step > 0 and hi >= lo")
        count = int(round((hi - lo) / step)) + 1
        return [lo + i * step for i in range(count) if lo + i * step <= hi + 1e-12]
    try:
        values = [float(p) for p in text.split(",") if p.strip() != ""]
    except ValueError:
        raise ConfigError(f"{name}: bad number in list {text!r}") from None
    if not values:
        raise ConfigError(f"{name}: empty range")
    return values


def cmd_simulate(args) -> int:
    doc = _load_config_document(args.config)
    run = parse_run_config(doc, _resolve_seed(doc, args.seed))
    out = _out_dir(args.out)
    traj = simulate(run.sim)
    write_trajectory_csv(traj, out / "trajectory.csv", meta={"config_hash": run.hash})
    _write(out / "resolved_config.json", resolved_json(run.resolved))
    _emit_labels(run, out)
    print(f"simulate: {traj.steps} steps, final zeta {traj.zeta[-1]:.6f}, "
          f"absorbed at {traj.absorbed_at}")
    return 0


def cmd_ensemble(args) -> int:
    if args.runs < 1:
        raise ConfigError("--runs must be at least 1")
    doc = _load_config_document(args.config)
    run = parse_run_config(doc, _resolve_seed(doc, args.seed))
    out = _out_dir(args.out)
    result = run_ensemble(run.sim, args.runs, run.sim.seed, threads=args.threads)
    write_ensemble_csv(result, out / "ensemble.csv")
    write_ensemble_summary(result, out / "ensemble_summary.json",
                           meta={"config_hash": run.hash})
    _write(out / "resolved_config.json", resolved_json(run.resolved))
    _emit_labels(run, out)
    print(f"ensemble: {args.runs} runs, change probability {result.change_probability:.3f}")
    return 0


def cmd_thresholds(args) -> int:
    alphas = _parse_values(args.alpha, "--alpha")
    u_ts = _parse_values(args.u_t, "--u-t")
    u_vs = _parse_values(args.u_v, "--u-v")
    if any(a <= -1 for a in alphas):
        raise ConfigError("--alpha: values must exceed -1")
    if any(not 0 <= u <= 1 for u in u_ts):
        raise ConfigError("--u-t: values must lie in [0, 1]")
    if any(u < 0 for u in u_vs):
        raise ConfigError("--u-v: values must be nonnegative")
    rows = threshold_sweep(args.k, alphas, u_ts, u_vs)
    out = _out_dir(args.out)
    write_threshold_csv(rows, out / "thresholds.csv")
    print(f"thresholds: wrote {len(rows)} rows")
    return 0


def cmd_nash(args) -> int:
    if (args.alpha is None) == (args.r is None):
        raise ConfigError("give exactly one of --alpha (coordination) or --r (public goods)")
    raw, g = _load_graph_arg(args.graph, args.symmetrize, not args.raw_weights)
    if args.alpha is not None:
        game = CoordinationParams(args.alpha)
        game_doc = {"kind": "coordination", "alpha": args.alpha}
    else:
        game = PggParams(r=args.r, n=g.n)
        game_doc = {"kind": "pgg", "r": args.r}
    profiles = find_nash_bruteforce(g, game)
    payload = {
        "n": g.n,
        "game": game_doc,
        "count": len(profiles),
        "equilibria": [[int(v) for v in p] for p in profiles],
    }
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        _write(_out_dir(args.out) / "nash.json", text)
    print(f"nash: {len(profiles)} equilibria on n={g.n}")
    if not args.out:
        print(text, end="")
    return 0


def cmd_controlset(args) -> int:
    raw, g = _load_graph_arg(args.graph, args.symmetrize, True)
    n = g.n
    params = CoevolutionParams(
        n=n, gamma=args.gamma, beta=args.beta, lam=args.lam,
        inner=args.inner, r=args.r,
    )
    rule = CoevolutionUpdateRule(params, g, g)
    if args.committed_nodes:
        nodes = [int(v) for v in args.committed_nodes.split(",")]
        if any(not 0 <= v < n for v in nodes):
            raise ConfigError("--committed-nodes: index out of range")
        from .coevolution import reach_collective_change

        outcome = reach_collective_change(rule, nodes)
        payload = {
            "committed_nodes": nodes,
            "changed": outcome.changed,
            "rounds": outcome.rounds,
            "final_zeta": outcome.final.zeta,
            "ranking_used": None,
        }
    else:
        rng = None
        if args.ranking == "random":
            seed = args.seed
            if seed is None:
                seed = int.from_bytes(os.urandom(8), "big") >> 1
                print(f"generated seed: {seed}")
            rng = np.random.Generator(np.random.PCG64(derive_seed(seed, 0xC0)))
        ranking = rank_nodes(raw, args.ranking, rng)
        report = min_control_set_greedy(rule, ranking)
        payload = report.to_dict()
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        _write(_out_dir(args.out) / "controlset.json", text)
    print(f"controlset: changed={payload['changed']} "
          f"committed={len(payload['committed_nodes'])}")
    if not args.out:
        print(text, end="")
    return 0


def cmd_graph_info(args) -> int:
    raw, g = _load_graph_arg(args.graph, args.symmetrize, False)
    info = {
        "n": raw.n,
        "arcs": len(raw.edges()),
        "total_weight": float(raw.matrix.sum()),
        "undirected_connected": raw.undirected_connected(),
        "labels": list(raw.labels) if raw.labels else None,
    }
    if info["undirected_connected"]:
        cent = eigenvector_centrality(raw)
        order = np.argsort(-cent, kind="stable")[: min(10, raw.n)]
        info["top_eigenvector_nodes"] = [int(i) for i in order]
    try:
        info["social_power_defined"] = bool(social_power(row_normalize(raw)).size)
    except CdsimError:
        info["social_power_defined"] = False
    text = json.dumps(info, indent=2, sort_keys=True) + "\n"
    if args.out:
        _write(_out_dir(args.out) / "graph_info.json", text)
    print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdsim",
        description="Evolutionary-game simulator for collective change on networks",
    )
    parser.add_argument("--version", action="version", version=f"cdsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one seeded trajectory")
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out", help="output directory (default: cwd)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ensemble", help="run a seeded ensemble and pool statistics")
    p.add_argument("--config", required=True)
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="output directory (default: cwd)")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("thresholds", help="closed-form adoption threshold sweep")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", required=True, help="comma list or lo:hi:step")
    p.add_argument("--u-t", dest="u_t", default="0", help="comma list or lo:hi:step")
    p.add_argument("--u-v", dest="u_v", default="0", help="comma list or lo:hi:step")
    p.add_argument("--out", help="output directory (default: cwd)")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("nash", help="brute-force Nash enumeration on a small graph")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--alpha", type=float, help="coordination game advantage")
    p.add_argument("--r", type=float, help="public goods multiplier")
    p.add_argument("--symmetrize", action="store_true")
    p.add_argument("--raw-weights", action="store_true",
                   help="skip row normalization of the loaded graph")
    p.add_argument("--out")
    p.set_defaults(func=cmd_nash)

    p = sub.add_parser("controlset", help="committed-minority control-set search")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--inner", choices=("coordination", "pgg"), default="coordination")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--r", type=float, help="public goods multiplier (pgg inner game)")
    p.add_argument("--ranking", choices=("eigenvector", "degree", "random"),
                   default="eigenvector")
    p.add_argument("--committed-nodes", help="comma list: check this exact set instead")
    p.add_argument("--symmetrize", action="store_true")
    p.add_argument("--seed", type=int, help="seed for the random ranking baseline")
    p.add_argument("--out")
    p.set_defaults(func=cmd_controlset)

    p = sub.add_parser("graph-info", help="summarize an edge-list graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--symmetrize", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_graph_info)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CdsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
