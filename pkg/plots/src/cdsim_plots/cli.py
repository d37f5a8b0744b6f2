"""Command-line renderer: ``cdsim-plot <kind> --in <csv> --out <png/svg>``.

Kinds: ``envelope`` (ensemble CSV), ``heatmap`` and ``threshold-curve``
(threshold sweep CSV), ``network-state`` (edge list + trajectory snapshot).
Exit codes: 0 success, 2 schema or usage error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .render import (
    plot_envelope,
    plot_network_state,
    plot_threshold_curve,
    plot_threshold_heatmap,
)
from .schema import (
    SchemaError,
    read_edge_list,
    read_ensemble,
    read_thresholds,
    read_trajectory_snapshot,
)


def cmd_envelope(args) -> int:
    info = plot_envelope(read_ensemble(args.infile), args.out, title=args.title)
    print(f"envelope: {info['steps']} steps -> {args.out}")
    return 0


def cmd_heatmap(args) -> int:
    info = plot_threshold_heatmap(read_thresholds(args.infile), args.out)
    print(f"heatmap: {info['cells']} cells over ({info['x']}, {info['y']}) -> {args.out}")
    return 0


def cmd_threshold_curve(args) -> int:
    info = plot_threshold_curve(read_thresholds(args.infile), args.out)
    print(f"threshold-curve: {info['lines']} lines over {info['x']} -> {args.out}")
    return 0


def cmd_network_state(args) -> int:
    n, edges = read_edge_list(args.graph, symmetrize=args.symmetrize)
    t, x, y = read_trajectory_snapshot(args.infile, args.step)
    info = plot_network_state(n, edges, x, args.out, y=None if args.no_opinions else y)
    print(f"network-state: step {t}, {info['nodes']} nodes, "
          f"{info['distinct_colors']} action colors -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdsim-plot",
        description="Render figures from cdsim CSV outputs",
    )
    parser.add_argument("--version", action="version", version=f"cdsim-plot {__version__}")
    sub = parser.add_subparsers(dest="kind", required=True)

    p = sub.add_parser("envelope", help="quantile envelope of an ensemble CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--title")
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("heatmap", help="threshold heatmap from a sweep CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("threshold-curve", help="threshold curves from a sweep CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_threshold_curve)

    p = sub.add_parser("network-state", help="network snapshot colored by action")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--in", dest="infile", required=True,
                   help="trajectory CSV with snapshot columns")
    p.add_argument("--out", required=True)
    p.add_argument("--step", type=int, help="snapshot step (default: last recorded)")
    p.add_argument("--symmetrize", action="store_true")
    p.add_argument("--no-opinions", action="store_true",
                   help="ignore y_* columns even when present")
    p.set_defaults(func=cmd_network_state)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
