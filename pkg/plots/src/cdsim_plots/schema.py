"""Readers for the simulator's documented CSV and edge-list formats.

Every reader validates the header it depends on and raises
:class:`SchemaError` with the offending column or line, so a format drift in
the producing tool surfaces as an actionable message instead of a misrendered
figure.
"""

from __future__ import annotations

import csv

import numpy as np

ENSEMBLE_COLUMNS = ("t", "q025", "q500", "q975", "mean_zeta")
THRESHOLD_COLUMNS = ("k", "alpha", "u_t", "u_v", "zeta_star")


class SchemaError(Exception):
    """Input file does not match the documented format."""


def _read_rows(path: str) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise SchemaError(f"cannot read {path!r}: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: empty CSV")
    return rows[0], rows[1:]


def _numeric_columns(path, header, rows, wanted) -> dict[str, np.ndarray]:
    missing = [c for c in wanted if c not in header]
    if missing:
        raise SchemaError(
            f"{path}: missing column {missing[0]!r} (found: {', '.join(header)})"
        )
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    idx = {c: header.index(c) for c in wanted}
    out: dict[str, np.ndarray] = {}
    for c in wanted:
        try:
            out[c] = np.array([float(r[idx[c]]) for r in rows])
        except (ValueError, IndexError) as exc:
            raise SchemaError(f"{path}: column {c!r} holds a non-numeric value") from exc
    return out


def read_ensemble(path: str) -> dict[str, np.ndarray]:
    """Ensemble envelope: ``t,q025,q500,q975,mean_zeta`` per time step."""
    header, rows = _read_rows(path)
    data = _numeric_columns(path, header, rows, ENSEMBLE_COLUMNS)
    if np.any(data["q025"] > data["q500"]) or np.any(data["q500"] > data["q975"]):
        raise SchemaError(f"{path}: quantile columns are not ordered")
    return data


def read_thresholds(path: str) -> dict[str, np.ndarray]:
    """Threshold sweep: ``k,alpha,u_t,u_v,zeta_star`` rows."""
    header, rows = _read_rows(path)
    return _numeric_columns(path, header, rows, THRESHOLD_COLUMNS)


def read_trajectory_snapshot(path: str, step: int | None = None):
    """State snapshot from a trajectory CSV with ``x_*`` columns.

    Returns ``(t, x, y)`` for the requested step (defaults to the last
    recorded snapshot); ``y`` is None when the file has no opinion columns.
    """
    header, rows = _read_rows(path)
    if header[:2] != ["t", "zeta"]:
        raise SchemaError(f"{path}: expected a trajectory CSV starting with t,zeta")
    x_cols = [c for c in header if c.startswith("x_")]
    y_cols = [c for c in header if c.startswith("y_")]
    if not x_cols:
        raise SchemaError(
            f"{path}: no x_* snapshot columns; rerun the simulation with a snapshot stride"
        )
    times = [int(float(r[0])) for r in rows]
    if step is None:
        row = rows[-1]
        t = times[-1]
    elif step in times:
        row = rows[times.index(step)]
        t = step
    else:
        raise SchemaError(f"{path}: no snapshot recorded at step {step} (have {times})")
    xi = [header.index(c) for c in x_cols]
    x = np.array([int(float(row[i])) for i in xi])
    y = None
    if y_cols:
        yi = [header.index(c) for c in y_cols]
        y = np.array([float(row[i]) for i in yi])
    return t, x, y


def read_edge_list(path: str, symmetrize: bool = False):
    """Edge-list document: ``src dst [weight]`` lines, ``#`` comments.

    Returns ``(n, edges)`` with edges as ``(i, j, w)`` triples; labels map to
    dense indices in first-appearance order.
    """
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(f"cannot read {path!r}: {exc}") from exc
    raw = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) not in (2, 3):
            raise SchemaError(f"{path}:{lineno}: expected 'src dst [weight]'")
        w = 1.0
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise SchemaError(f"{path}:{lineno}: bad weight {parts[2]!r}") from None
        raw.append((parts[0], parts[1], w))
    if not raw:
        raise SchemaError(f"{path}: no edges")
    tokens = [t for s, d, _ in raw for t in (s, d)]
    if all(t.isdigit() for t in tokens):
        index = {t: int(t) for t in tokens}
        n = max(index.values()) + 1
    else:
        index = {}
        for t in tokens:
            index.setdefault(t, len(index))
        n = len(index)
    edges = []
    for s, d, w in raw:
        i, j = index[s], index[d]
        edges.append((i, j, w))
        if symmetrize and i != j:
            edges.append((j, i, w))
    return n, edges
