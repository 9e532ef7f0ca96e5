"""Plain-text run artifacts: front tables, layouts, power grids, reports.

Every writer has a matching loader so artifacts can be re-read and
re-scored; all numbers are rendered with 6 significant digits in the C
locale, and a file re-saved after loading is byte-identical.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .field import PowerGrid
from .nsga2 import ParetoFront
from .objectives import CLASS_CHARS, CoverageReport, Layout, parse_layout

PARETO_HEADER = "index,phi1,phi2,tiles,bits"
_GRID_MAGIC = "# power grid"
_DB_REFERENCE = "dB re 1 (V/m)^2"


def fmt(x) -> str:
    """One number as a locale-independent 6-significant-digit literal."""
    return format(float(x) + 0.0, ".6g")  # + 0.0 turns -0.0 into 0


def _fmt_vec(v) -> str:
    return " ".join(fmt(c) for c in np.asarray(v, dtype=float))


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# Pareto front tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrontRow:
    """One line of a front table, as stored on disk."""

    index: int
    phi1: float
    phi2: float
    tiles: int
    bits: str


def front_table(front: ParetoFront) -> str:
    lines = [PARETO_HEADER]
    for o, sol in enumerate(front, start=1):
        lines.append(
            f"{o},{fmt(sol.shortfall)},{fmt(sol.tile_fraction)},"
            f"{sol.layout.installed_count},{sol.layout.to_bitstring()}"
        )
    return "\n".join(lines) + "\n"


def write_front(path, front: ParetoFront) -> None:
    """Front as a comma-separated table, one solution per row, by phi2."""
    Path(path).write_text(front_table(front))


def read_front(path) -> list[FrontRow]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != PARETO_HEADER:
        raise ValueError(f"{path}: not a front table (missing {PARETO_HEADER!r} header)")
    rows = []
    for ln in lines[1:]:
        if not ln.strip():
            continue
        idx, p1, p2, m, bits = ln.split(",")
        rows.append(FrontRow(int(idx), float(p1), float(p2), int(m), bits))
    return rows


def write_front_snapshots(directory, history) -> list[Path]:
    """One front table per snapshot, named by its iteration number."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for snap in history:
        p = out / f"front_iter{snap.iteration}.csv"
        write_front(p, snap.front)
        paths.append(p)
    return paths


# ---------------------------------------------------------------------------
# Layout files
# ---------------------------------------------------------------------------

def write_layout(path, layout: Layout) -> None:
    """Bit string plus a human-oriented index list comment."""
    indices = layout.installed_indices
    comment = ", ".join(str(i) for i in indices) if indices else "(none)"
    Path(path).write_text(f"{layout.to_bitstring()}\n# tiles: {comment}\n")


def read_layout(path, n_tiles: int) -> Layout:
    """First non-comment line parsed as a bit string or index list."""
    for line in Path(path).read_text().splitlines():
        text = line.strip()
        if text and not text.startswith("#"):
            return parse_layout(text, n_tiles)
    raise ValueError(f"{path}: no layout line found")


# ---------------------------------------------------------------------------
# Power grids
# ---------------------------------------------------------------------------

def grid_text(grid: PowerGrid) -> str:
    n_v, n_u = grid.shape
    head = [
        f"{_GRID_MAGIC} [{_DB_REFERENCE}]",
        f"# origin: {_fmt_vec(grid.origin)}",
        f"# axis_u: {_fmt_vec(grid.axis_u)}",
        f"# axis_v: {_fmt_vec(grid.axis_v)}",
        f"# extent: {fmt(grid.extent_u)} {fmt(grid.extent_v)}",
        f"# cells: {n_u} {n_v}",
        f"# height: {fmt(grid.height)}",
    ]
    rows = [",".join(fmt(v) for v in row) for row in grid.values_db]
    return "\n".join(head + rows) + "\n"


def write_power_grid(path, grid: PowerGrid) -> None:
    """Header comments, then one comma-separated line of dB values per row."""
    Path(path).write_text(grid_text(grid))


def read_power_grid(path) -> PowerGrid:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith(_GRID_MAGIC):
        raise ValueError(f"{path}: not a power grid file")
    head = {}
    body_at = None
    for i, ln in enumerate(lines[1:], start=1):
        if not ln.startswith("#"):
            body_at = i
            break
        key, _, rest = ln.lstrip("# ").partition(":")
        head[key.strip()] = rest.split()
    required = {"origin", "axis_u", "axis_v", "extent", "cells", "height"}
    missing = required - set(head)
    if missing or body_at is None:
        raise ValueError(f"{path}: malformed grid header (missing {sorted(missing)})")
    n_u, n_v = (int(c) for c in head["cells"])
    values = np.array(
        [[float(tok) for tok in ln.split(",")] for ln in lines[body_at:] if ln.strip()]
    )
    if values.shape != (n_v, n_u):
        raise ValueError(f"{path}: grid body is {values.shape}, header says {(n_v, n_u)}")
    return PowerGrid(
        origin=np.array([float(c) for c in head["origin"]]),
        axis_u=np.array([float(c) for c in head["axis_u"]]),
        axis_v=np.array([float(c) for c in head["axis_v"]]),
        extent_u=float(head["extent"][0]),
        extent_v=float(head["extent"][1]),
        height=float(head["height"][0]),
        values_db=values,
    )


# ---------------------------------------------------------------------------
# Coverage reports
# ---------------------------------------------------------------------------

def coverage_text(report: CoverageReport) -> str:
    """Stats plus the receiver-lattice class grid (C covered, o connected,
    . blackout); grid rows run along the short AoI axis, columns along the
    street."""
    n_rows, n_cols = report.lattice_shape
    lines = [
        f"min_db: {fmt(report.min_db)}",
        f"max_db: {fmt(report.max_db)}",
        f"avg_db: {fmt(report.avg_db)}",
        f"shortfall: {fmt(report.shortfall)}",
        f"receivers: {report.classes.size}",
        f"covered: {report.covered}",
        f"connected: {report.connected}",
        f"blackout: {report.blackout}",
        f"class grid ({n_rows} x {n_cols}; C covered, o connected, . blackout):",
    ]
    for row in report.class_grid():
        lines.append("".join(CLASS_CHARS[int(c)] for c in row))
    return "\n".join(lines) + "\n"


def write_coverage(path, report: CoverageReport) -> None:
    Path(path).write_text(coverage_text(report))


# ---------------------------------------------------------------------------
# Run manifests
# ---------------------------------------------------------------------------

def manifest_text(entries: dict) -> str:
    return "".join(f"{key}: {value}\n" for key, value in entries.items())


def write_manifest(path, entries: dict) -> None:
    """Key/value run record, one pair per line, in insertion order."""
    Path(path).write_text(manifest_text(entries))


def read_manifest(path) -> dict:
    entries = {}
    for ln in Path(path).read_text().splitlines():
        if not ln.strip():
            continue
        key, _, value = ln.partition(":")
        entries[key.strip()] = value.strip()
    return entries
