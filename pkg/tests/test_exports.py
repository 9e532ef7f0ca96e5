import hashlib

import numpy as np
import pytest

from emskin.exports import (
    PARETO_HEADER,
    coverage_text,
    file_sha256,
    fmt,
    front_table,
    grid_text,
    manifest_text,
    read_front,
    read_layout,
    read_manifest,
    read_power_grid,
    write_coverage,
    write_front,
    write_front_snapshots,
    write_layout,
    write_manifest,
    write_power_grid,
)
from emskin.field import GridRegion, sample_power_grid, tile_power_matrix
from emskin.nsga2 import GaConfig, evolve
from emskin.objectives import Layout, coverage_report, phi2, shortfall_from_powers


@pytest.fixture(scope="module")
def toy_run(toy, paper_cfg):
    ga = GaConfig(population_size=24, max_iterations=60, rng_seed=0, snapshot_every=20)
    return evolve(ga, toy, paper_cfg)


def test_fmt_formatting():
    assert fmt(0.1234567) == "0.123457"
    assert fmt(1234567.0) == "1.23457e+06"
    assert fmt(-0.0) == "0"  # no negative zero in artifacts
    assert fmt(np.float64(2.5)) == "2.5"
    assert fmt(0) == "0"


def test_front_table_round_trip(tmp_path, toy_run):
    path = tmp_path / "pareto.csv"
    write_front(path, toy_run.front)
    text = path.read_text()
    assert text.splitlines()[0] == PARETO_HEADER
    rows = read_front(path)
    assert len(rows) == len(toy_run.front)
    for row, sol in zip(rows, toy_run.front):
        assert row.index == rows.index(row) + 1
        assert row.bits == sol.layout.to_bitstring()
        assert row.tiles == sol.layout.installed_count
        # read-back equals the 6-significant-digit rendering of the run value
        assert row.phi1 == float(fmt(sol.shortfall))
        assert row.phi2 == float(fmt(sol.tile_fraction))


def test_front_rows_rescore_identically(tmp_path, toy, paper_cfg, toy_run):
    """Layouts re-read from disk reproduce the stored objective values."""
    path = tmp_path / "pareto.csv"
    write_front(path, toy_run.front)
    pm = tile_power_matrix(toy, paper_cfg, toy.receivers)
    for row in read_front(path):
        layout = Layout.from_bitstring(row.bits)
        powers = layout.bits.astype(float) @ pm
        again1 = shortfall_from_powers(powers, toy.power_threshold_linear)
        assert fmt(again1) == fmt(row.phi1)
        assert fmt(phi2(layout)) == fmt(row.phi2)


def test_read_front_rejects_other_files(tmp_path):
    p = tmp_path / "other.csv"
    p.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError, match="front table"):
        read_front(p)


def test_front_snapshots_named_by_iteration(tmp_path, toy_run):
    paths = write_front_snapshots(tmp_path / "snaps", toy_run.history)
    assert [p.name for p in paths] == ["front_iter20.csv", "front_iter40.csv", "front_iter60.csv"]
    last = read_front(paths[-1])
    assert [r.bits for r in last] == [s.layout.to_bitstring() for s in toy_run.front]


def test_layout_file_round_trip(tmp_path):
    layout = Layout.from_indices([3, 4, 11], 12)
    p = tmp_path / "layout.txt"
    write_layout(p, layout)
    text = p.read_text()
    assert text.splitlines()[0] == layout.to_bitstring()
    assert "# tiles: 3, 4, 11" in text
    back = read_layout(p, 12)
    np.testing.assert_array_equal(back.bits, layout.bits)


def test_empty_layout_round_trip(tmp_path):
    layout = Layout.from_indices([], 8)
    p = tmp_path / "layout.txt"
    write_layout(p, layout)
    assert "(none)" in p.read_text()
    back = read_layout(p, 8)
    assert back.installed_count == 0


def test_read_layout_needs_a_layout_line(tmp_path):
    p = tmp_path / "comments.txt"
    p.write_text("# nothing here\n\n# still nothing\n")
    with pytest.raises(ValueError, match="no layout line"):
        read_layout(p, 8)


def test_power_grid_round_trip_is_byte_exact(tmp_path, toy, paper_cfg):
    bits = Layout.from_indices([2, 5, 6, 9], 12).bits
    region = GridRegion(
        center_xy=(16.0, 19.0), size=(8.0, 6.0), resolution=(9, 7),
        height=1.5, azimuth_deg=50.0,
    )
    grid = sample_power_grid(bits, region, toy, paper_cfg)
    p = tmp_path / "grid.csv"
    write_power_grid(p, grid)
    back = read_power_grid(p)
    assert back.shape == grid.shape == (7, 9)
    assert grid_text(back) == p.read_text()  # save(load(x)) == x
    # geometry survives the 6-digit rendering exactly for these inputs
    np.testing.assert_array_equal(back.axis_u, grid.axis_u.round(12).round(6))
    assert back.extent_u == 8.0 and back.height == 1.5


def test_read_power_grid_rejects_malformed(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("not a grid\n")
    with pytest.raises(ValueError, match="not a power grid"):
        read_power_grid(p)
    p.write_text("# power grid [dB re 1 (V/m)^2]\n# origin: 0 0 0\n1,2\n")
    with pytest.raises(ValueError, match="header"):
        read_power_grid(p)
    p.write_text(
        "# power grid [dB re 1 (V/m)^2]\n# origin: 0 0 0\n# axis_u: 1 0 0\n"
        "# axis_v: 0 1 0\n# extent: 2 2\n# cells: 2 2\n# height: 1.5\n1,2\n"
    )
    with pytest.raises(ValueError, match="grid body"):
        read_power_grid(p)


def test_coverage_text_contents(tmp_path, toy, paper_cfg):
    layout = Layout.from_indices(list(range(1, 13)), 12)
    report = coverage_report(layout, toy, paper_cfg)
    text = coverage_text(report)
    lines = text.splitlines()
    assert lines[0] == f"min_db: {fmt(report.min_db)}"
    assert f"shortfall: {fmt(report.shortfall)}" in lines
    assert f"receivers: {report.classes.size}" in lines
    assert f"covered: {report.covered}" in lines
    grid_rows = lines[lines.index(next(l for l in lines if l.startswith("class grid"))) + 1:]
    assert len(grid_rows) == report.lattice_shape[0]
    assert all(len(r) == report.lattice_shape[1] for r in grid_rows)
    assert set("".join(grid_rows)) <= set("Co.")
    assert "".join(grid_rows).count("C") == report.covered
    out = tmp_path / "coverage.txt"
    write_coverage(out, report)
    assert out.read_text() == text


def test_manifest_round_trip(tmp_path):
    entries = {"tool": "emskin 0.1.0", "ga.population_size": 120, "duration_s": 1.25}
    p = tmp_path / "manifest.txt"
    write_manifest(p, entries)
    assert p.read_text() == manifest_text(entries)
    assert p.read_text().splitlines()[0] == "tool: emskin 0.1.0"
    back = read_manifest(p)
    assert back == {"tool": "emskin 0.1.0", "ga.population_size": "120", "duration_s": "1.25"}
    assert list(back) == list(entries)  # order preserved


def test_file_sha256(tmp_path):
    p = tmp_path / "blob.txt"
    p.write_bytes(b"facade\n")
    assert file_sha256(p) == hashlib.sha256(b"facade\n").hexdigest()
