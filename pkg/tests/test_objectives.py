import numpy as np
import pytest

from emskin.field import power_to_db
from emskin.objectives import (
    BLACKOUT,
    COVERED,
    CoverageReport,
    Layout,
    LayoutError,
    coverage_report,
    heaviside,
    parse_layout,
    phi1,
    phi2,
    shortfall_from_powers,
    validate_layout,
)


def test_heaviside_definition():
    assert heaviside(0.5) == 1.0
    assert heaviside(0.0) == 0.0  # at-threshold receivers count as covered
    assert heaviside(-1.0) == 0.0


def test_shortfall_boundary_cases():
    th = 1e-7
    assert shortfall_from_powers([th, th, th], th) == 0.0
    assert shortfall_from_powers([0.0, 0.0], th) == 1.0
    assert shortfall_from_powers([0.5 * th, th], th) == pytest.approx(0.25)


def test_layout_construction_and_round_trips():
    lay = Layout.from_indices([3, 4, 12], 12)
    assert lay.installed_count == 3
    assert lay.installed_indices == [3, 4, 12]
    assert Layout.from_bitstring(lay.to_bitstring()) == lay
    assert hash(Layout.from_bitstring(lay.to_bitstring())) == hash(lay)
    assert len(lay) == 12
    assert Layout.empty(5).installed_count == 0
    with pytest.raises(LayoutError):
        Layout.from_indices([0], 12)
    with pytest.raises(LayoutError):
        Layout.from_indices([13], 12)
    with pytest.raises(LayoutError):
        Layout.from_bitstring("0012")
    with pytest.raises(LayoutError):
        Layout(np.array([0, 2, 1]))
    with pytest.raises(LayoutError):
        Layout(np.zeros((2, 2)))


def test_layout_bits_are_frozen():
    lay = Layout.from_indices([1], 4)
    with pytest.raises(ValueError):
        lay.bits[0] = False


def test_parse_layout_formats():
    assert parse_layout("0101", 4) == Layout.from_indices([2, 4], 4)
    assert parse_layout("2, 4", 4) == Layout.from_indices([2, 4], 4)
    assert parse_layout("2 4", 4) == Layout.from_indices([2, 4], 4)
    assert parse_layout("3", 60).installed_indices == [3]
    with pytest.raises(LayoutError, match="expected 60"):
        parse_layout("0110", 60)
    with pytest.raises(LayoutError):
        parse_layout("a,b", 4)
    with pytest.raises(LayoutError):
        parse_layout("  ", 4)


def test_validate_layout_reports_masked_cells(masked):
    bad_cell = int(np.flatnonzero(~masked.facade.admissible)[0]) + 1
    lay = Layout.from_indices([bad_cell], masked.n_tiles)
    with pytest.raises(LayoutError, match=str(bad_cell)):
        validate_layout(lay, masked)
    with pytest.raises(LayoutError, match="bits"):
        validate_layout(Layout.empty(3), masked)
    ok = Layout.from_indices([int(np.flatnonzero(masked.facade.admissible)[0]) + 1],
                             masked.n_tiles)
    validate_layout(ok, masked)


def test_phi2_is_exact_fraction(toy):
    assert phi2(Layout.from_indices(list(range(1, 13)), 12)) == 1.0
    assert phi2(Layout.empty(12)) == 0.0
    assert phi2(Layout.from_indices([1, 2, 3], 12)) == pytest.approx(3 / 12)
    # the reference skin: 12 of 60 tiles is exactly one fifth
    assert phi2(Layout.from_indices(list(range(1, 13)), 60)) == 0.2


def test_phi1_all_off_is_one(toy, paper_cfg):
    assert phi1(Layout.empty(12), toy.receivers, toy, paper_cfg) == 1.0


def test_phi1_anti_monotone_and_order_invariant(toy, paper_cfg, rng):
    for _ in range(200):
        small_bits = rng.integers(0, 2, 12).astype(bool)
        big_bits = small_bits | rng.integers(0, 2, 12).astype(bool)
        small = phi1(Layout(small_bits), toy.receivers, toy, paper_cfg)
        big = phi1(Layout(big_bits), toy.receivers, toy, paper_cfg)
        assert big <= small
    perm = rng.permutation(len(toy.receivers))
    lay = Layout(rng.integers(0, 2, 12).astype(bool))
    assert phi1(lay, toy.receivers[perm], toy, paper_cfg) == pytest.approx(
        phi1(lay, toy.receivers, toy, paper_cfg), rel=1e-12
    )


def test_phi1_zero_iff_all_covered(toy, paper_cfg, rng):
    hits = 0
    for _ in range(200):
        lay = Layout(rng.integers(0, 2, 12).astype(bool))
        rep = coverage_report(lay, toy, paper_cfg)
        assert (rep.shortfall == 0.0) == (rep.covered == rep.classes.size)
        hits += rep.shortfall == 0.0
    assert 0 < hits < 200  # both sides of the equivalence got exercised


def test_phi1_rejects_masked_layouts(masked, paper_cfg):
    bad_cell = int(np.flatnonzero(~masked.facade.admissible)[0]) + 1
    lay = Layout.from_indices([bad_cell], masked.n_tiles)
    with pytest.raises(LayoutError):
        phi1(lay, masked.receivers, masked, paper_cfg)


def test_coverage_report_statistics(toy, paper_cfg, rng):
    for _ in range(100):
        lay = Layout(rng.integers(0, 2, 12).astype(bool))
        rep = coverage_report(lay, toy, paper_cfg)
        assert rep.min_db <= rep.avg_db <= rep.max_db
        assert rep.covered + rep.connected + rep.blackout == rep.classes.size
        assert rep.class_grid().shape == rep.lattice_shape
    # linear-domain averaging sits above the dB-domain mean (Jensen)
    lay = Layout.from_indices([2, 5, 8, 10], 12)
    from emskin.field import received_power

    p = received_power(lay.bits, toy.receivers, toy, paper_cfg)
    rep = coverage_report(lay, toy, paper_cfg)
    assert rep.avg_db >= power_to_db(p).mean() - 1e-12
    assert rep.min_db == pytest.approx(float(power_to_db(p.min())))
    assert rep.max_db == pytest.approx(float(power_to_db(p.max())))


def test_degenerate_layout_contracts(masked, paper_cfg):
    """All-off: phi1 = 1, phi2 = 0, every receiver in blackout; all-on:
    phi2 is exactly the admissible fraction."""
    n = masked.n_tiles
    off = Layout.empty(n)
    rep = coverage_report(off, masked, paper_cfg)
    assert rep.shortfall == 1.0
    assert phi2(off) == 0.0
    assert rep.blackout == rep.classes.size
    assert (rep.classes == BLACKOUT).all()

    all_on = Layout(masked.facade.admissible.copy())
    assert phi2(all_on) == masked.facade.admissible.sum() / n


def test_coverage_report_with_override_receivers(toy, paper_cfg):
    pts = toy.receivers[:7]
    rep = coverage_report(Layout.from_indices([2, 5, 8, 10], 12), toy, paper_cfg, receivers=pts)
    assert rep.classes.size == 7
    assert rep.lattice_shape == (1, 7)


def test_report_counts_match_class_values(toy, paper_cfg):
    rep = coverage_report(Layout.from_indices([6], 12), toy, paper_cfg)
    assert isinstance(rep, CoverageReport)
    assert rep.covered == int((rep.classes == COVERED).sum())
    total = rep.covered + rep.connected + rep.blackout
    assert total == len(toy.receivers)
