"""Street-level power map of the published 12-tile layout.

Scores the fixed 12-tile design on the orthogonal scene, then samples its
received power over a 200 x 200 m ground rectangle around the area of
interest.  Writes the grid as CSV next to this script and, if matplotlib
is around, a rendered map with the AoI rectangle drawn on top.

Run:  python3 demos/coverage_map.py
"""

import numpy as np

from pathlib import Path

from emskin import FieldConfig, Layout, coverage_report, load_scenario
from emskin.exports import coverage_text, write_power_grid
from emskin.field import GridRegion, sample_power_grid
from emskin.scenario_io import fixture_path

TILES = [3, 4, 5, 6, 8, 12, 30, 32, 43, 44, 45, 46]

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

cfg = FieldConfig(sinc_arg_scale=0.5)
scenario = load_scenario(fixture_path("orthogonal"))
layout = Layout.from_indices(TILES, scenario.n_tiles)

print(f"12-tile layout on the orthogonal scene, tiles {TILES}")
print(coverage_text(coverage_report(layout, scenario, cfg)))

region = GridRegion(
    center_xy=(scenario.aoi.center[0], scenario.aoi.center[1]),
    size=(200.0, 200.0),
    resolution=(200, 200),
    height=scenario.aoi.receiver_height,
)
grid = sample_power_grid(layout.bits, region, scenario, cfg)
write_power_grid(OUT / "coverage_map.csv", grid)
print(f"grid -> {OUT / 'coverage_map.csv'}  "
      f"(peak {grid.values_db.max():.1f} dB, floor {grid.values_db.min():.1f} dB)")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not available; skipping the map figure")
    raise SystemExit(0)

centers = grid.cell_centers()
fig, ax = plt.subplots(figsize=(7, 6))
im = ax.pcolormesh(
    centers[..., 0], centers[..., 1], grid.values_db,
    vmin=-110, vmax=-50, cmap="viridis",
)
# outline of the area of interest (rotated rectangle on the ground)
aoi = scenario.aoi
u, v = aoi.u_long, aoi.u_short
c = aoi.center
corners = np.array([
    c + 0.5 * (su * aoi.length * u + sv * aoi.width * v)
    for su, sv in ((-1, -1), (1, -1), (1, 1), (-1, 1), (-1, -1))
])
ax.plot(corners[:, 0], corners[:, 1], "w--", linewidth=1.5, label="AoI")
ax.plot(0, 0, "r^", markersize=10, label="facade")
ax.plot(scenario.base_station.position[0], scenario.base_station.position[1],
        "r*", markersize=12, label="base station")
ax.set_xlabel("x [m]")
ax.set_ylabel("y [m]")
ax.set_aspect("equal")
ax.set_title("received power at 1.5 m, 12-tile skin")
ax.legend(loc="lower right")
fig.colorbar(im, label="dB re 1 (V/m)^2")
fig.tight_layout()
fig.savefig(OUT / "coverage_map.png", dpi=140)
print(f"figure -> {OUT / 'coverage_map.png'}")
