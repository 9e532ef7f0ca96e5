"""Where does one tile actually send its beam?

Steers a single 25-wavelength tile to (theta, phi) = (40, -20) degrees,
samples the reflected power on a 5 m sphere and prints the benchmark
report.  If matplotlib is importable, also renders the full hemisphere
pattern so the beam spot is visible by eye.

Run:  python3 demos/single_tile_pattern.py
"""

from pathlib import Path

import numpy as np

from emskin import FieldConfig, SphericalDir
from emskin.field import tile_power_matrix
from emskin.single_tile import (
    format_steering_report,
    one_tile_scene,
    steering_benchmark,
)

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

# The benchmark does the whole sweep internally; 0.25 deg grid, defaults.
report = steering_benchmark()
print(format_steering_report(report))

# Re-sample a coarser hemisphere ourselves for the picture.
cfg = FieldConfig()
steering = SphericalDir(40.0, -20.0)
scene = one_tile_scene(
    frequency=27.0e9,
    tile_side=report.tile_side,
    d_inc=100.0,
    steering=steering,
    focal_distance=5.0,
)
theta = np.arange(0.0, 90.25, 0.25)
phi = np.arange(-179.75, 180.25, 0.25)
tt, pp = np.meshgrid(np.radians(theta), np.radians(phi), indexing="ij")
# local (x, y, z) -> global (y, z, x): the facade normal is global +x
ux = np.sin(tt) * np.cos(pp)
uy = np.sin(tt) * np.sin(pp)
uz = np.cos(tt)
pts = 5.0 * np.stack([uz, ux, uy], axis=-1).reshape(-1, 3)
power = tile_power_matrix(scene, cfg, pts)[0].reshape(theta.size, phi.size)
power_db = 10.0 * np.log10(np.maximum(power, 1e-40))

peak = np.unravel_index(np.argmax(power), power.shape)
print(f"hemisphere max at theta={theta[peak[0]]:.2f} phi={phi[peak[1]]:.2f} deg")
print(f"commanded              theta={steering.theta_deg:.2f} phi={steering.phi_deg:.2f} deg")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not available; skipping the pattern figure")
else:
    fig, ax = plt.subplots(figsize=(9, 4))
    top = power_db.max()
    im = ax.pcolormesh(phi, theta, power_db, vmin=top - 40, vmax=top, cmap="inferno")
    ax.plot(steering.phi_deg, steering.theta_deg, "c+", markersize=12, markeredgewidth=2)
    ax.set_xlabel("phi [deg]")
    ax.set_ylabel("theta [deg]")
    ax.set_title("single-tile reflected power on the 5 m sphere (+ = commanded)")
    fig.colorbar(im, label="dB re 1 (V/m)^2")
    fig.tight_layout()
    fig.savefig(OUT / "single_tile_pattern.png", dpi=140)
    print(f"figure -> {OUT / 'single_tile_pattern.png'}")

# The -3 dB widths scale like wavelength/side: a quick sanity check.
lam = 299_792_458.0 / 27.0e9
print(f"tile side {report.tile_side:.3f} m = {report.tile_side / lam:.1f} wavelengths")
print(f"beamwidths: theta {report.beamwidth_theta_deg:.2f} deg, "
      f"phi {report.beamwidth_phi_deg:.2f} deg (phi cut widens as 1/sin(theta))")
print(f"sphere sweep took {report.elapsed_s * 1e3:.0f} ms "
      f"({report.n_samples} directions, {report.grid_step_deg} deg apart)")
