"""Reflected-field model of the skin: one closed-form beam per unit tile.

Each installed tile reflects the incident spherical wave into a steered
pencil beam.  In the tile local frame (local x, y, z = global y, z, x, with
the origin at the tile barycenter) the scattered field at distance d is

    E(r) = -j A sinc(s (u_y - t_y)) sinc(s (u_z - t_z))
           exp(-j (k (d_inc + d) + phase_inc + phase_eng)) / d

with u the unit vector from the tile barycenter to the observation point,
t the unit steering vector from the barycenter to the tile's focal point,
s = sinc_arg_scale * k * L, sinc(x) = sin(x)/x, and the per-tile amplitude

    A = (k E_inc / 5) L^2 (cos_inc + cos_steer) / (4 pi d_inc).

The k/5 prefactor is the Kirchhoff aperture constant k with the impedance
ratio eta/eta_norm = 1/5 folded in; it was calibrated so that computed
coverage statistics and minimal covering-layout sizes land on published
measurements of this tile technology (see README).  ``FieldConfig.eta`` is
recorded for completeness but cancels in that ratio.  Tiles with a negative
incidence or steering cosine radiate nothing, as do observation points
behind the facade plane (x < 0).

Receiver powers are incoherent tile sums: P(r) = sum_n |E_n(r)|^2, reported
in dB re 1 (V/m)^2.  Zero power maps to the sentinel floor of -400 dB.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    Scenario,
    SphericalDir,
    Tile,
    spherical_from_vector,
)

FREE_SPACE_IMPEDANCE = 376.730313668  # [ohm]
SENTINEL_FLOOR_DB = -400.0
_FLOOR_LINEAR = 10.0 ** (SENTINEL_FLOOR_DB / 10.0)


@dataclass(frozen=True)
class FieldConfig:
    """Knobs of the field model.

    Parameters
    ----------
    eta : float
        Free-space impedance [ohm]; recorded, cancels in the amplitude
        prefactor (see module docstring).
    phase_inc, phase_eng : float
        Constant incidence / engineered phase offsets [rad].  They rotate
        the complex field but never change received powers.
    sinc_arg_scale : float
        Scale of the sinc argument, 1.0 or 0.5.  1.0 matches the closed
        form as usually printed; 0.5 is the physical aperture factor
        sinc(k L D / 2) and is the setting that reproduces published
        coverage statistics.
    """

    eta: float = FREE_SPACE_IMPEDANCE
    phase_inc: float = 0.0
    phase_eng: float = 0.0
    sinc_arg_scale: float = 1.0

    def __post_init__(self):
        if not (self.eta > 0.0):
            raise ValueError(f"eta must be positive, got {self.eta}")
        if self.sinc_arg_scale not in (1.0, 0.5):
            raise ValueError(
                f"sinc_arg_scale must be 1.0 or 0.5, got {self.sinc_arg_scale}"
            )


def unnormalized_sinc(x):
    """sin(x)/x with the removable singularity filled: sinc(0) = 1."""
    return np.sinc(np.asarray(x) / np.pi)


def to_local(point, tile: Tile) -> np.ndarray:
    """Map a global point into the tile's local frame.

    Local axes are (global y - tile y, global z - tile z, global x): the
    facade normal becomes the local z axis and the tile barycenter the
    origin.
    """
    p = np.asarray(point, dtype=float)
    b = tile.barycenter
    return np.array([p[1] - b[1], p[2] - b[2], p[0]])


def local_angles(local_point) -> SphericalDir:
    """Polar/azimuth angles (degrees) of a nonzero local-frame point."""
    return spherical_from_vector(np.asarray(local_point, dtype=float))


# ---------------------------------------------------------------------------
# Vectorized kernel
# ---------------------------------------------------------------------------

def _tile_arrays(scenario: Scenario):
    """Per-tile geometry pulled out of the Tile objects as flat arrays."""
    bary = np.array([t.barycenter for t in scenario.tiles])
    d_inc = np.array([t.d_inc for t in scenario.tiles])
    bs = scenario.base_station
    cos_inc = (bs.position[0] - bary[:, 0]) / d_inc
    steer = np.array([t.focal_point for t in scenario.tiles]) - bary
    steer_u = steer / np.linalg.norm(steer, axis=1)[:, None]
    return bary, d_inc, cos_inc, steer_u


def _tile_amplitudes(scenario: Scenario, cos_inc, cos_steer, d_inc) -> np.ndarray:
    """Per-tile scalar amplitude A, zero where a cosine is negative."""
    bs = scenario.base_station
    side = scenario.facade.tile_side
    pref = 0.2 * bs.wavenumber * bs.field_amplitude  # k E / 5, see module docstring
    amp = pref * side * side * (cos_inc + cos_steer) / (4.0 * math.pi * d_inc)
    return np.where((cos_inc < 0.0) | (cos_steer < 0.0), 0.0, amp)


def tile_power_matrix(scenario: Scenario, cfg: FieldConfig, points) -> np.ndarray:
    """Per-tile received power at each observation point, shape (N, U).

    Row n is |E_n|^2 of tile n alone (admissible or not) at every point;
    any layout's receiver powers are then ``bits @ matrix``.  The matrix
    depends only on the scenario and field config, never on a layout, so
    design loops compute it once.

    Points behind the facade plane (x < 0) and points coinciding with a
    tile barycenter get zero power from that tile.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"points must have shape (U, 3), got {pts.shape}")
    bary, d_inc, cos_inc, steer_u = _tile_arrays(scenario)
    amp = _tile_amplitudes(scenario, cos_inc, steer_u[:, 0], d_inc)

    diff = pts[None, :, :] - bary[:, None, :]          # (N, U, 3)
    d = np.linalg.norm(diff, axis=2)
    ok = d > 0.0
    d_safe = np.where(ok, d, 1.0)
    u_y = diff[:, :, 1] / d_safe
    u_z = diff[:, :, 2] / d_safe
    s = cfg.sinc_arg_scale * scenario.base_station.wavenumber * scenario.facade.tile_side
    pattern = unnormalized_sinc(s * (u_y - steer_u[:, 1][:, None])) * unnormalized_sinc(
        s * (u_z - steer_u[:, 2][:, None])
    )
    e_mag = amp[:, None] / d_safe * pattern
    power = e_mag * e_mag
    power[~ok] = 0.0
    power[:, pts[:, 0] < 0.0] = 0.0
    return power


def reflected_field(tile: Tile, point, scenario: Scenario, cfg: FieldConfig) -> complex:
    """Complex scattered field of a single tile at one global point [V/m].

    Includes the propagation phase over d_inc + d_obs and the constant
    phase offsets from the config; |reflected_field|^2 equals the matching
    entry of :func:`tile_power_matrix`.
    """
    p = np.asarray(point, dtype=float)
    if p[0] < 0.0:
        return 0.0 + 0.0j
    bary, d_inc_all, cos_inc_all, steer_u = _tile_arrays(scenario)
    i = tile.index - 1
    diff = p - bary[i]
    d = float(np.linalg.norm(diff))
    if d == 0.0:
        return 0.0 + 0.0j
    amp = _tile_amplitudes(scenario, cos_inc_all, steer_u[:, 0], d_inc_all)[i]
    k = scenario.base_station.wavenumber
    s = cfg.sinc_arg_scale * k * scenario.facade.tile_side
    pattern = float(
        unnormalized_sinc(s * (diff[1] / d - steer_u[i, 1]))
        * unnormalized_sinc(s * (diff[2] / d - steer_u[i, 2]))
    )
    phase = k * (d_inc_all[i] + d) + cfg.phase_inc + cfg.phase_eng
    return -1j * amp * pattern / d * np.exp(-1j * phase)


def received_power(layout_bits, points, scenario: Scenario, cfg: FieldConfig) -> np.ndarray:
    """Total incoherent power of the installed tiles at each point, linear.

    ``layout_bits`` is the (N,) 0/1 installation vector in tile raster
    order.  Returns shape (U,) linear power re 1 (V/m)^2.
    """
    bits = np.asarray(layout_bits, dtype=float).ravel()
    if bits.size != scenario.n_tiles:
        raise ValueError(f"layout has {bits.size} bits, scenario has {scenario.n_tiles} tiles")
    pm = tile_power_matrix(scenario, cfg, points)
    return bits @ pm


def power_to_db(linear) -> np.ndarray:
    """Linear power re 1 (V/m)^2 to dB, with zero clamped to -400 dB."""
    arr = np.maximum(np.asarray(linear, dtype=float), _FLOOR_LINEAR)
    return 10.0 * np.log10(arr)


# ---------------------------------------------------------------------------
# Power maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridRegion:
    """Rectangular sampling region at a fixed height.

    ``center_xy`` is the region center in the ground plane, ``size`` its
    (u, v) extents [m], ``resolution`` the cell counts per axis, and
    ``azimuth_deg`` rotates the u axis away from global +x (0 keeps the
    region axis-aligned).
    """

    center_xy: tuple[float, float]
    size: tuple[float, float]
    resolution: tuple[int, int]
    height: float
    azimuth_deg: float = 0.0

    def __post_init__(self):
        if self.size[0] <= 0 or self.size[1] <= 0:
            raise ValueError(f"region size must be positive, got {self.size}")
        if self.resolution[0] < 1 or self.resolution[1] < 1:
            raise ValueError(f"region resolution must be >= 1, got {self.resolution}")


@dataclass(frozen=True)
class PowerGrid:
    """Sampled dB power map over a regular planar grid.

    ``values_db[i, j]`` is the cell centered at
    origin + (j + 0.5) du axis_u + (i + 0.5) dv axis_v, where du, dv are
    ``extent_u / shape[1]`` and ``extent_v / shape[0]``; ``origin`` is the
    grid corner at ``height``.
    """

    origin: np.ndarray
    axis_u: np.ndarray
    axis_v: np.ndarray
    extent_u: float
    extent_v: float
    height: float
    values_db: np.ndarray  # (n_v, n_u)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values_db.shape

    def cell_centers(self) -> np.ndarray:
        """Global coordinates of all cell centers, shape (n_v, n_u, 3)."""
        n_v, n_u = self.values_db.shape
        du = self.extent_u / n_u
        dv = self.extent_v / n_v
        jj, ii = np.meshgrid(np.arange(n_u), np.arange(n_v))
        return (
            self.origin[None, None, :]
            + (jj[:, :, None] + 0.5) * du * self.axis_u[None, None, :]
            + (ii[:, :, None] + 0.5) * dv * self.axis_v[None, None, :]
        )


def sample_power_grid(
    layout_bits, region: GridRegion, scenario: Scenario, cfg: FieldConfig
) -> PowerGrid:
    """Sample a layout's received power over a planar grid, in dB.

    Cells behind the facade plane come out at the sentinel floor; a cell
    that lands exactly on a tile barycenter gets that tile's own (divergent)
    contribution dropped rather than propagating a non-finite value.
    """
    az = math.radians(region.azimuth_deg)
    axis_u = np.array([math.cos(az), math.sin(az), 0.0])
    axis_v = np.array([-math.sin(az), math.cos(az), 0.0])
    n_u, n_v = region.resolution
    origin = (
        np.array([region.center_xy[0], region.center_xy[1], region.height])
        - 0.5 * region.size[0] * axis_u
        - 0.5 * region.size[1] * axis_v
    )
    du = region.size[0] / n_u
    dv = region.size[1] / n_v
    jj, ii = np.meshgrid(np.arange(n_u), np.arange(n_v))
    pts = (
        origin[None, :]
        + (jj.ravel()[:, None] + 0.5) * du * axis_u[None, :]
        + (ii.ravel()[:, None] + 0.5) * dv * axis_v[None, :]
    )
    power = received_power(layout_bits, pts, scenario, cfg)
    values = power_to_db(power).reshape(n_v, n_u)
    return PowerGrid(
        origin=origin,
        axis_u=axis_u,
        axis_v=axis_v,
        extent_u=float(region.size[0]),
        extent_v=float(region.size[1]),
        height=float(region.height),
        values_db=values,
    )
