"""Single-tile steering benchmark: does one tile's beam point where told?

Builds a one-tile scene (barycenter at the origin of the facade plane,
base station on the facade normal), steers the tile to a requested local
direction, samples |E|^2 on a sphere around the tile over a dense angular
grid, and reports where the power peak actually landed together with the
-3 dB beamwidths of the two principal cuts.  The peak must coincide with
the steering direction up to grid resolution; the report makes that
checkable in one glance.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .exports import fmt
from .field import FieldConfig, power_to_db, tile_power_matrix
from .geometry import (
    AreaOfInterest,
    BaseStation,
    FacadeGrid,
    Scenario,
    ScenarioError,
    SphericalDir,
    Tile,
    incident_direction,
)

DEFAULT_FREQUENCY = 27.0e9          # [Hz]
DEFAULT_SIDE_WAVELENGTHS = 25.0     # tile side in wavelengths
DEFAULT_INCIDENCE_DISTANCE = 100.0  # BS-to-tile distance [m]
DEFAULT_SPHERE_RADIUS = 5.0         # observation sphere [m]
DEFAULT_STEERING = SphericalDir(40.0, -20.0)


@dataclass(frozen=True)
class SteeringReport:
    """Outcome of one benchmark run (angles in degrees, powers in dB)."""

    frequency: float
    tile_side: float
    steering: SphericalDir
    peak: SphericalDir
    peak_error_deg: float
    peak_db: float
    beamwidth_theta_deg: float
    beamwidth_phi_deg: float
    sphere_radius: float
    grid_step_deg: float
    n_samples: int
    elapsed_s: float


def _local_to_global(u_local: np.ndarray) -> np.ndarray:
    """Map local (x, y, z) components to global (y, z, x) placement."""
    return np.stack([u_local[..., 2], u_local[..., 0], u_local[..., 1]], axis=-1)


def one_tile_scene(
    frequency: float,
    tile_side: float,
    d_inc: float,
    steering: SphericalDir,
    focal_distance: float,
) -> Scenario:
    """Single tile at the origin, BS on the facade normal, steered as asked."""
    if steering.theta_deg >= 90.0:
        raise ScenarioError(
            f"steering theta must be < 90 deg (in front of the facade), got {steering.theta_deg}"
        )
    bs = BaseStation(
        position=np.array([d_inc, 0.0, 0.0]),
        frequency=frequency,
        field_amplitude=1.0,
    )
    grid = FacadeGrid(first_barycenter_yz=(0.0, 0.0), tile_side=tile_side, n_y=1, n_z=1)
    bary = np.zeros(3)
    focal = focal_distance * _local_to_global(steering.unit_vector())
    tile = Tile(
        index=1,
        barycenter=bary,
        focal_point=focal,
        incident_dir=incident_direction(bs, bary),
        steering_dir_local=steering,
        d_inc=d_inc,
        d_focal=focal_distance,
        admissible=True,
    )
    aoi = AreaOfInterest(
        center=focal,
        length=1.0,
        width=1.0,
        azimuth_deg=0.0,
        partition=(1, 1),
        receiver_height=float(focal[2]),
        receiver_density=1.0,
    )
    return Scenario(
        base_station=bs,
        facade=grid,
        aoi=aoi,
        power_threshold_db=-70.0,
        blackout_threshold_db=-100.0,
        tiles=(tile,),
        receivers=np.atleast_2d(focal),
    )


def _half_power_width(cut: np.ndarray, peak_idx: int, step_deg: float) -> float:
    """Angular distance between the outermost contiguous half-power samples."""
    half = cut[peak_idx] / 2.0
    lo = peak_idx
    while lo > 0 and cut[lo - 1] >= half:
        lo -= 1
    hi = peak_idx
    while hi < cut.size - 1 and cut[hi + 1] >= half:
        hi += 1
    return (hi - lo) * step_deg


def steering_benchmark(
    frequency: float = DEFAULT_FREQUENCY,
    side_wavelengths: float = DEFAULT_SIDE_WAVELENGTHS,
    d_inc: float = DEFAULT_INCIDENCE_DISTANCE,
    steering: SphericalDir = DEFAULT_STEERING,
    sphere_radius: float = DEFAULT_SPHERE_RADIUS,
    grid_step_deg: float = 0.25,
    cfg: FieldConfig | None = None,
) -> SteeringReport:
    """Sample one steered tile on a sphere and locate its power peak.

    The angular grid covers the whole front hemisphere (local polar angle
    0..90 deg) at ``grid_step_deg`` resolution, so the reported peak is
    exact up to one grid cell.
    """
    if cfg is None:
        cfg = FieldConfig()
    start = time.perf_counter()
    wavelength = 299_792_458.0 / frequency
    tile_side = side_wavelengths * wavelength
    scenario = one_tile_scene(frequency, tile_side, d_inc, steering, sphere_radius)

    theta = np.arange(0.0, 90.0 + grid_step_deg / 2.0, grid_step_deg)
    phi = np.arange(-180.0 + grid_step_deg, 180.0 + grid_step_deg / 2.0, grid_step_deg)
    tt, pp = np.meshgrid(np.radians(theta), np.radians(phi), indexing="ij")
    u_local = np.stack(
        [np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1
    )
    pts = sphere_radius * _local_to_global(u_local).reshape(-1, 3)

    power = tile_power_matrix(scenario, cfg, pts)[0].reshape(theta.size, phi.size)
    i_th, i_ph = np.unravel_index(np.argmax(power), power.shape)
    peak = SphericalDir(float(theta[i_th]), float(phi[i_ph]))
    err = math.degrees(
        math.acos(
            float(np.clip(np.dot(peak.unit_vector(), steering.unit_vector()), -1.0, 1.0))
        )
    )
    bw_theta = _half_power_width(power[:, i_ph], int(i_th), grid_step_deg)
    bw_phi = _half_power_width(power[i_th, :], int(i_ph), grid_step_deg)

    return SteeringReport(
        frequency=frequency,
        tile_side=tile_side,
        steering=steering,
        peak=peak,
        peak_error_deg=err,
        peak_db=float(power_to_db(power[i_th, i_ph])),
        beamwidth_theta_deg=bw_theta,
        beamwidth_phi_deg=bw_phi,
        sphere_radius=sphere_radius,
        grid_step_deg=grid_step_deg,
        n_samples=int(power.size),
        elapsed_s=time.perf_counter() - start,
    )


def format_steering_report(r: SteeringReport) -> str:
    return "\n".join(
        [
            "single-tile steering benchmark",
            f"frequency_hz: {fmt(r.frequency)}",
            f"tile_side_m: {fmt(r.tile_side)}",
            f"sphere_radius_m: {fmt(r.sphere_radius)}",
            f"grid_step_deg: {fmt(r.grid_step_deg)}",
            f"steering_deg: theta {fmt(r.steering.theta_deg)}, phi {fmt(r.steering.phi_deg)}",
            f"peak_deg: theta {fmt(r.peak.theta_deg)}, phi {fmt(r.peak.phi_deg)}",
            f"peak_error_deg: {fmt(r.peak_error_deg)}",
            f"peak_db: {fmt(r.peak_db)}",
            f"beamwidth_theta_deg: {fmt(r.beamwidth_theta_deg)}",
            f"beamwidth_phi_deg: {fmt(r.beamwidth_phi_deg)}",
            f"samples: {r.n_samples}",
            f"elapsed_s: {fmt(r.elapsed_s)}",
        ]
    ) + "\n"
