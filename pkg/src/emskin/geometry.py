"""Scene geometry: base station, facade tile lattice and ground coverage area.

The skin is a rectangular lattice of square unit tiles mounted on a building
facade lying in the y-z plane (x = 0).  Tiles are numbered 1..N in raster
order starting from the top-left corner: the index runs left to right along
+y and then drops row by row towards -z.  Each tile is assigned one focal
point on the ground inside the area of interest; the assignment partitions
the area into as many cells as there are tiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # [m/s]


class ScenarioError(ValueError):
    """Inconsistent or physically meaningless scenario description."""


def _as_point(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ScenarioError(f"{name}: expected 3 finite coordinates, got {value!r}")
    return arr


# ---------------------------------------------------------------------------
# Scene building blocks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphericalDir:
    """Direction in spherical coordinates, degrees.

    ``theta_deg`` is the polar angle measured from the frame z-axis in
    [0, 180]; ``phi_deg`` is the azimuth in (-180, 180] measured from the
    frame x-axis towards the y-axis.
    """

    theta_deg: float
    phi_deg: float

    def __post_init__(self):
        if not (0.0 <= self.theta_deg <= 180.0):
            raise ScenarioError(f"theta_deg out of range [0, 180]: {self.theta_deg}")
        if not (-180.0 < self.phi_deg <= 180.0):
            raise ScenarioError(f"phi_deg out of range (-180, 180]: {self.phi_deg}")

    def unit_vector(self) -> np.ndarray:
        """Unit vector (x, y, z) of the direction in its own frame."""
        th = math.radians(self.theta_deg)
        ph = math.radians(self.phi_deg)
        return np.array(
            [math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)]
        )


def spherical_from_vector(vec: np.ndarray) -> SphericalDir:
    """Spherical angles (degrees) of a nonzero 3-vector."""
    r = float(np.linalg.norm(vec))
    if r == 0.0:
        raise ScenarioError("cannot take angles of a zero vector")
    theta = math.degrees(math.acos(np.clip(vec[2] / r, -1.0, 1.0)))
    phi = math.degrees(math.atan2(vec[1], vec[0]))
    if phi <= -180.0:
        phi += 360.0
    return SphericalDir(theta, phi)


@dataclass(frozen=True)
class BaseStation:
    """Transmitter illuminating the facade.

    Parameters
    ----------
    position : array_like
        Global coordinates [m]; must lie in front of the facade (x > 0).
    frequency : float
        Carrier frequency [Hz].
    field_amplitude : float
        Incident plane-wave E-field amplitude at the facade [V/m].
    polarization : tuple
        Unit polarization vector; recorded for completeness, the scalar
        field model does not use it.
    """

    position: np.ndarray
    frequency: float
    field_amplitude: float
    polarization: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "position", _as_point(self.position, "bs_position"))
        if self.position[0] <= 0.0:
            raise ScenarioError(
                f"bs_position: base station must be in front of the facade (x > 0), got x = {self.position[0]}"
            )
        if not (self.frequency > 0.0):
            raise ScenarioError(f"frequency_hz must be positive, got {self.frequency}")
        if not (self.field_amplitude > 0.0):
            raise ScenarioError(
                f"e_field_amplitude must be positive, got {self.field_amplitude}"
            )

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength


@dataclass(frozen=True)
class FacadeGrid:
    """Rectangular lattice of square tiles on the x = 0 plane.

    ``first_barycenter_yz`` is the (y, z) barycenter of tile 1 (top-left);
    ``n_y`` tiles per row, ``n_z`` rows.  ``admissible`` marks the cells
    where a reflecting tile may actually be installed (False for windows,
    balconies and other obstructions); it is stored in raster order.
    """

    first_barycenter_yz: tuple[float, float]
    tile_side: float
    n_y: int
    n_z: int
    admissible: np.ndarray = None

    def __post_init__(self):
        if not (self.tile_side > 0.0):
            raise ScenarioError(f"facade.tile_side_m must be positive, got {self.tile_side}")
        if self.n_y < 1 or self.n_z < 1:
            raise ScenarioError(
                f"facade.ny and facade.nz must be >= 1, got {self.n_y} x {self.n_z}"
            )
        mask = self.admissible
        if mask is None:
            mask = np.ones(self.n_tiles, dtype=bool)
        mask = np.asarray(mask, dtype=bool).ravel()
        if mask.size != self.n_tiles:
            raise ScenarioError(
                f"facade.mask has {mask.size} cells, expected ny*nz = {self.n_tiles}"
            )
        if not mask.any():
            raise ScenarioError("facade.mask admits no tiles at all")
        object.__setattr__(self, "admissible", mask)

    @property
    def n_tiles(self) -> int:
        return self.n_y * self.n_z


def facade_center(grid: FacadeGrid) -> np.ndarray:
    """Geometric center of the whole skin (mean tile barycenter), shape (3,)."""
    y0, z0 = grid.first_barycenter_yz
    return np.array(
        [0.0, y0 + (grid.n_y - 1) * grid.tile_side / 2.0, z0 - (grid.n_z - 1) * grid.tile_side / 2.0]
    )


def tile_barycenters(grid: FacadeGrid) -> np.ndarray:
    """Barycenters of all tiles, raster order, shape (N, 3).

    Tile n (1-based) sits at column (n-1) mod n_y and row (n-1) // n_y;
    columns advance by +tile_side along y, rows by -tile_side along z.
    """
    n = np.arange(grid.n_tiles)
    col = n % grid.n_y
    row = n // grid.n_y
    y0, z0 = grid.first_barycenter_yz
    out = np.zeros((grid.n_tiles, 3))
    out[:, 1] = y0 + col * grid.tile_side
    out[:, 2] = z0 - row * grid.tile_side
    return out


def tile_barycenter(grid: FacadeGrid, n: int) -> np.ndarray:
    """Barycenter of tile ``n`` (1-based raster index)."""
    if not (1 <= n <= grid.n_tiles):
        raise ScenarioError(f"tile index {n} outside 1..{grid.n_tiles}")
    return tile_barycenters(grid)[n - 1]


def incident_direction(bs: BaseStation, barycenter: np.ndarray) -> SphericalDir:
    """Global arrival direction of the incident ray at a tile barycenter.

    The polar angle is measured from +z, the azimuth from +x towards +y
    with the two-argument arctangent, so all quadrants are handled.
    """
    diff = bs.position - np.asarray(barycenter, dtype=float)
    if np.linalg.norm(diff) == 0.0:
        raise ScenarioError("base station coincides with a tile barycenter")
    return spherical_from_vector(diff)


# ---------------------------------------------------------------------------
# Area of interest
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AreaOfInterest:
    """Rectangular ground-level region to be served by the skin.

    The rectangle is centered at ``center`` (the z component is the focal
    plane height), with ``length`` along the street direction given by
    ``azimuth_deg`` (w.r.t. +x, counterclockwise seen from above) and
    ``width`` across it.  ``partition`` = (p_long, p_short) is the number of
    focal cells along / across; receivers are placed on a uniform lattice of
    ``receiver_density`` points per square meter at ``receiver_height``.
    """

    center: np.ndarray
    length: float
    width: float
    azimuth_deg: float
    partition: tuple[int, int]
    receiver_height: float
    receiver_density: float

    def __post_init__(self):
        object.__setattr__(self, "center", _as_point(self.center, "aoi.center_xyz"))
        if self.length <= 0.0 or self.width <= 0.0:
            raise ScenarioError(
                f"aoi.length_m and aoi.width_m must be positive, got {self.length} x {self.width}"
            )
        p_long, p_short = self.partition
        if p_long < 1 or p_short < 1:
            raise ScenarioError(f"aoi.partition must be >= 1 per axis, got {self.partition}")
        if self.receiver_density <= 0.0:
            raise ScenarioError(
                f"aoi.receiver_density_per_m2 must be positive, got {self.receiver_density}"
            )

    @property
    def u_long(self) -> np.ndarray:
        """Unit vector along the street direction."""
        a = math.radians(self.azimuth_deg)
        return np.array([math.cos(a), math.sin(a), 0.0])

    @property
    def u_short(self) -> np.ndarray:
        """Unit vector across the street (u_long rotated +90 deg in plane)."""
        a = math.radians(self.azimuth_deg)
        return np.array([-math.sin(a), math.cos(a), 0.0])

    @property
    def area(self) -> float:
        return self.length * self.width


def partition_centers(aoi: AreaOfInterest) -> np.ndarray:
    """Centers of the focal cells, raster order, shape (p_long*p_short, 3).

    The cell raster mirrors the facade raster: the fast index runs along
    the street (p_long cells) and the slow index across it (p_short rows),
    so the identity map tile n -> cell n sends facade columns to
    along-street positions and facade rows to across-street positions.
    Cell 1 sits at the AoI corner nearest the skin, on the -u_short side.
    """
    p_long, p_short = aoi.partition
    n = np.arange(p_long * p_short)
    i_long = n % p_long
    i_short = n // p_long
    s_long = ((i_long + 0.5) / p_long - 0.5) * aoi.length
    s_short = ((i_short + 0.5) / p_short - 0.5) * aoi.width
    return (
        aoi.center[None, :]
        + s_long[:, None] * aoi.u_long[None, :]
        + s_short[:, None] * aoi.u_short[None, :]
    )


def assign_focal_points(grid: FacadeGrid, aoi: AreaOfInterest) -> np.ndarray:
    """Focal point of every tile: identity map onto the cell raster, (N, 3).

    Requires the partition to have exactly as many cells as the facade has
    tiles (inadmissible cells included, so the numbering never shifts when
    the mask changes).
    """
    p_long, p_short = aoi.partition
    if p_long * p_short != grid.n_tiles:
        raise ScenarioError(
            f"aoi.partition {p_long}x{p_short} = {p_long * p_short} cells "
            f"does not match facade ny*nz = {grid.n_tiles} tiles"
        )
    return partition_centers(aoi)


def place_receivers(aoi: AreaOfInterest) -> np.ndarray:
    """Uniform receiver lattice over the area of interest, shape (U, 3).

    One axis step per sqrt(density): a 10 x 50 m area at 1 receiver/m^2
    yields a 50 x 10 grid of cell centers.  Receivers sit at
    ``receiver_height``, row-major with the along-street index fastest.
    """
    per_axis = math.sqrt(aoi.receiver_density)
    n_long = max(1, round(aoi.length * per_axis))
    n_short = max(1, round(aoi.width * per_axis))
    i_long = np.arange(n_long)
    i_short = np.arange(n_short)
    s_long = ((i_long + 0.5) / n_long - 0.5) * aoi.length
    s_short = ((i_short + 0.5) / n_short - 0.5) * aoi.width
    ss, sl = np.meshgrid(s_short, s_long, indexing="ij")
    pts = (
        aoi.center[None, :]
        + sl.ravel()[:, None] * aoi.u_long[None, :]
        + ss.ravel()[:, None] * aoi.u_short[None, :]
    )
    pts[:, 2] = aoi.receiver_height
    return pts


def receiver_lattice_shape(aoi: AreaOfInterest) -> tuple[int, int]:
    """(rows across street, columns along street) of the receiver lattice."""
    per_axis = math.sqrt(aoi.receiver_density)
    n_long = max(1, round(aoi.length * per_axis))
    n_short = max(1, round(aoi.width * per_axis))
    return n_short, n_long


# ---------------------------------------------------------------------------
# Assembled scenario
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Tile:
    """One unit cell of the skin with its precomputed pointing data."""

    index: int                      # 1-based raster index
    barycenter: np.ndarray
    focal_point: np.ndarray
    incident_dir: SphericalDir      # global angles of the BS seen from the tile
    steering_dir_local: SphericalDir  # beam direction in the tile local frame
    d_inc: float                    # BS-to-tile distance [m]
    d_focal: float                  # tile-to-focal-point distance [m]
    admissible: bool


@dataclass(frozen=True)
class Scenario:
    """Immutable problem instance consumed by the field and design stages."""

    base_station: BaseStation
    facade: FacadeGrid
    aoi: AreaOfInterest
    power_threshold_db: float     # coverage threshold [dB re 1 (V/m)^2]
    blackout_threshold_db: float  # below this the link is considered dead
    tiles: tuple = ()
    receivers: np.ndarray = None

    @property
    def n_tiles(self) -> int:
        return self.facade.n_tiles

    @property
    def power_threshold_linear(self) -> float:
        return 10.0 ** (self.power_threshold_db / 10.0)

    @property
    def blackout_threshold_linear(self) -> float:
        return 10.0 ** (self.blackout_threshold_db / 10.0)


def local_direction(origin: np.ndarray, target: np.ndarray) -> SphericalDir:
    """Direction from ``origin`` to ``target`` in facade-local axes, degrees.

    Facade-local frames swap axes so that the facade normal is the local z:
    local (x, y, z) components = global (y, z, x) components.  A tile's
    steering direction runs from its own barycenter to its focal point, so
    the steered beam passes through the focal point exactly.
    """
    d = np.asarray(target, dtype=float) - np.asarray(origin, dtype=float)
    return spherical_from_vector(np.array([d[1], d[2], d[0]]))


def build_scenario(
    bs: BaseStation,
    grid: FacadeGrid,
    aoi: AreaOfInterest,
    power_threshold_db: float,
    blackout_threshold_db: float,
) -> Scenario:
    """Assemble and cross-validate a full scenario.

    Computes per-tile barycenters, focal assignments, incidence angles and
    steering directions, and places the receiver lattice.

    Raises
    ------
    ScenarioError
        If any part is inconsistent (partition/tile count mismatch, focal
        points behind the facade, thresholds out of order, ...).
    """
    if not (blackout_threshold_db < power_threshold_db):
        raise ScenarioError(
            "thresholds: p_bls_db must be strictly below p_th_db "
            f"(got p_bls_db = {blackout_threshold_db}, p_th_db = {power_threshold_db})"
        )
    bary = tile_barycenters(grid)
    focal = assign_focal_points(grid, aoi)
    if np.any(focal[:, 0] <= 0.0):
        raise ScenarioError(
            "aoi: focal points must lie in front of the facade (x > 0); "
            "check aoi.center_xyz and aoi.azimuth_deg"
        )
    receivers = place_receivers(aoi)
    tiles = []
    for i in range(grid.n_tiles):
        d_inc = float(np.linalg.norm(bs.position - bary[i]))
        d_focal = float(np.linalg.norm(focal[i] - bary[i]))
        if d_focal == 0.0:
            raise ScenarioError(f"tile {i + 1}: focal point coincides with the barycenter")
        tiles.append(
            Tile(
                index=i + 1,
                barycenter=bary[i],
                focal_point=focal[i],
                incident_dir=incident_direction(bs, bary[i]),
                steering_dir_local=local_direction(bary[i], focal[i]),
                d_inc=d_inc,
                d_focal=d_focal,
                admissible=bool(grid.admissible[i]),
            )
        )
    return Scenario(
        base_station=bs,
        facade=grid,
        aoi=aoi,
        power_threshold_db=power_threshold_db,
        blackout_threshold_db=blackout_threshold_db,
        tiles=tuple(tiles),
        receivers=receivers,
    )
