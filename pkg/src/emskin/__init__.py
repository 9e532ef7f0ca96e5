"""emskin: design of modular reflecting electromagnetic skins for mm-wave coverage.

A passive skin of square reflecting tiles on a building facade redirects a
base-station beam into a ground-level area of interest.  This package models
the per-tile reflected field in closed form, scores tile layouts on coverage
and cost, and searches the layout space with an elitist multiobjective GA.
"""

from .exports import (
    fmt,
    read_front,
    read_layout,
    read_power_grid,
    write_coverage,
    write_front,
    write_layout,
    write_power_grid,
)
from .field import (
    FREE_SPACE_IMPEDANCE,
    SENTINEL_FLOOR_DB,
    FieldConfig,
    GridRegion,
    PowerGrid,
    power_to_db,
    received_power,
    reflected_field,
    sample_power_grid,
    tile_power_matrix,
)
from .geometry import (
    AreaOfInterest,
    BaseStation,
    FacadeGrid,
    Scenario,
    ScenarioError,
    SphericalDir,
    Tile,
    assign_focal_points,
    build_scenario,
    facade_center,
    incident_direction,
    place_receivers,
    tile_barycenter,
    tile_barycenters,
)
from .nsga2 import (
    EvolveResult,
    FrontSnapshot,
    GaConfig,
    Individual,
    ParetoFront,
    crowding_distance,
    dominates,
    evolve,
    evolve_matrix,
    extract_pareto,
    fast_nondominated_sort,
    hypervolume,
    initialize,
)
from .objectives import (
    CoverageReport,
    Layout,
    LayoutError,
    coverage_report,
    heaviside,
    parse_layout,
    phi1,
    phi2,
    validate_layout,
)
from .scenario_io import fixture_path, list_fixtures, load_scenario, scenario_from_config
from .single_tile import SteeringReport, steering_benchmark

__version__ = "0.1.0"
