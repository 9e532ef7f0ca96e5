"""Scenario files: YAML schema, validation and bundled fixtures.

A scenario file is a nested key/value document (comments welcome for
provenance).  Schema, all keys required unless noted::

    frequency_hz: 2.7e10
    bs_position: [x, y, z]          # base station, x > 0 [m]
    e_field_amplitude: 1.0          # incident field at the facade [V/m]
    facade:
      first_barycenter_yz: [y, z]   # tile 1 (top-left) barycenter [m]
      tile_side_m: 0.5
      ny: 10                        # tiles per row (along y)
      nz: 6                         # rows (down z)
      mask: "111..."                # optional, ny*nz chars raster order,
                                    # 1 = tile may be installed
    aoi:
      center_xyz: [x, y, z]         # z is the focal-plane height
      length_m: 50.0                # along the street azimuth
      width_m: 10.0
      azimuth_deg: 50.0             # street direction w.r.t. +x
      partition: [p_long, p_short]  # focal cells; must equal ny*nz cells
      receiver_height_m: 1.5
      receiver_density_per_m2: 1.0
    thresholds:
      p_th_db: -70.0                # coverage threshold [dB re 1 (V/m)^2]
      p_bls_db: -100.0              # blackout level, strictly below p_th_db

Unknown keys are rejected so typos surface as errors, with the offending
field path in the message.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .geometry import (
    AreaOfInterest,
    BaseStation,
    FacadeGrid,
    Scenario,
    ScenarioError,
    build_scenario,
)

_TOP_KEYS = {"frequency_hz", "bs_position", "e_field_amplitude", "facade", "aoi", "thresholds"}
_FACADE_KEYS = {"first_barycenter_yz", "tile_side_m", "ny", "nz", "mask"}
_AOI_KEYS = {
    "center_xyz",
    "length_m",
    "width_m",
    "azimuth_deg",
    "partition",
    "receiver_height_m",
    "receiver_density_per_m2",
}
_THRESHOLD_KEYS = {"p_th_db", "p_bls_db"}


def _require_mapping(node, path: str, allowed: set, required: set) -> dict:
    if not isinstance(node, dict):
        raise ScenarioError(f"{path}: expected a mapping, got {type(node).__name__}")
    unknown = set(node) - allowed
    if unknown:
        raise ScenarioError(f"{path}: unknown key(s) {sorted(unknown)}; allowed: {sorted(allowed)}")
    missing = required - set(node)
    if missing:
        raise ScenarioError(f"{path}: missing required key(s) {sorted(missing)}")
    return node


def _number(node, path: str) -> float:
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ScenarioError(f"{path}: expected a number, got {node!r}")
    return float(node)


def _integer(node, path: str) -> int:
    if isinstance(node, bool) or not isinstance(node, int):
        raise ScenarioError(f"{path}: expected an integer, got {node!r}")
    return node


def _triple(node, path: str) -> tuple:
    if not isinstance(node, (list, tuple)) or len(node) != 3:
        raise ScenarioError(f"{path}: expected [x, y, z], got {node!r}")
    return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(node))


def _pair(node, path: str) -> tuple:
    if not isinstance(node, (list, tuple)) or len(node) != 2:
        raise ScenarioError(f"{path}: expected a 2-element list, got {node!r}")
    return node


def _parse_mask(node, n: int, path: str) -> np.ndarray:
    if isinstance(node, str):
        s = node.strip()
        if len(s) != n or set(s) - {"0", "1"}:
            raise ScenarioError(
                f"{path}: expected {n} characters of 0/1, got {len(s)} "
                f"character(s){' with invalid symbols' if set(s) - {'0', '1'} else ''}"
            )
        return np.frombuffer(s.encode(), dtype=np.uint8) == ord("1")
    if isinstance(node, (list, tuple)):
        arr = np.asarray(node)
        if arr.size != n or not np.isin(arr, (0, 1)).all():
            raise ScenarioError(f"{path}: expected {n} entries of 0/1")
        return arr.astype(bool)
    raise ScenarioError(f"{path}: expected a bit string or 0/1 list, got {type(node).__name__}")


def scenario_from_config(config: dict) -> Scenario:
    """Validate a parsed scenario document and assemble the Scenario."""
    _require_mapping(config, "scenario", _TOP_KEYS, _TOP_KEYS)
    bs = BaseStation(
        position=np.array(_triple(config["bs_position"], "bs_position")),
        frequency=_number(config["frequency_hz"], "frequency_hz"),
        field_amplitude=_number(config["e_field_amplitude"], "e_field_amplitude"),
    )
    fc = _require_mapping(config["facade"], "facade", _FACADE_KEYS, _FACADE_KEYS - {"mask"})
    ny = _integer(fc["ny"], "facade.ny")
    nz = _integer(fc["nz"], "facade.nz")
    if ny < 1 or nz < 1:
        raise ScenarioError(f"facade.ny/facade.nz must be >= 1, got {ny} x {nz}")
    yz = _pair(fc["first_barycenter_yz"], "facade.first_barycenter_yz")
    mask = None
    if "mask" in fc:
        mask = _parse_mask(fc["mask"], ny * nz, "facade.mask")
    grid = FacadeGrid(
        first_barycenter_yz=(
            _number(yz[0], "facade.first_barycenter_yz[0]"),
            _number(yz[1], "facade.first_barycenter_yz[1]"),
        ),
        tile_side=_number(fc["tile_side_m"], "facade.tile_side_m"),
        n_y=ny,
        n_z=nz,
        admissible=mask,
    )
    ac = _require_mapping(config["aoi"], "aoi", _AOI_KEYS, _AOI_KEYS)
    part = _pair(ac["partition"], "aoi.partition")
    aoi = AreaOfInterest(
        center=np.array(_triple(ac["center_xyz"], "aoi.center_xyz")),
        length=_number(ac["length_m"], "aoi.length_m"),
        width=_number(ac["width_m"], "aoi.width_m"),
        azimuth_deg=_number(ac["azimuth_deg"], "aoi.azimuth_deg"),
        partition=(
            _integer(part[0], "aoi.partition[0]"),
            _integer(part[1], "aoi.partition[1]"),
        ),
        receiver_height=_number(ac["receiver_height_m"], "aoi.receiver_height_m"),
        receiver_density=_number(ac["receiver_density_per_m2"], "aoi.receiver_density_per_m2"),
    )
    th = _require_mapping(config["thresholds"], "thresholds", _THRESHOLD_KEYS, _THRESHOLD_KEYS)
    return build_scenario(
        bs=bs,
        grid=grid,
        aoi=aoi,
        power_threshold_db=_number(th["p_th_db"], "thresholds.p_th_db"),
        blackout_threshold_db=_number(th["p_bls_db"], "thresholds.p_bls_db"),
    )


def load_scenario(path) -> Scenario:
    """Load and validate a scenario YAML file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read scenario file {p}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{p}: not valid YAML: {exc}") from exc
    if doc is None:
        raise ScenarioError(f"{p}: empty scenario file")
    return scenario_from_config(doc)


def fixture_path(name: str) -> Path:
    """Filesystem path of a bundled scenario fixture (name without suffix)."""
    base = resources.files("emskin") / "fixtures"
    p = Path(str(base / f"{name}.yaml"))
    if not p.is_file():
        raise FileNotFoundError(
            f"no bundled scenario named {name!r}; available: {', '.join(list_fixtures())}"
        )
    return p


def list_fixtures() -> list[str]:
    base = Path(str(resources.files("emskin") / "fixtures"))
    return sorted(p.stem for p in base.glob("*.yaml"))
