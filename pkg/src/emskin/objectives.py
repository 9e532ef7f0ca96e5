"""Design objectives: coverage shortfall and installed-tile cost.

A candidate design is a binary layout over the tile raster.  Two figures of
merit drive the search, both to be minimized:

* coverage_shortfall (phi1): mean relative power deficit over the receivers,
  in linear power units.  0 exactly when every receiver meets the threshold.
* tile_fraction (phi2): installed tiles over total lattice cells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import FieldConfig, power_to_db, tile_power_matrix
from .geometry import Scenario, receiver_lattice_shape

COVERED, CONNECTED, BLACKOUT = 2, 1, 0
CLASS_CHARS = {COVERED: "C", CONNECTED: "o", BLACKOUT: "."}


class LayoutError(ValueError):
    """Malformed or inadmissible tile layout."""


@dataclass(frozen=True)
class Layout:
    """Binary installation vector over the tile raster (immutable)."""

    bits: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bits)
        if arr.ndim != 1 or arr.size == 0:
            raise LayoutError(f"layout must be a non-empty 1-D bit vector, got shape {arr.shape}")
        if arr.dtype != bool:
            vals = np.unique(arr)
            if not np.isin(vals, (0, 1)).all():
                raise LayoutError(f"layout bits must be 0/1, got values {vals[:8]}")
            arr = arr.astype(bool)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    def __len__(self) -> int:
        return self.bits.size

    def __eq__(self, other) -> bool:
        return isinstance(other, Layout) and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    @property
    def installed_count(self) -> int:
        return int(self.bits.sum())

    @property
    def installed_indices(self) -> list[int]:
        """1-based raster indices of the installed tiles."""
        return [int(i) + 1 for i in np.flatnonzero(self.bits)]

    def to_bitstring(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    @classmethod
    def empty(cls, n: int) -> "Layout":
        return cls(np.zeros(n, dtype=bool))

    @classmethod
    def from_indices(cls, indices, n: int) -> "Layout":
        """Layout from 1-based tile indices."""
        bits = np.zeros(n, dtype=bool)
        for i in indices:
            if not (1 <= int(i) <= n):
                raise LayoutError(f"tile index {i} outside 1..{n}")
            bits[int(i) - 1] = True
        return cls(bits)

    @classmethod
    def from_bitstring(cls, s: str) -> "Layout":
        s = s.strip()
        if not s or any(c not in "01" for c in s):
            raise LayoutError(f"bit string must contain only 0/1, got {s!r}")
        return cls(np.frombuffer(s.encode(), dtype=np.uint8) == ord("1"))


def parse_layout(spec: str, n: int) -> Layout:
    """Parse a layout given either as a bit string or as 1-based indices.

    Accepts ``\"0010110...\"`` (must have exactly ``n`` characters) or a
    comma/space separated index list such as ``\"3,4,5,12\"``.
    """
    text = spec.strip()
    if not text:
        raise LayoutError("empty layout specification")
    compact = text.replace(",", " ").split()
    bit_like = len(compact) == 1 and set(compact[0]) <= {"0", "1"}
    if bit_like and len(compact[0]) == n:
        return Layout.from_bitstring(compact[0])
    try:
        indices = [int(tok) for tok in compact]
        return Layout.from_indices(indices, n)
    except (ValueError, LayoutError) as exc:
        if bit_like and len(compact[0]) > 1:
            raise LayoutError(
                f"layout bit string has {len(compact[0])} characters, expected {n}"
            ) from exc
        if isinstance(exc, LayoutError):
            raise
        raise LayoutError(
            f"layout must be an {n}-character bit string or an index list, got {spec!r}"
        ) from exc


def validate_layout(layout: Layout, scenario: Scenario) -> None:
    """Reject layouts that install tiles on inadmissible lattice cells."""
    if len(layout) != scenario.n_tiles:
        raise LayoutError(
            f"layout has {len(layout)} bits, scenario facade has {scenario.n_tiles} tiles"
        )
    bad = np.flatnonzero(layout.bits & ~scenario.facade.admissible)
    if bad.size:
        raise LayoutError(
            "layout installs tiles on inadmissible cells: "
            + ", ".join(str(i + 1) for i in bad[:10])
        )


def heaviside(x: float) -> float:
    """Unit step with H(0) = 0: a receiver exactly at threshold is covered."""
    return 1.0 if x > 0 else 0.0


def shortfall_from_powers(powers_linear, threshold_linear: float) -> float:
    """Mean relative deficit of the receivers below threshold (linear)."""
    p = np.asarray(powers_linear, dtype=float)
    deficit = np.maximum(threshold_linear - p, 0.0) / threshold_linear
    return float(deficit.mean())


def phi1(layout: Layout, receivers, scenario: Scenario, cfg: FieldConfig) -> float:
    """Coverage shortfall of a layout over the given receivers.

    Computed in linear power units; 0 exactly iff every receiver power
    meets the coverage threshold.  The all-off layout scores exactly 1.
    """
    validate_layout(layout, scenario)
    pm = tile_power_matrix(scenario, cfg, receivers)
    powers = layout.bits.astype(float) @ pm
    return shortfall_from_powers(powers, scenario.power_threshold_linear)


def phi2(layout: Layout) -> float:
    """Installed-tile fraction M/N of a layout."""
    return layout.installed_count / len(layout)


# ---------------------------------------------------------------------------
# Coverage reporting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoverageReport:
    """Receiver-level summary of one layout on one scenario.

    ``classes`` holds one entry per receiver in lattice order: 2 covered
    (at or above threshold), 1 connected (below threshold but above the
    blackout level), 0 blackout.  ``avg_db`` is the dB value of the linear
    mean power, not the mean of dB values.
    """

    min_db: float
    max_db: float
    avg_db: float
    shortfall: float
    classes: np.ndarray
    lattice_shape: tuple[int, int]

    @property
    def covered(self) -> int:
        return int((self.classes == COVERED).sum())

    @property
    def connected(self) -> int:
        return int((self.classes == CONNECTED).sum())

    @property
    def blackout(self) -> int:
        return int((self.classes == BLACKOUT).sum())

    def class_grid(self) -> np.ndarray:
        return self.classes.reshape(self.lattice_shape)


def coverage_report(
    layout: Layout, scenario: Scenario, cfg: FieldConfig, receivers=None
) -> CoverageReport:
    """Score a layout over the scenario receivers.

    Parameters
    ----------
    receivers : array_like, optional
        Override points, shape (U, 3); defaults to the scenario lattice
        (required to report the class grid in lattice shape).
    """
    validate_layout(layout, scenario)
    pts = scenario.receivers if receivers is None else np.asarray(receivers, dtype=float)
    lattice = (
        receiver_lattice_shape(scenario.aoi) if receivers is None else (1, len(pts))
    )
    pm = tile_power_matrix(scenario, cfg, pts)
    powers = layout.bits.astype(float) @ pm
    p_th = scenario.power_threshold_linear
    p_bls = scenario.blackout_threshold_linear
    classes = np.where(powers >= p_th, COVERED, np.where(powers >= p_bls, CONNECTED, BLACKOUT))
    return CoverageReport(
        min_db=float(power_to_db(powers.min())),
        max_db=float(power_to_db(powers.max())),
        avg_db=float(power_to_db(powers.mean())),
        shortfall=shortfall_from_powers(powers, p_th),
        classes=classes.astype(np.int8),
        lattice_shape=lattice,
    )
