"""Binary two-objective NSGA-II over admissible tile layouts.

Individuals are bit vectors over the tile raster; inadmissible cells are
hard-masked out of initialization and mutation, so no candidate ever
installs a tile there.  Selection is binary tournament on (rank, crowding)
with index tiebreak, variation is bitwise crossover plus per-bit flips, and
survival is elitist (mu + lambda) truncation on the merged parent/child
pool.  Objective evaluation is one matrix product against the precomputed
per-tile receiver power matrix, so the whole search is array-shaped.

Randomness is reproducible: the seed is split into one child stream per
generation, and identical (config, scenario, field config, seed) yield a
bit-identical final front.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import FieldConfig, tile_power_matrix
from .geometry import Scenario
from .objectives import Layout

_CROSSOVER_OPS = ("uniform", "one_point", "two_point")


@dataclass(frozen=True)
class GaConfig:
    """Search hyperparameters.

    ``mutation_rate`` of None resolves to 1/N at run time.
    ``max_iterations`` of 0 is the degenerate run: evaluate the random
    initial population and extract its front.  The two distribution
    indices are recorded for provenance with real-coded operator
    conventions but are inert here: the binary operators do not have a
    distribution shape.
    """

    population_size: int
    max_iterations: int
    crossover_rate: float = 1.0
    mutation_rate: float | None = None
    dist_index_crossover: float = 15.0
    dist_index_mutation: float = 20.0
    rng_seed: int = 0
    crossover_op: str = "uniform"
    snapshot_every: int = 0

    def __post_init__(self):
        if self.population_size < 4 or self.population_size % 2:
            raise ValueError(
                f"population_size must be an even number >= 4, got {self.population_size}"
            )
        if self.max_iterations < 0:
            raise ValueError(f"max_iterations must be >= 0, got {self.max_iterations}")
        if not (0.0 <= self.crossover_rate <= 1.0):
            raise ValueError(f"crossover_rate outside [0, 1]: {self.crossover_rate}")
        if self.mutation_rate is not None and not (0.0 <= self.mutation_rate <= 1.0):
            raise ValueError(f"mutation_rate outside [0, 1]: {self.mutation_rate}")
        if self.crossover_op not in _CROSSOVER_OPS:
            raise ValueError(
                f"crossover_op must be one of {_CROSSOVER_OPS}, got {self.crossover_op!r}"
            )
        if self.snapshot_every < 0:
            raise ValueError(f"snapshot_every must be >= 0, got {self.snapshot_every}")


@dataclass(frozen=True)
class Individual:
    """One evaluated candidate with its survival bookkeeping."""

    layout: Layout
    shortfall: float   # coverage objective, minimized
    tile_fraction: float  # cost objective, minimized
    rank: int = 0
    crowding: float = 0.0

    @property
    def objectives(self) -> tuple[float, float]:
        return (self.shortfall, self.tile_fraction)


@dataclass(frozen=True)
class ParetoFront:
    """Deduplicated nondominated set, sorted by strictly increasing cost."""

    solutions: tuple

    def __len__(self) -> int:
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)

    def __getitem__(self, i) -> Individual:
        return self.solutions[i]

    def objective_array(self) -> np.ndarray:
        return np.array([s.objectives for s in self.solutions], dtype=float).reshape(-1, 2)

    def best_full_coverage(self) -> Individual | None:
        """Cheapest solution with zero shortfall, None if the front has none."""
        for s in self.solutions:
            if s.shortfall == 0.0:
                return s
        return None


@dataclass(frozen=True)
class FrontSnapshot:
    iteration: int
    front: ParetoFront


@dataclass(frozen=True)
class EvolveResult:
    front: ParetoFront
    population_bits: np.ndarray
    population_objectives: np.ndarray
    history: tuple
    n_evaluations: int


# ---------------------------------------------------------------------------
# Dominance machinery
# ---------------------------------------------------------------------------

def dominates(a, b) -> bool:
    """True iff objective vector ``a`` Pareto-dominates ``b`` (minimize both)."""
    return a[0] <= b[0] and a[1] <= b[1] and (a[0] < b[0] or a[1] < b[1])


def fast_nondominated_sort(objectives) -> tuple[np.ndarray, list]:
    """Rank a population by Pareto dominance.

    Parameters
    ----------
    objectives : array_like, shape (n, 2)

    Returns
    -------
    ranks : ndarray, shape (n,)
        0 for the nondominated front, 1 for the next, ...
    fronts : list of ndarray
        Member indices per front, ascending index order within a front.
    """
    f = np.asarray(objectives, dtype=float).reshape(-1, 2)
    n = f.shape[0]
    if n == 0:
        return np.zeros(0, dtype=int), []
    le = (f[:, None, 0] <= f[None, :, 0]) & (f[:, None, 1] <= f[None, :, 1])
    lt = (f[:, None, 0] < f[None, :, 0]) | (f[:, None, 1] < f[None, :, 1])
    dom = le & lt  # dom[i, j]: i dominates j
    n_dominators = dom.sum(axis=0).astype(np.int64)
    ranks = np.full(n, -1, dtype=int)
    fronts = []
    current = np.flatnonzero(n_dominators == 0)
    k = 0
    while current.size:
        ranks[current] = k
        fronts.append(current)
        n_dominators -= dom[current].sum(axis=0)
        n_dominators[ranks >= 0] = -1
        current = np.flatnonzero(n_dominators == 0)
        k += 1
    return ranks, fronts


def crowding_distance(front_objectives) -> np.ndarray:
    """Crowding distance of every member of one front.

    Boundary members per objective get +inf; interior members accumulate
    the normalized span of their neighbors.  A zero objective span
    contributes nothing (degenerate-front convention).
    """
    f = np.asarray(front_objectives, dtype=float).reshape(-1, 2)
    m = f.shape[0]
    dist = np.zeros(m)
    if m == 0:
        return dist
    if m <= 2:
        return np.full(m, np.inf)
    for col in range(2):
        order = np.argsort(f[:, col], kind="stable")
        vals = f[order, col]
        dist[order[0]] = dist[order[-1]] = np.inf
        span = vals[-1] - vals[0]
        if span > 0.0:
            dist[order[1:-1]] += (vals[2:] - vals[:-2]) / span
    return dist


def hypervolume(front_objectives, reference=(1.1, 1.1)) -> float:
    """Dominated area of a 2-objective front w.r.t. a reference point.

    Points outside the reference box contribute nothing.
    """
    f = np.asarray(front_objectives, dtype=float).reshape(-1, 2)
    r1, r2 = float(reference[0]), float(reference[1])
    f = f[(f[:, 0] < r1) & (f[:, 1] < r2)]
    if f.shape[0] == 0:
        return 0.0
    order = np.lexsort((f[:, 1], f[:, 0]))
    f = f[order]
    # reduce to the staircase: drop points dominated within the input
    xs, ys = [], []
    best_y = math.inf
    for px, py in f:
        if py < best_y:
            xs.append(px)
            ys.append(py)
            best_y = py
    hv = 0.0
    for i, (px, py) in enumerate(zip(xs, ys)):
        nxt = xs[i + 1] if i + 1 < len(xs) else r1
        hv += (nxt - px) * (r2 - py)
    return hv


# ---------------------------------------------------------------------------
# Evolution loop
# ---------------------------------------------------------------------------

def initialize(config: GaConfig, scenario: Scenario, rng: np.random.Generator) -> np.ndarray:
    """Random population: independent fair bits on admissible cells only."""
    bits = rng.integers(0, 2, size=(config.population_size, scenario.n_tiles)).astype(bool)
    return bits & scenario.facade.admissible[None, :]


def _evaluate(bits, power_matrix, threshold_linear, n_tiles) -> np.ndarray:
    powers = bits.astype(float) @ power_matrix
    deficit = np.maximum(threshold_linear - powers, 0.0) / threshold_linear
    return np.column_stack([deficit.mean(axis=1), bits.sum(axis=1) / n_tiles])


def _tournament(rank, crowding, pairs) -> np.ndarray:
    a, b = pairs[:, 0], pairs[:, 1]
    a_wins = (rank[a] < rank[b]) | (
        (rank[a] == rank[b])
        & ((crowding[a] > crowding[b]) | ((crowding[a] == crowding[b]) & (a <= b)))
    )
    return np.where(a_wins, a, b)


def _crossover(pa, pb, config: GaConfig, rng: np.random.Generator):
    n_pairs, n = pa.shape
    do = rng.random(n_pairs) < config.crossover_rate
    if config.crossover_op == "uniform":
        take_a = rng.random((n_pairs, n)) < 0.5
    else:
        cols = np.arange(n)[None, :]
        if config.crossover_op == "one_point":
            cut = rng.integers(1, n, size=n_pairs) if n > 1 else np.ones(n_pairs, dtype=int)
            take_a = cols < cut[:, None]
        else:  # two_point
            c = np.sort(rng.integers(0, n + 1, size=(n_pairs, 2)), axis=1)
            take_a = ~((cols >= c[:, :1]) & (cols < c[:, 1:]))
    take_a |= ~do[:, None]
    child1 = np.where(take_a, pa, pb)
    child2 = np.where(take_a, pb, pa)
    return child1, child2


def _mutate(bits, rate, admissible, rng: np.random.Generator) -> np.ndarray:
    flips = (rng.random(bits.shape) < rate) & admissible[None, :]
    return bits ^ flips


def _environmental_selection(objectives, keep: int):
    """Indices surviving (mu + lambda) truncation, plus their ranks."""
    ranks, fronts = fast_nondominated_sort(objectives)
    chosen = []
    for front in fronts:
        if len(chosen) + front.size <= keep:
            chosen.extend(front.tolist())
            if len(chosen) == keep:
                break
            continue
        need = keep - len(chosen)
        cd = crowding_distance(objectives[front])
        order = np.lexsort((front, -cd))  # crowding desc, then earlier index
        chosen.extend(front[order[:need]].tolist())
        break
    idx = np.array(chosen, dtype=int)
    return idx, ranks


def extract_pareto(bits, objectives) -> ParetoFront:
    """Exported front of a population: nondominated, deduplicated, sorted.

    Among nondominated members sharing the same tile fraction (hence, by
    nondominance, the same shortfall) the earliest population index is
    kept, so the exported cost column is strictly increasing.
    """
    obj = np.asarray(objectives, dtype=float).reshape(-1, 2)
    if obj.shape[0] == 0:
        raise ValueError("cannot extract a front from an empty population")
    _, fronts = fast_nondominated_sort(obj)
    first = fronts[0]
    order = first[np.lexsort((first, obj[first, 1]))]
    picked = []
    last_phi2 = None
    for i in order:
        if last_phi2 is not None and obj[i, 1] == last_phi2:
            continue
        picked.append(int(i))
        last_phi2 = obj[i, 1]
    cd = crowding_distance(obj[picked])
    sols = tuple(
        Individual(
            layout=Layout(np.asarray(bits[i], dtype=bool)),
            shortfall=float(obj[i, 0]),
            tile_fraction=float(obj[i, 1]),
            rank=0,
            crowding=float(cd[j]),
        )
        for j, i in enumerate(picked)
    )
    return ParetoFront(solutions=sols)


def evolve(config: GaConfig, scenario: Scenario, field_cfg: FieldConfig) -> EvolveResult:
    """Run the full design search on a scenario.

    Returns the final exported front, the last population, and front
    snapshots taken every ``config.snapshot_every`` generations (plus the
    final generation; none if 0).
    """
    pm = tile_power_matrix(scenario, field_cfg, scenario.receivers)
    return evolve_matrix(
        config, pm, scenario.power_threshold_linear, scenario.facade.admissible
    )


def evolve_matrix(
    config: GaConfig, power_matrix, threshold_linear: float, admissible
) -> EvolveResult:
    """Run the design search against a precomputed per-tile power matrix.

    ``power_matrix`` has shape (N, U); ``admissible`` is the (N,) bool
    installation mask.  :func:`evolve` is the scenario-level wrapper.
    """
    pm = np.asarray(power_matrix, dtype=float)
    admissible = np.asarray(admissible, dtype=bool)
    n = pm.shape[0]
    if admissible.shape != (n,):
        raise ValueError(f"admissible mask shape {admissible.shape} != ({n},)")
    if not admissible.any():
        raise ValueError("admissible mask allows no tiles")
    pop_size = config.population_size
    rate = 1.0 / n if config.mutation_rate is None else config.mutation_rate
    p_th = threshold_linear

    streams = np.random.SeedSequence(config.rng_seed).spawn(config.max_iterations + 1)
    rng0 = np.random.Generator(np.random.PCG64(streams[0]))
    bits = rng0.integers(0, 2, size=(pop_size, n)).astype(bool) & admissible[None, :]
    obj = _evaluate(bits, pm, p_th, n)
    n_evaluations = pop_size

    history = []
    ranks, fronts = fast_nondominated_sort(obj)
    crowd = np.zeros(pop_size)
    for front in fronts:
        crowd[front] = crowding_distance(obj[front])

    for it in range(1, config.max_iterations + 1):
        rng = np.random.Generator(np.random.PCG64(streams[it]))
        pairs = rng.integers(0, pop_size, size=(pop_size, 2))
        winners = _tournament(ranks, crowd, pairs)
        pa = bits[winners[0::2]]
        pb = bits[winners[1::2]]
        child1, child2 = _crossover(pa, pb, config, rng)
        children = np.empty_like(bits)
        children[0::2] = child1
        children[1::2] = child2
        children = _mutate(children, rate, admissible, rng)
        child_obj = _evaluate(children, pm, p_th, n)
        n_evaluations += pop_size

        merged_bits = np.concatenate([bits, children], axis=0)
        merged_obj = np.concatenate([obj, child_obj], axis=0)
        keep_idx, _ = _environmental_selection(merged_obj, pop_size)
        bits = merged_bits[keep_idx]
        obj = merged_obj[keep_idx]

        ranks, fronts = fast_nondominated_sort(obj)
        crowd = np.zeros(pop_size)
        for front in fronts:
            crowd[front] = crowding_distance(obj[front])

        if config.snapshot_every and (
            it % config.snapshot_every == 0 or it == config.max_iterations
        ):
            history.append(FrontSnapshot(iteration=it, front=extract_pareto(bits, obj)))

    if config.snapshot_every and not history:  # degenerate max_iterations = 0
        history.append(FrontSnapshot(iteration=0, front=extract_pareto(bits, obj)))

    return EvolveResult(
        front=extract_pareto(bits, obj),
        population_bits=bits,
        population_objectives=obj,
        history=tuple(history),
        n_evaluations=n_evaluations,
    )
