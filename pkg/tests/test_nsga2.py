import itertools

import numpy as np
import pytest

from emskin.nsga2 import (
    GaConfig,
    crowding_distance,
    dominates,
    evolve,
    evolve_matrix,
    extract_pareto,
    fast_nondominated_sort,
    hypervolume,
    initialize,
)


def _brute_objectives(all_bits, pm, p_th):
    """Independent objective computation for exhaustive oracles."""
    powers = all_bits.astype(float) @ pm
    deficit = np.maximum(p_th - powers, 0.0) / p_th
    return np.column_stack([deficit.mean(axis=1), all_bits.sum(axis=1) / pm.shape[0]])


def _exhaustive_front(pm, p_th):
    n = pm.shape[0]
    all_bits = np.array(list(itertools.product((0, 1), repeat=n)), dtype=bool)
    return extract_pareto(all_bits, _brute_objectives(all_bits, pm, p_th))


def _objective_set(front):
    return {(s.shortfall, s.tile_fraction) for s in front}


def _initial_population(scenario, field_cfg, seed, pop_size=24):
    """Initial population of an evolve run: a zero-iteration run returns it."""
    ga = GaConfig(population_size=pop_size, max_iterations=0, rng_seed=seed)
    return evolve(ga, scenario, field_cfg).population_bits


def test_dominates_cases():
    assert dominates((0.1, 0.2), (0.2, 0.2))
    assert not dominates((0.1, 0.3), (0.2, 0.2))  # incomparable
    assert not dominates((0.2, 0.2), (0.1, 0.3))
    assert not dominates((0.2, 0.2), (0.2, 0.2))  # equality is not dominance


def test_sort_small_example():
    pts = [(1, 1), (2, 2), (1, 2), (2, 1)]
    ranks, fronts = fast_nondominated_sort(pts)
    assert [sorted(f.tolist()) for f in fronts] == [[0], [2, 3], [1]]
    np.testing.assert_array_equal(ranks, [0, 2, 1, 1])


def test_sort_degenerate_shapes():
    ranks, fronts = fast_nondominated_sort([(0.3, 0.3)] * 5)
    assert len(fronts) == 1 and (ranks == 0).all()
    chain = [(i, i) for i in range(6)]
    ranks, fronts = fast_nondominated_sort(chain)
    assert len(fronts) == 6
    np.testing.assert_array_equal(ranks, np.arange(6))


def test_sort_against_pairwise_bruteforce(rng):
    """Each front must be exactly the nondominated set of what remains."""
    for _ in range(200):
        pts = rng.random((rng.integers(2, 25), 2))
        ranks, fronts = fast_nondominated_sort(pts)
        assert sum(len(f) for f in fronts) == len(pts)
        remaining = set(range(len(pts)))
        for front in fronts:
            nondom = {
                i
                for i in remaining
                if not any(dominates(pts[j], pts[i]) for j in remaining if j != i)
            }
            assert set(front.tolist()) == nondom
            remaining -= nondom


def test_crowding_examples():
    np.testing.assert_array_equal(crowding_distance([(0, 1), (1, 0)]), [np.inf, np.inf])
    assert crowding_distance([(0.5, 0.5)])[0] == np.inf
    d = crowding_distance([(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)])
    assert d[0] == np.inf and d[2] == np.inf
    assert d[1] == pytest.approx(2.0)  # 1 + 1 after per-objective normalization
    d = crowding_distance([(0.3, 0.3)] * 4)
    assert d[0] == np.inf and d[-1] == np.inf
    assert d[1] == d[2] == 0.0  # zero-span convention


def test_crowding_boundaries_random(rng):
    for _ in range(100):
        pts = rng.random((rng.integers(3, 12), 2))
        d = crowding_distance(pts)
        assert d[np.argmin(pts[:, 0])] == np.inf
        assert d[np.argmax(pts[:, 0])] == np.inf
        assert (d >= 0).all()


def test_hypervolume_known_values():
    assert hypervolume([(0.2, 0.4)]) == pytest.approx(0.9 * 0.7)
    assert hypervolume([(0.2, 0.8), (0.6, 0.3)]) == pytest.approx(0.52)
    # dominated point contributes nothing
    assert hypervolume([(0.2, 0.8), (0.6, 0.3), (0.7, 0.9)]) == pytest.approx(0.52)
    # points outside the reference box are ignored
    assert hypervolume([(2.0, 2.0)]) == 0.0
    assert hypervolume([]) == 0.0


def test_hypervolume_monotone_in_points(rng):
    for _ in range(100):
        pts = rng.random((8, 2)).tolist()
        hv = 0.0
        for m in range(1, 9):
            new = hypervolume(pts[:m])
            assert new >= hv - 1e-15
            hv = new


def test_ga_config_validation():
    with pytest.raises(ValueError):
        GaConfig(population_size=5, max_iterations=10)
    with pytest.raises(ValueError):
        GaConfig(population_size=2, max_iterations=10)
    with pytest.raises(ValueError):
        GaConfig(population_size=8, max_iterations=-1)
    with pytest.raises(ValueError):
        GaConfig(population_size=8, max_iterations=1, crossover_rate=1.5)
    with pytest.raises(ValueError):
        GaConfig(population_size=8, max_iterations=1, mutation_rate=-0.1)
    with pytest.raises(ValueError):
        GaConfig(population_size=8, max_iterations=1, crossover_op="sbx")
    with pytest.raises(ValueError):
        GaConfig(population_size=8, max_iterations=1, snapshot_every=-1)
    GaConfig(population_size=8, max_iterations=0)  # degenerate run is legal


def test_initialize_respects_mask_and_seed(masked):
    cfg = GaConfig(population_size=30, max_iterations=1, rng_seed=5)
    pop1 = initialize(cfg, masked, np.random.default_rng(99))
    pop2 = initialize(cfg, masked, np.random.default_rng(99))
    assert pop1.shape == (30, masked.n_tiles)
    np.testing.assert_array_equal(pop1, pop2)
    assert not (pop1 & ~masked.facade.admissible[None, :]).any()
    assert pop1.any()  # not degenerate all-zero


def test_evolve_deterministic(toy, paper_cfg):
    cfg = GaConfig(population_size=20, max_iterations=40, rng_seed=11, snapshot_every=10)
    r1 = evolve(cfg, toy, paper_cfg)
    r2 = evolve(cfg, toy, paper_cfg)
    np.testing.assert_array_equal(r1.population_bits, r2.population_bits)
    np.testing.assert_array_equal(r1.population_objectives, r2.population_objectives)
    assert _objective_set(r1.front) == _objective_set(r2.front)
    assert [s.iteration for s in r1.history] == [10, 20, 30, 40]
    assert r1.n_evaluations == 20 * 41
    assert r1.population_bits.shape == (20, toy.n_tiles)


def test_evolve_seed_changes_search(toy, paper_cfg):
    base = dict(population_size=20, max_iterations=5)
    r1 = evolve(GaConfig(rng_seed=1, **base), toy, paper_cfg)
    r2 = evolve(GaConfig(rng_seed=2, **base), toy, paper_cfg)
    assert not np.array_equal(r1.population_bits, r2.population_bits)


def test_evolve_respects_mask(masked, paper_cfg):
    cfg = GaConfig(population_size=16, max_iterations=30, rng_seed=3)
    r = evolve(cfg, masked, paper_cfg)
    bad = ~masked.facade.admissible
    assert not (r.population_bits & bad[None, :]).any()
    for sol in r.front:
        assert not (sol.layout.bits & bad).any()


def test_selection_only_closure(toy, paper_cfg):
    """With crossover and mutation off, no new genetic material appears."""
    seed = 17
    initial = {row.tobytes() for row in _initial_population(toy, paper_cfg, seed)}
    cfg = GaConfig(
        population_size=24, max_iterations=50, rng_seed=seed,
        crossover_rate=0.0, mutation_rate=0.0,
    )
    r = evolve(cfg, toy, paper_cfg)
    assert all(row.tobytes() in initial for row in r.population_bits)


def test_zero_iterations_scores_initial_population(toy, paper_cfg):
    ga = GaConfig(population_size=24, max_iterations=0, rng_seed=8, snapshot_every=10)
    r = evolve(ga, toy, paper_cfg)
    assert r.n_evaluations == 24
    assert [s.iteration for s in r.history] == [0]
    rng0 = np.random.Generator(np.random.PCG64(np.random.SeedSequence(8).spawn(1)[0]))
    np.testing.assert_array_equal(r.population_bits, initialize(ga, toy, rng0))
    want = extract_pareto(r.population_bits, r.population_objectives)
    assert _objective_set(r.front) == _objective_set(want)


def test_elitism_hypervolume_never_drops(toy, paper_cfg):
    ga = GaConfig(population_size=24, max_iterations=120, rng_seed=2, snapshot_every=5)
    r = evolve(ga, toy, paper_cfg)
    ref = (1.1, 1.1)  # both objectives live in [0, 1]
    hv = 0.0
    for snap in r.history:
        new = hypervolume(snap.front.objective_array(), ref)
        assert new >= hv - 1e-12
        hv = new
    assert len(r.history) == 24


def test_extract_pareto_contract(toy, paper_cfg):
    for seed in range(30):
        ga = GaConfig(population_size=16, max_iterations=15, rng_seed=seed)
        front = evolve(ga, toy, paper_cfg).front
        obj = front.objective_array()
        # strictly increasing cost, mutually nondominated, rank 0 throughout
        assert (np.diff(obj[:, 1]) > 0).all()
        for a, b in itertools.combinations(range(len(front)), 2):
            assert not dominates(obj[a], obj[b])
            assert not dominates(obj[b], obj[a])
        assert all(s.rank == 0 for s in front)
        full = front.best_full_coverage()
        assert full is None or full.shortfall == 0.0


def test_extract_pareto_dedup_and_errors():
    bits = np.array([[1, 0], [0, 1], [1, 0]], dtype=bool)
    obj = np.array([[0.5, 0.5], [0.5, 0.5], [0.5, 0.5]])
    front = extract_pareto(bits, obj)
    assert len(front) == 1  # duplicates collapse to the earliest member
    np.testing.assert_array_equal(front[0].layout.bits, [True, False])
    with pytest.raises(ValueError, match="empty"):
        extract_pareto(np.zeros((0, 2), dtype=bool), np.zeros((0, 2)))
    single = extract_pareto(bits[:1], obj[:1])
    assert len(single) == 1


def test_evolve_matrix_matches_exhaustive_on_small_problems(rng):
    """6-bit synthetic problems: the search must find the exact Pareto set."""
    for case in range(10):
        pm = rng.uniform(0.0, 2.0, size=(6, 9))
        p_th = rng.uniform(1.5, 4.0)
        want = _objective_set(_exhaustive_front(pm, p_th))
        ga = GaConfig(population_size=12, max_iterations=60, rng_seed=case)
        got = evolve_matrix(ga, pm, p_th, np.ones(6, dtype=bool))
        assert _objective_set(got.front) == want


def test_evolve_matrix_rejects_bad_mask():
    pm = np.ones((4, 3))
    with pytest.raises(ValueError, match="admissible"):
        evolve_matrix(GaConfig(population_size=4, max_iterations=1), pm, 1.0,
                      np.zeros(4, dtype=bool))
    with pytest.raises(ValueError, match="shape"):
        evolve_matrix(GaConfig(population_size=4, max_iterations=1), pm, 1.0,
                      np.ones(5, dtype=bool))


def test_alternative_crossover_ops(toy, paper_cfg):
    for op in ("one_point", "two_point"):
        ga = GaConfig(population_size=12, max_iterations=20, rng_seed=4, crossover_op=op)
        r = evolve(ga, toy, paper_cfg)
        assert len(r.front) >= 1
        r2 = evolve(ga, toy, paper_cfg)
        np.testing.assert_array_equal(r.population_bits, r2.population_bits)
