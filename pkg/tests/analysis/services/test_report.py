import numpy as np
import pytest

from src.analysis.schema import TournamentMatrix
from src.analysis.services.pca import pca2
from src.analysis.services.report import (
    COMMON_METRICS,
    generation_points,
    generation_samples,
    grid_tournament,
    metric_names,
    metric_rows,
    novelty_by_generation,
    pooled_grid,
    tournament_points,
)
from src.analysis.services.tournament import Tournament, generation_entrants, intergenerational
from src.behavior.schema import DescriptorKind, DescriptorSpec
from src.domains.schema import Side, SkirmishParams
from src.domains.services.skirmish import SkirmishDomain
from src.evolve.schema import GameConfig, GenerationsLog
from src.evolve.services.evaluator import Evaluator
from src.evolve.services.game import run_game
from src.evolve.services.mtmb import elite_pool
from src.utils import rng as streams
from src.utils.errors import TournamentError


@pytest.fixture
def book(tiny_config, pusher):
    return run_game(tiny_config, pusher)


def test_metric_names_depend_on_the_domain(pusher):
    names = metric_names(pusher)
    assert names[: len(COMMON_METRICS)] == COMMON_METRICS
    assert names[-1] == "mean_speed"
    skirmish = metric_names(SkirmishDomain())
    assert "action_entropy" in skirmish
    assert "atomic_usage:goto:50" in skirmish


def test_generation_points_are_the_elites(book):
    record = book.generations[0]
    points, fitness = generation_points(record)
    elites = elite_pool(record.archives)
    assert points.shape[0] == fitness.shape[0] == len(elites)
    assert fitness.tolist() == [e.fitness for e in elites]


def test_pooled_grid_spans_every_generation(book, evaluator):
    tournament = grid_tournament([book], evaluator)
    grid = pooled_grid([book], tournament)
    assert np.all(grid.low <= grid.high)
    for record in book.generations:
        coords = grid.projection.project(generation_samples(record, 0, tournament)[0])
        assert np.all(coords >= grid.low - 1e-9)
        assert np.all(coords <= grid.high + 1e-9)


def test_first_generation_of_each_side_has_no_novelty(book, evaluator):
    novelty = novelty_by_generation(intergenerational([book], evaluator), 0)
    assert sorted(novelty) == [1, 2, 3]
    assert novelty[1] == novelty[2] == 0.0
    assert 0.0 <= novelty[3] <= 1.0


def test_metric_rows_for_a_pusher_run(book, pusher, evaluator, tiny_config):
    rows = metric_rows([book], ["run-a"], pusher, evaluator)
    names = metric_names(pusher)
    assert len(rows) == len(names) * tiny_config.n_gen
    table = {(r.generation, r.metric): r.value for r in rows}
    assert {r.run_id for r in rows} == {"run-a"}
    for g in range(1, tiny_config.n_gen + 1):
        assert table[g, "evaluations"] == tiny_config.n_budget + tiny_config.n_task**2
        assert 0.0 < table[g, "coverage"] <= 1.0
        assert 0.0 <= table[g, "mean_elite_fitness"] <= table[g, "max_elite_fitness"] <= 1.0
        assert 1.0 <= table[g, "elites"] <= tiny_config.n_task * tiny_config.n_cell
        assert table[g, "mean_speed"] >= 0.0
        assert 0.0 <= table[g, "mean_solution_size"] <= 9.0


def test_metric_rows_for_a_skirmish_run():
    domain = SkirmishDomain(SkirmishParams(units_per_side=2, max_steps=20))
    spec = DescriptorSpec(kind=DescriptorKind.HANDCRAFTED_SKIRMISH)
    config = GameConfig(n_gen=2, n_task=2, n_cell=3, n_budget=12, n_init=6, descriptor=spec, master_seed=3)
    book = run_game(config, domain)
    rows = metric_rows([book], ["s"], domain, Evaluator(domain, spec))
    table = {(r.generation, r.metric): r.value for r in rows}
    for g in (1, 2):
        assert 0.0 <= table[g, "action_entropy"] <= np.log2(5)
        assert 0.0 <= table[g, "atomic_usage:attack:closest"] <= 1.0


def test_no_generations_no_rows(pusher, evaluator):
    assert metric_rows([GenerationsLog()], ["empty"], pusher, evaluator) == []


def synthetic_tournament(logs, offset=50.0):
    """Tournament over the logs' real entrants with made-up behaviors far from any archive elite."""
    reds = generation_entrants(logs, Side.RED)
    blues = generation_entrants(logs, Side.BLUE)
    n, m = len(reds), len(blues)
    dimension = len(logs[0].generations[0].archives[0].elites()[0].behavior)
    rng = np.random.default_rng(5)
    fitness_rows = rng.uniform(size=(n, m))
    matrix = TournamentMatrix(
        row_side=Side.RED,
        row_ids=[e.solution.solution_id for e in reds],
        col_ids=[e.solution.solution_id for e in blues],
        fitness_rows=fitness_rows,
        fitness_cols=1.0 - fitness_rows,
        keys=np.zeros((n, m), dtype=np.uint64),
        behaviors_rows=offset + rng.normal(size=(n, m, dimension)) * np.linspace(1.0, 3.0, dimension),
        behaviors_cols=offset + rng.normal(size=(n, m, dimension)),
    )
    return Tournament(matrix, reds, blues)


def test_pooled_grid_is_fitted_on_tournament_behaviors(book):
    logs = [book, book]
    tournament = synthetic_tournament(logs)
    matrix = tournament.matrix
    dimension = matrix.behaviors_rows.shape[-1]
    block = np.concatenate([matrix.behaviors_rows.reshape(-1, dimension), matrix.behaviors_cols.reshape(-1, dimension)])
    expected = pca2(block, streams.derive_rng(0, streams.PCA))

    grid = pooled_grid(logs, tournament)

    np.testing.assert_allclose(grid.projection.mean, expected.mean)
    np.testing.assert_allclose(grid.projection.components, expected.components)
    np.testing.assert_allclose(grid.low, expected.coordinates.min(axis=0))
    elites_only = pooled_grid(logs)
    assert not np.allclose(elites_only.projection.mean, grid.projection.mean)


def test_generation_samples_come_from_its_duels(book):
    logs = [book, book]
    tournament = synthetic_tournament(logs)
    matrix = tournament.matrix
    n_task = len(book.generations[0].new_tasks.solutions)
    reds_per_run = len(tournament.rows) // 2
    blues_per_run = len(tournament.cols) // 2

    # Red generation 3 of the second run: its rows against every Blue entrant
    rows = [reds_per_run + n_task + i for i in range(n_task)]
    points, fitness, keys = generation_samples(book.generations[2], 1, tournament)
    np.testing.assert_array_equal(points, matrix.behaviors_rows[rows].reshape(-1, points.shape[1]))
    np.testing.assert_array_equal(fitness, matrix.fitness_rows[rows].reshape(-1))
    assert len(keys) == n_task * len(tournament.cols)
    assert keys[0].startswith("g3:s") and ":vs:r0:g2:" in keys[0]

    # Blue generation 2 of the second run: its columns against every Red entrant
    cols = [blues_per_run + j for j in range(n_task)]
    points, fitness, _ = generation_samples(book.generations[1], 1, tournament)
    np.testing.assert_array_equal(points, matrix.behaviors_cols[:, cols].reshape(-1, points.shape[1]))
    np.testing.assert_array_equal(fitness, matrix.fitness_cols[:, cols].reshape(-1))


def test_samples_need_tournament_behaviors(book, evaluator):
    bare = intergenerational([book], evaluator)
    with pytest.raises(TournamentError):
        tournament_points(bare, 0, 1)
    with pytest.raises(TournamentError):
        pooled_grid([book], bare)
    with pytest.raises(TournamentError):
        tournament_points(synthetic_tournament([book]), 0, 7)


def test_one_sided_runs_fall_back_to_archive_elites(tiny_config, pusher, evaluator):
    book = run_game(tiny_config.model_copy(update={"n_gen": 1}), pusher)
    assert grid_tournament([book], evaluator) is None
    record = book.generations[0]
    points, fitness, keys = generation_samples(record, 0, None)
    elite_points, elite_fitness = generation_points(record)
    np.testing.assert_array_equal(points, elite_points)
    np.testing.assert_array_equal(fitness, elite_fitness)
    assert keys == [f"g1:s{e.solution_id}" for e in elite_pool(record.archives)]
    rows = metric_rows([book], ["solo"], pusher, evaluator)
    (coverage,) = [r.value for r in rows if r.metric == "coverage"]
    assert 0.0 < coverage <= 1.0
