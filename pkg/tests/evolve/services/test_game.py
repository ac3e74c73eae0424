import numpy as np
import pytest

from src.archive.schema import BehaviorVector, DistanceKind
from src.archive.services.growing import GrowingArchive
from src.domains.schema import Side
from src.evolve.schema import Solution, TaskSet
from src.evolve.services.game import (
    bootstrap_tournament,
    fresh_state,
    resume_state,
    run_game,
    run_generation,
    select_tasks,
    side_for,
)
from src.evolve.services.mtmb import elite_pool
from src.storage.services.snapshot import encode_snapshot, snapshot_violations
from src.utils.errors import GameError


def archive_of(*elites):
    archive = GrowingArchive(8, DistanceKind.EUCLIDEAN)
    for sid, fitness, point in elites:
        archive.update(sid, fitness, BehaviorVector(np.array(point, dtype=np.float64)))
    return archive


def solutions_for(archives):
    return {e.solution_id: Solution(e.solution_id, None) for e in elite_pool(archives)}


def test_sides_alternate_starting_with_red():
    assert [side_for(g) for g in range(1, 5)] == [Side.RED, Side.BLUE, Side.RED, Side.BLUE]


def test_select_tasks_takes_the_fittest_of_each_cluster():
    archives = [
        archive_of((0, 1.0, (0.0, 0.0)), (1, 2.0, (0.1, 0.0))),
        archive_of((2, 3.0, (10.0, 10.0)), (3, 0.5, (10.1, 10.0))),
    ]
    tasks = select_tasks(archives, 2, np.random.default_rng(0), Side.RED, solutions_for(archives))
    assert tasks.side is Side.RED
    assert sorted(s.solution_id for s in tasks.solutions) == [1, 2]


def test_select_tasks_breaks_fitness_ties_by_id():
    archives = [archive_of((5, 1.0, (0.0, 0.0)), (4, 1.0, (0.1, 0.0)), (9, 1.0, (0.0, 0.1)))]
    tasks = select_tasks(archives, 1, np.random.default_rng(0), Side.BLUE, solutions_for(archives))
    assert [s.solution_id for s in tasks.solutions] == [4]


def test_select_tasks_repeats_when_elites_run_out():
    archives = [archive_of((0, 1.0, (0.0, 0.0)), (1, 2.0, (5.0, 0.0)))]
    tasks = select_tasks(archives, 5, np.random.default_rng(0), Side.RED, solutions_for(archives))
    ids = [s.solution_id for s in tasks.solutions]
    assert len(ids) == 5
    assert set(ids) == {0, 1}
    assert ids[2:] == ids[:2] + ids[:1]


def test_select_tasks_on_empty_archives():
    with pytest.raises(GameError):
        select_tasks([GrowingArchive(2, DistanceKind.EUCLIDEAN)], 2, np.random.default_rng(0), Side.RED, {})


def test_bootstrap_records_follow_the_matrix(pusher, evaluator):
    rng = np.random.default_rng(1)
    new = TaskSet(Side.RED, [Solution(i, pusher.random_solution(Side.RED, rng)) for i in range(2)])
    old = TaskSet(Side.BLUE, [Solution(10 + i, pusher.random_solution(Side.BLUE, rng)) for i in range(3)])
    matrix, bootstrap = bootstrap_tournament(new, old, evaluator)
    assert matrix.shape == (2, 3)
    assert evaluator.calls == 6
    assert len(bootstrap.records) == 6
    for record in bootstrap.records:
        i = old.solutions.index(record.solution)
        assert record.fitness == matrix.fitness_cols[record.task_index, i]
        assert np.array_equal(record.behavior.values, matrix.behaviors_cols[record.task_index, i])
    np.testing.assert_array_equal(matrix.fitness_rows + matrix.fitness_cols, np.ones((2, 3)))

    _, disabled = bootstrap_tournament(new, old, evaluator, enabled=False)
    assert disabled.records == []
    with pytest.raises(GameError):
        bootstrap_tournament(new, TaskSet(Side.RED, new.solutions), evaluator)


def test_budget_and_alternation(tiny_config, pusher):
    book = run_game(tiny_config, pusher)
    assert book.sides() == [Side.RED, Side.BLUE, Side.RED]
    per_generation = tiny_config.n_budget + tiny_config.n_task**2
    assert [r.evaluations for r in book.generations] == [per_generation] * tiny_config.n_gen
    for previous, record in zip(book.generations, book.generations[1:]):
        assert record.tasks is previous.new_tasks
    for record in book.generations:
        assert record.new_tasks.side is record.side
        assert len(record.new_tasks) == tiny_config.n_task
        assert snapshot_violations(record) == []


def test_bootstrap_seeds_the_next_archives(tiny_config, pusher):
    book = run_game(tiny_config.model_copy(update={"n_gen": 2}), pusher)
    first, second = book.generations
    assert len(first.bootstrap.records) == tiny_config.n_task**2
    # every bootstrapped solution is a first-generation task
    seeded = {r.solution.solution_id for r in first.bootstrap.records}
    assert seeded == {s.solution_id for s in first.tasks.solutions}
    assert second.archives[0].stats.additions >= 1


def test_runs_are_reproducible(tiny_config, pusher):
    a = run_game(tiny_config, pusher)
    b = run_game(tiny_config, pusher)
    assert [encode_snapshot(r, pusher) for r in a.generations] == [encode_snapshot(r, pusher) for r in b.generations]


def test_worker_count_does_not_change_a_run(tiny_config, pusher):
    config = tiny_config.model_copy(update={"n_gen": 1})
    serial = run_game(config, pusher, jobs=1)
    parallel = run_game(config, pusher, jobs=2)
    assert encode_snapshot(serial.generations[0], pusher) == encode_snapshot(parallel.generations[0], pusher)


def test_resume_matches_an_uninterrupted_run(tiny_config, pusher):
    full = run_game(tiny_config, pusher)
    partial = run_game(tiny_config, pusher, stop_after=1)
    assert len(partial.generations) == 1
    state = resume_state(partial.generations[-1], list(partial.lineage.values()))
    resumed = run_game(tiny_config, pusher, state=state, log_book=partial)
    assert [encode_snapshot(r, pusher) for r in resumed.generations] == [
        encode_snapshot(r, pusher) for r in full.generations
    ]


def test_lineage_reaches_back_to_the_initial_tasks(tiny_config, pusher):
    book = run_game(tiny_config, pusher)
    last = book.generations[-1]
    for solution in last.new_tasks.solutions:
        sid = solution.solution_id
        while book.lineage[sid].parent_ids:
            sid = book.lineage[sid].parent_ids[0]
        assert book.lineage[sid].operator.value == "random"


def test_generation_rejects_tasks_of_the_evolving_side(tiny_config, pusher, evaluator):
    state = fresh_state(tiny_config, pusher)
    state.tasks = TaskSet(Side.RED, state.tasks.solutions)
    with pytest.raises(GameError):
        run_generation(state, tiny_config, pusher, evaluator)
