import pytest
from pydantic import ValidationError

from src.domains.schema import Side
from src.evolve.schema import ArchiveMode, GameConfig, GenerationsLog


def test_defaults_match_the_desk_scale():
    config = GameConfig()
    assert (config.n_gen, config.n_task, config.n_cell, config.n_budget, config.n_init) == (6, 10, 8, 1500, 100)
    assert config.bootstrap_enabled
    assert config.archive_mode is ArchiveMode.GROWING


@pytest.mark.parametrize(
    "fields",
    [
        {"n_init": 20, "n_budget": 10},
        {"archive_mode": "fixed_cvt", "n_cell": 50, "cvt_samples": 10},
        {"n_task": 0},
        {"master_seed": -1},
        {"population": 5},
    ],
)
def test_invalid_configs(fields):
    with pytest.raises(ValidationError):
        GameConfig(**fields)


def test_config_is_frozen():
    config = GameConfig()
    with pytest.raises(ValidationError):
        config.n_gen = 3


def test_empty_log():
    book = GenerationsLog()
    assert book.last() is None
    assert book.sides() == []
    assert Side.RED.value == "red"
