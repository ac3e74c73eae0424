import pytest

from src.cli.services.commands import cmd_run

TINY = [
    "domain.max_steps=24",
    "evolve.n_gen=2",
    "evolve.n_task=3",
    "evolve.n_cell=4",
    "evolve.n_budget=30",
    "evolve.n_init=10",
    "evolve.descriptor.pool_size=4",
    "evolve.descriptor.num_frames=3",
]


@pytest.fixture
def stored_run(runs_dir):
    """A finished two-generation pusher run under the runs directory."""
    cmd_run("pusher_desk", TINY, runs_dir / "demo")
    return runs_dir / "demo"
