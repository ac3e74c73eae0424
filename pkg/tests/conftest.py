import pytest

from src.behavior.schema import DescriptorSpec
from src.config import settings
from src.domains.schema import PusherParams
from src.domains.services.pusher import PusherDomain
from src.evolve.schema import GameConfig
from src.evolve.services.evaluator import Evaluator


@pytest.fixture
def pusher() -> PusherDomain:
    # short duels keep the end-to-end tests fast
    return PusherDomain(PusherParams(max_steps=24))


@pytest.fixture
def small_spec() -> DescriptorSpec:
    return DescriptorSpec(pool_size=4, num_frames=3)


@pytest.fixture
def tiny_config(small_spec: DescriptorSpec) -> GameConfig:
    return GameConfig(n_gen=3, n_task=3, n_cell=4, n_budget=40, n_init=10, descriptor=small_spec, master_seed=7)


@pytest.fixture
def evaluator(pusher: PusherDomain, small_spec: DescriptorSpec) -> Evaluator:
    return Evaluator(pusher, small_spec)


@pytest.fixture
def runs_dir(tmp_path, monkeypatch):
    root = tmp_path / "runs"
    root.mkdir()
    monkeypatch.setattr(settings, "runs_dir", root)
    return root
