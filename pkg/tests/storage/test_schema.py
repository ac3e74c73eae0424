import pytest
from pydantic import ValidationError

from src.domains.schema import PusherParams, SkirmishParams
from src.storage.schema import RunManifest


def test_defaults_describe_a_skirmish_run():
    manifest = RunManifest()
    assert manifest.schema_version == 1
    assert isinstance(manifest.domain, SkirmishParams)
    assert manifest.created_at is None


def test_domain_is_picked_by_name():
    manifest = RunManifest.model_validate({"domain": {"name": "pusher", "max_steps": 30}})
    assert isinstance(manifest.domain, PusherParams)
    assert manifest.domain.max_steps == 30


@pytest.mark.parametrize(
    "data",
    [
        {"schema_version": 2},
        {"evolve": {"n_gen": 0}},
        {"domain": {"name": "chess"}},
        {"surprise": True},
    ],
)
def test_invalid_manifests(data):
    with pytest.raises(ValidationError):
        RunManifest.model_validate(data)


def test_canonical_drops_metadata():
    manifest = RunManifest(created_at="2026-01-01T00:00:00+00:00")
    assert manifest.canonical() == RunManifest()
