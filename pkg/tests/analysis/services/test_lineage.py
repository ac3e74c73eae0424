import pytest

from src.analysis.services.lineage import lineage_chain
from src.evolve.schema import LineageRecord, Operator
from src.utils.errors import GameError


def record(sid, parents=(), operator=Operator.RANDOM, generation=1):
    return LineageRecord(sid, tuple(parents), generation, operator, f"genome-{sid}")


@pytest.fixture
def lineage():
    return {
        r.solution_id: r
        for r in [
            record(0),
            record(1),
            record(2, (0,), Operator.MUTATION),
            record(3, (2, 1), Operator.CROSSOVER, generation=2),
            record(4, (3,), Operator.MUTATION, generation=3),
        ]
    }


def test_chain_follows_first_parents(lineage):
    chain = lineage_chain(lineage, 4)
    assert [link.record.solution_id for link in chain] == [4, 3, 2, 0]
    assert [link.other_parent for link in chain] == [None, 1, None, None]
    assert chain[-1].record.operator is Operator.RANDOM


def test_root_chain_is_itself(lineage):
    chain = lineage_chain(lineage, 1)
    assert len(chain) == 1
    assert chain[0].record.payload == "genome-1"


def test_unknown_or_broken_lineage(lineage):
    with pytest.raises(GameError):
        lineage_chain(lineage, 99)
    del lineage[2]
    with pytest.raises(GameError):
        lineage_chain(lineage, 4)
