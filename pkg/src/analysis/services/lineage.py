from dataclasses import dataclass
from typing import List, Mapping, Optional

from src.evolve.schema import LineageRecord
from src.utils.errors import GameError


@dataclass(frozen=True)
class ChainLink:
    record: LineageRecord
    # second parent of a crossover, not followed
    other_parent: Optional[int] = None


def lineage_chain(lineage: Mapping[int, LineageRecord], solution_id: int) -> List[ChainLink]:
    """From ``solution_id`` back to its random root along first parents."""
    if solution_id not in lineage:
        raise GameError(f"unknown solution id {solution_id}")
    chain: List[ChainLink] = []
    current: Optional[int] = solution_id
    while current is not None:
        record = lineage.get(current)
        if record is None:
            raise GameError(f"lineage of {solution_id} is broken at {current}")
        other = record.parent_ids[1] if len(record.parent_ids) > 1 else None
        chain.append(ChainLink(record, other))
        current = record.parent_ids[0] if record.parent_ids else None
    return chain
