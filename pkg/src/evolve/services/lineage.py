from typing import Dict, Iterable, List, Optional, Sequence

from src.evolve.schema import LineageRecord, Operator
from src.utils.errors import GameError


class LineageRegistry:
    """Issues solution ids in increasing order and remembers where each came from."""

    def __init__(self, next_id: int = 0, records: Optional[Iterable[LineageRecord]] = None):
        self.next_id = next_id
        self.records: Dict[int, LineageRecord] = {r.solution_id: r for r in records or ()}
        self._fresh: List[int] = []

    def issue(self, parents: Sequence[int], generation: int, operator: Operator, payload: str) -> int:
        for parent in parents:
            if parent not in self.records:
                raise GameError(f"parent {parent} was never issued")
        solution_id = self.next_id
        self.next_id += 1
        self.records[solution_id] = LineageRecord(solution_id, tuple(parents), generation, operator, payload)
        self._fresh.append(solution_id)
        return solution_id

    def ancestors(self, solution_ids: Iterable[int]) -> set:
        seen: set = set()
        stack = list(solution_ids)
        while stack:
            sid = stack.pop()
            if sid in seen or sid not in self.records:
                continue
            seen.add(sid)
            stack.extend(self.records[sid].parent_ids)
        return seen

    def prune(self, referenced: Iterable[int]) -> None:
        """Forget every record that no referenced solution descends from."""
        keep = self.ancestors(referenced)
        self.records = {sid: r for sid, r in self.records.items() if sid in keep}

    def take_fresh(self) -> List[LineageRecord]:
        """Surviving records issued since the last call, by id."""
        fresh = [self.records[sid] for sid in self._fresh if sid in self.records]
        self._fresh = []
        return fresh
