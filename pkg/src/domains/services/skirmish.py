"""Grid battle between two sides whose units share one behavior tree per side.

The map is mirror-symmetric and every per-step decision is simultaneous, so
two identical trees always draw.
"""

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.behavior.schema import Frame
from src.domains.schema import DuelOutcome, Side, SkirmishParams
from src.domains.services.behavior_tree import (
    STAND,
    Action,
    Leaf,
    Node,
    bt_tick,
    format_tree,
    is_valid_tree,
    node_count,
    parse_tree,
    random_tree,
)
from src.domains.services.bt_variation import bt_variation
from src.static_values import BLUE_INTENSITY, RANGED_SHADE, RED_INTENSITY
from src.utils.checksum import fnv1a64

MELEE = "melee"
RANGED = "ranged"


@dataclass
class Unit:
    side: Side
    index: int
    kind: str
    x: int
    y: int
    health: int
    max_health: int

    @property
    def alive(self) -> bool:
        return self.health > 0


def chebyshev(a: Tuple[int, int], b: Tuple[int, int]) -> int:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


class SkirmishState:
    def __init__(self, params: SkirmishParams):
        self.params = params
        rng = np.random.default_rng(params.seed)
        n = params.units_per_side
        top = params.height // 2 - 4
        left = params.width // 2 - 5
        slots = [(left + col, top + row) for col in range(2) for row in range(4)]
        order = rng.permutation(len(slots))[:n]
        self.sides: Dict[Side, List[Unit]] = {Side.RED: [], Side.BLUE: []}
        for i, slot in enumerate(order):
            x, y = slots[int(slot)]
            kind = MELEE if i < n // 2 else RANGED
            health = params.melee_health if kind == MELEE else params.ranged_health
            self.sides[Side.RED].append(Unit(Side.RED, i, kind, x, y, health, health))
            self.sides[Side.BLUE].append(Unit(Side.BLUE, i, kind, params.width - 1 - x, y, health, health))
        # red 0, blue 0, red 1, ...
        self.units = [u for pair in zip(self.sides[Side.RED], self.sides[Side.BLUE]) for u in pair]
        self.markers: Dict[Side, Optional[Tuple[int, int]]] = {Side.RED: None, Side.BLUE: None}
        # shared by both sides, indexed (step, side-local unit index)
        self.random_table = rng.random((params.max_steps, n))
        self.step = 0

    def reach(self, unit: Unit) -> int:
        return self.params.melee_range if unit.kind == MELEE else self.params.ranged_range

    def damage(self, unit: Unit) -> int:
        return self.params.melee_damage if unit.kind == MELEE else self.params.ranged_damage

    def total_health(self, side: Side) -> int:
        return sum(u.health for u in self.sides[side])

    def initial_health(self, side: Side) -> int:
        return sum(u.max_health for u in self.sides[side])

    def others(self, unit: Unit, faction: str, unit_filter: str, radius: int) -> List[Unit]:
        side = unit.side if faction == "ally" else unit.side.opposite
        return [
            o
            for o in self.sides[side]
            if o.alive
            and o is not unit
            and (unit_filter == "any" or o.kind == unit_filter)
            and chebyshev((unit.x, unit.y), (o.x, o.y)) <= radius
        ]

    def choose(self, unit: Unit, candidates: List[Unit], target: str) -> Unit:
        here = (unit.x, unit.y)
        if target == "closest":
            return min(candidates, key=lambda o: (chebyshev(here, (o.x, o.y)), o.index))
        if target == "farthest":
            return min(candidates, key=lambda o: (-chebyshev(here, (o.x, o.y)), o.index))
        if target == "weakest":
            return min(candidates, key=lambda o: (o.health, o.index))
        u = self.random_table[min(self.step, self.random_table.shape[0] - 1), unit.index]
        return candidates[int(u * len(candidates))]

    def step_toward(self, unit: Unit, goal: Tuple[int, int], away: bool = False) -> Tuple[int, int]:
        dx, dy = _sign(goal[0] - unit.x), _sign(goal[1] - unit.y)
        if away:
            dx, dy = -dx, -dy
        if not 0 <= unit.x + dx < self.params.width:
            dx = 0
        if not 0 <= unit.y + dy < self.params.height:
            dy = 0
        return dx, dy

    def render(self) -> Frame:
        pixels = np.zeros((self.params.height, self.params.width))
        for u in self.units:
            if u.alive:
                base = RED_INTENSITY if u.side is Side.RED else BLUE_INTENSITY
                pixels[u.y, u.x] = base + (RANGED_SHADE if u.kind == RANGED else 0.0)
        return Frame(pixels)

    def positions(self, side: Side) -> np.ndarray:
        return np.array([[u.x, u.y] for u in self.sides[side]], dtype=np.float64)


class UnitView:
    """Observation of one unit; answers the tree's atomics."""

    def __init__(self, state: SkirmishState, unit: Unit):
        self.state = state
        self.unit = unit

    def check(self, leaf: Leaf) -> bool:
        state, unit, p = self.state, self.unit, leaf.params
        if leaf.name == "in_sight":
            return bool(state.others(unit, p[0], p[1], state.params.sight))
        if leaf.name == "in_reach":
            return bool(state.others(unit, p[0], p[1], state.reach(unit)))
        if leaf.name == "is_dying":
            fraction = int(p[1]) / 100.0
            if p[0] == "self":
                return unit.health < fraction * unit.max_health
            return any(o.health < fraction * o.max_health for o in state.others(unit, p[0], "any", state.params.sight))
        if leaf.name == "is_type":
            return unit.kind == p[0]
        return state.markers[unit.side] is not None

    def resolve(self, leaf: Leaf) -> Optional[Action]:
        state, unit, p = self.state, self.unit, leaf.params
        if leaf.name == "stand":
            return STAND
        if leaf.name == "attack":
            candidates = state.others(unit, "enemy", p[1], state.reach(unit))
            if not candidates:
                return None
            return Action("attack", unit=state.choose(unit, candidates, p[0]).index)
        if leaf.name == "move":
            candidates = state.others(unit, p[1], p[3], state.params.sight)
            if not candidates:
                return None
            other = state.choose(unit, candidates, p[2])
            step = state.step_toward(unit, (other.x, other.y), away=p[0] == "away")
            return Action("move", unit=other.index, step=step) if step != (0, 0) else None
        if leaf.name == "goto":
            marker = state.markers[unit.side]
            if marker is None:
                return None
            # stop once within the threshold share of sight range
            if chebyshev((unit.x, unit.y), marker) <= int(p[0]) / 100.0 * state.params.sight:
                return None
            step = state.step_toward(unit, marker)
            return Action("goto", step=step) if step != (0, 0) else None
        candidates = state.others(unit, p[0], p[2], state.params.sight)
        if not candidates:
            return None
        other = state.choose(unit, candidates, p[1])
        return Action("set_target", unit=other.index, position=(other.x, other.y))


def _advance(state: SkirmishState, trees: Dict[Side, Node]) -> Dict[Side, List[str]]:
    chosen = [(u, bt_tick(trees[u.side], UnitView(state, u))) for u in state.units if u.alive]

    for side in (Side.RED, Side.BLUE):
        # last writer in side-local order wins
        for u, action in sorted(((u, a) for u, a in chosen if u.side is side), key=lambda ua: ua[0].index):
            if action.category == "set_target":
                state.markers[side] = action.position

    hits: Dict[int, int] = defaultdict(int)
    for u, action in chosen:
        if action.category == "attack":
            target = state.sides[u.side.opposite][action.unit]
            hits[id(target)] += state.damage(u)
    for u in state.units:
        if id(u) in hits:
            u.health = max(0, u.health - hits[id(u)])

    movers = [(u, a) for u, a in chosen if u.alive and a.step != (0, 0)]
    occupied = {(u.x, u.y) for u in state.units if u.alive}
    wanted = Counter((u.x + a.step[0], u.y + a.step[1]) for u, a in movers)
    for u, action in movers:
        dest = (u.x + action.step[0], u.y + action.step[1])
        # contested or occupied cells block every mover
        if dest not in occupied and wanted[dest] == 1:
            u.x, u.y = dest

    trace: Dict[Side, List[str]] = {Side.RED: [], Side.BLUE: []}
    for u, action in sorted(chosen, key=lambda ua: ua[0].index):
        trace[u.side].append(action.category)
    return trace


def skirmish_evaluate(red: Node, blue: Node, params: SkirmishParams) -> DuelOutcome:
    """Deterministic duel of two trees; fitness is the opposing health depleted."""
    state = SkirmishState(params)
    trees = {Side.RED: red, Side.BLUE: blue}
    frames = [state.render()]
    tracks = {side: [state.positions(side)] for side in trees}
    actions: Dict[Side, List[List[str]]] = {Side.RED: [], Side.BLUE: []}
    completion = params.max_steps
    for step in range(params.max_steps):
        state.step = step
        trace = _advance(state, trees)
        for side in trees:
            actions[side].append(trace[side])
            tracks[side].append(state.positions(side))
        frames.append(state.render())
        if state.total_health(Side.RED) == 0 or state.total_health(Side.BLUE) == 0:
            completion = step + 1
            break
    # pad to a fixed length with the final state
    while len(frames) < params.max_steps + 1:
        frames.append(frames[-1])
        for side in trees:
            tracks[side].append(tracks[side][-1])

    fitness = {
        side: 1.0 - state.total_health(side.opposite) / state.initial_health(side.opposite) for side in trees
    }
    winner = None
    if fitness[Side.RED] != fitness[Side.BLUE]:
        winner = Side.RED if fitness[Side.RED] > fitness[Side.BLUE] else Side.BLUE
    return DuelOutcome(
        fitness_red=fitness[Side.RED],
        fitness_blue=fitness[Side.BLUE],
        frames=frames,
        completion_time=completion,
        max_steps=params.max_steps,
        winner=winner,
        positions={side: np.stack(tracks[side]) for side in trees},
        arena_size=(params.width, params.height),
        key=fnv1a64(f"{format_tree(red)}|{format_tree(blue)}".encode()),
        actions=actions,
        remaining_health={
            side: float(np.mean([u.health / u.max_health for u in state.sides[side]])) for side in trees
        },
    )


class SkirmishDomain:
    name = "skirmish"
    genome_range = None

    def __init__(self, params: Optional[SkirmishParams] = None):
        self.params = params or SkirmishParams()
        self.position_shape = (self.params.units_per_side, 2)

    def random_solution(self, side: Side, rng: np.random.Generator) -> Node:
        return random_tree(rng)

    def variation(self, first: Node, second: Node, rng: np.random.Generator) -> Tuple[Node, str]:
        return bt_variation(first, second, rng, self.params.max_leaves)

    def evaluate(self, red: Node, blue: Node) -> DuelOutcome:
        return skirmish_evaluate(red, blue, self.params)

    def solution_size(self, solution: Node) -> int:
        return node_count(solution)

    def encode(self, solution: Node) -> str:
        return format_tree(solution)

    def decode(self, payload: str) -> Node:
        return parse_tree(payload, self.params.max_leaves)

    def is_valid(self, solution: Node) -> bool:
        return is_valid_tree(solution, self.params.max_leaves)
