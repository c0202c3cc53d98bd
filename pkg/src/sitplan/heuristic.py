"""Delete-relaxed planning graph and recursive best-supporter reachability."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Optional

from .model import PlanningTask, Situation, State
from .reasoner import find_all_possible_actions, satisfy

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Layer:
    new_effects: frozenset
    new_actions: tuple
    state: State
    # atom -> supporters in new_actions order
    achievers: dict = field(default_factory=dict, compare=False, repr=False)


@dataclass
class PlanningGraph:
    situation: Situation
    base: State
    layers: list = field(default_factory=list)
    depth_exceeded: bool = False

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def state(self) -> State:
        return self.layers[-1].state if self.layers else self.base


@dataclass(frozen=True)
class HeuristicResult:
    value: int
    layers_built: int
    penalized: bool = False


def relaxed_progress(st: State, acts, task: PlanningTask) -> State:
    """Add every add effect of ``acts`` to ``st``; deletes are ignored."""
    return st.union(atom for a in acts for atom in task.ground(a).add)


def build_planning_graph(task: PlanningTask, goal, d: int, sn: Situation, st: State) -> PlanningGraph:
    """Grow layers until ``goal`` holds in the relaxed state or depth passes ``d``.

    Reaching a fixpoint before the goal marks the graph as depth-exceeded
    straight away, since further iterations could not add anything.
    """
    if d < 1:
        raise ValueError("look-ahead bound d must be >= 1")
    pg = PlanningGraph(sn, st)
    depth = 0
    while not satisfy(st, goal) and depth <= d:
        relevant = []
        new_effects: set = set()
        achievers: dict = {}
        for a in find_all_possible_actions(task, st):
            fresh = [atom for atom in task.ground(a).add if atom not in st]
            if fresh:
                relevant.append(a)
                new_effects.update(fresh)
                for atom in fresh:
                    achievers.setdefault(atom, []).append(a)
        if not relevant:
            pg.depth_exceeded = True
            return pg
        st = st.union(new_effects)
        pg.layers.append(Layer(frozenset(new_effects), tuple(relevant), st,
                               {k: tuple(v) for k, v in achievers.items()}))
        depth += 1
    pg.depth_exceeded = depth > d
    return pg


class Reachability:
    """Best-supporter cost of goal sets over prefixes of one planning graph.

    A view of depth ``k`` is layers ``0..k-1``; depth 0 is the base state.
    With ``memo`` the scores are cached per (goal set, depth) for the life
    of this object, which is a single heuristic evaluation.
    """

    def __init__(self, task: PlanningTask, pg: PlanningGraph, memo: bool = False,
                 shadow_rate: float = 0.0, rng: Optional[random.Random] = None):
        self.task = task
        self.pg = pg
        self.memo = memo
        self.cache: dict = {}
        self.calls = 0
        self.shadow_rate = shadow_rate
        self.shadow_checks = 0
        self._rng = rng or random.Random(0)

    def __call__(self, goals, depth: Optional[int] = None) -> int:
        depth = self.pg.depth if depth is None else depth
        goals = frozenset(goals)
        if self.memo:
            key = (goals, depth)
            hit = self.cache.get(key)
            if hit is None:
                hit = self.cache[key] = self._score(goals, depth)
            if self.shadow_rate and self._rng.random() < self.shadow_rate:
                direct = Reachability(self.task, self.pg)._score(goals, depth)
                self.shadow_checks += 1
                if direct != hit:
                    raise AssertionError(f"memoized reachability {hit} != direct {direct}")
            return hit
        return self._score(goals, depth)

    def _score(self, goals: frozenset, depth: int) -> int:
        self.calls += 1
        if depth == 0 or not goals:
            return 0
        layer = self.pg.layers[depth - 1]
        current = goals & layer.new_effects
        if not current:
            return self(goals, depth - 1)
        new_goals: set = set()
        best_support: set = set()
        for g in current:
            best = None
            best_est = None
            for a in layer.achievers[g]:
                est = self(self.task.ground(a).pre, depth - 1)
                if best_est is None or est < best_est:
                    best, best_est = a, est
            new_goals.update(self.task.ground(best).pre)
            best_support.add(best)
        return len(best_support) + self((goals - current) | new_goals, depth - 1)


def reachability(task: PlanningTask, goals, pg: PlanningGraph, depth: Optional[int] = None,
                 memo: bool = False) -> int:
    return Reachability(task, pg, memo)(goals, depth)


def h(task: PlanningTask, goal, d: int, sn: Situation, L: int, st: State,
      memo: bool = False, shadow_rate: float = 0.0) -> HeuristicResult:
    """Heuristic value of situation ``sn`` (length ``L``) whose state is ``st``."""
    goal = frozenset(goal)
    pg = build_planning_graph(task, goal, d, sn, st)
    if pg.depth_exceeded:
        return HeuristicResult(L + d, pg.depth, True)
    value = Reachability(task, pg, memo, shadow_rate)(goal)
    return HeuristicResult(value, pg.depth, False)


class RPGHeuristic:
    """Callable handle used by the search: ``(task, d, sn, st) -> HeuristicResult``."""

    name = "rpg"

    def __init__(self, memo: bool = False, shadow_rate: float = 0.0):
        self.memo = memo
        self.shadow_rate = shadow_rate

    def __call__(self, task: PlanningTask, d: int, sn: Situation, st: State) -> HeuristicResult:
        return h(task, task.goal, d, sn, sn.length, st, self.memo, self.shadow_rate)


class ZeroHeuristic:
    name = "zero"

    def __call__(self, task, d, sn, st) -> HeuristicResult:
        return HeuristicResult(0, 0, False)


def make_heuristic(name: str, memo: bool = False, shadow_rate: float = 0.0):
    if name == "rpg":
        return RPGHeuristic(memo, shadow_rate)
    if name == "zero":
        return ZeroHeuristic()
    raise ValueError(f"unknown heuristic {name!r} (expected 'rpg' or 'zero')")
