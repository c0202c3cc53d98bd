"""A* over the situation tree with an upper bound on plan length.

The frontier holds situations, not states: each popped situation's state
is recomputed from the initial state. There is no closed list, since a
situation tree has no cycles and no merging paths.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .heuristic import HeuristicResult, ZeroHeuristic
from .model import PlanningTask, Situation, State, do, s0
from .reasoner import find_all_possible_actions, progress, progress_along, satisfy

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 1800.0


@dataclass
class SearchStats:
    situations_visited: int = 0
    expansions: int = 0
    generated: int = 0
    max_frontier: int = 0
    wall_time: float = 0.0
    heuristic_time: float = 0.0
    penalized: int = 0
    penalty_flags: int = 0
    duplicates_skipped: int = 0


@dataclass(frozen=True)
class Limits:
    timeout: Optional[float] = DEFAULT_TIMEOUT  # seconds
    max_frontier: Optional[int] = None
    max_visited: Optional[int] = None


@dataclass(frozen=True, order=True)
class FrontierEntry:
    f: int
    tie: int
    situation: Situation = field(compare=False)
    state: Optional[State] = field(default=None, compare=False)


@dataclass
class Plan:
    situation: Situation
    stats: SearchStats

    @property
    def actions(self) -> tuple:
        return extract_plan(self.situation)

    def __len__(self) -> int:
        return self.situation.length


@dataclass
class NoPlanWithinBound:
    stats: SearchStats


@dataclass
class ResourceLimit:
    stats: SearchStats
    reason: str = "timeout"


SearchOutcome = Union[Plan, NoPlanWithinBound, ResourceLimit]


def extract_plan(s: Situation) -> tuple:
    """Actions of ``s`` in execution order."""
    return s.actions


def plan(
    task: PlanningTask,
    heuristic: Optional[Callable] = None,
    limits: Limits = Limits(),
    *,
    cache_states: bool = False,
    dedup: bool = False,
    debug: bool = False,
    progress_hook: Optional[Callable[[SearchStats], None]] = None,
    hook_every: int = 1000,
) -> SearchOutcome:
    """Search for a situation of length <= ``task.bound`` satisfying the goal.

    ``heuristic`` is called as ``heuristic(task, d, sn, st)`` and returns a
    :class:`HeuristicResult` (or an int). ``cache_states`` keeps each node's
    state in the frontier instead of re-progressing from the initial state;
    ``dedup`` skips popped situations whose state was already expanded.
    Neither is on in the faithful configuration.
    """
    heuristic = heuristic or ZeroHeuristic()
    stats = SearchStats()
    t0 = time.perf_counter()
    deadline = None if limits.timeout is None else t0 + limits.timeout
    n = task.bound
    init = task.init
    goal = task.goal
    counter = itertools.count()

    frontier: list = []
    root = s0()
    heapq.heappush(frontier, FrontierEntry(n + 1, next(counter), root, init if cache_states else None))
    stats.max_frontier = 1
    popped: set = set()
    expanded_states: set = set()

    def finish(outcome):
        stats.wall_time = time.perf_counter() - t0
        return outcome

    while frontier:
        if deadline is not None and time.perf_counter() > deadline:
            return finish(ResourceLimit(stats, "timeout"))
        if limits.max_visited is not None and stats.situations_visited >= limits.max_visited:
            return finish(ResourceLimit(stats, "max-visited"))
        entry = heapq.heappop(frontier)
        s = entry.situation
        if debug:
            if s in popped:
                raise AssertionError(f"situation popped twice: {s!r}")
            popped.add(s)
        now = entry.state if entry.state is not None else progress_along(init, s, task, check=debug)
        if dedup:
            if now in expanded_states:
                stats.duplicates_skipped += 1
                continue
            expanded_states.add(now)
        stats.situations_visited += 1
        if satisfy(now, goal):
            return finish(Plan(s, stats))
        acts = find_all_possible_actions(task, now)
        if not acts:
            continue
        if s.length >= n:
            # every successor would exceed the bound
            continue
        stats.expansions += 1
        d = n - s.length
        children = []
        for a in acts:
            sn = do(a, s)
            st = progress(now, a, task, check=debug)
            th = time.perf_counter()
            res = heuristic(task, d, sn, st)
            stats.heuristic_time += time.perf_counter() - th
            if isinstance(res, HeuristicResult):
                value = res.value
                if res.penalized:
                    stats.penalized += 1
            else:
                value, res = int(res), None
            f = sn.length + value
            children.append((f, res))
            heapq.heappush(frontier, FrontierEntry(f, next(counter), sn, st if cache_states else None))
            stats.generated += 1
        if debug:
            stats.penalty_flags += _penalty_dominance_flags(children, d)
        stats.max_frontier = max(stats.max_frontier, len(frontier))
        if limits.max_frontier is not None and len(frontier) > limits.max_frontier:
            return finish(ResourceLimit(stats, "max-frontier"))
        if progress_hook is not None and stats.expansions % hook_every == 0:
            stats.wall_time = time.perf_counter() - t0
            progress_hook(stats)
    return finish(NoPlanWithinBound(stats))


def _penalty_dominance_flags(children: list, d: int) -> int:
    """Count penalized siblings that do not outrank a cheap unpenalized one."""
    ok_f = [f for f, r in children if r is not None and not r.penalized and r.value <= d]
    if not ok_f:
        return 0
    worst = max(ok_f)
    flags = sum(1 for f, r in children if r is not None and r.penalized and f <= worst)
    if flags:
        log.debug("penalty dominance violated by %d successor(s)", flags)
    return flags
