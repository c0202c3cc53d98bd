"""Estimator-style wrapper so the planner composes with sklearn tooling.

``fit`` solves one task and stores the result; ``predict`` solves a batch
of tasks and returns their plans; ``score`` reports the mean ratio of
plan length to situations visited.
"""

from __future__ import annotations

from pathlib import Path

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .heuristic import make_heuristic
from .model import PlanningTask
from .pddl import load_task
from .search import DEFAULT_TIMEOUT, Limits, Plan, plan
from .validate import validate

HEURISTICS = ("rpg", "zero")


def check_task(task, bound=None) -> PlanningTask:
    """Coerce ``task`` into a :class:`PlanningTask`.

    Accepts a compiled task or a ``(domain, problem)`` pair of paths or
    PDDL text. ``bound`` overrides the task's own bound when given.
    """
    if isinstance(task, PlanningTask):
        out = task
    elif isinstance(task, (tuple, list)) and len(task) == 2:
        dom, prob = task
        out = load_task(dom, prob)
    else:
        raise TypeError(
            f"expected a PlanningTask or a (domain, problem) pair, got {type(task).__name__}"
        )
    if bound is not None and bound != out.bound:
        out = out.with_bound(bound)
    return out


def _check_tasks(X) -> list:
    if isinstance(X, PlanningTask) or (
        isinstance(X, tuple) and len(X) == 2 and isinstance(X[0], (str, Path))
    ):
        return [X]
    return list(X)


class SituationPlanner(BaseEstimator):
    """A* over situations with a relaxed planning-graph heuristic.

    Parameters
    ----------
    bound : int, default=100
        Upper bound on plan length.
    heuristic : {"rpg", "zero"}, default="rpg"
    memo : bool, default=False
        Cache reachability scores within each heuristic evaluation.
    dedup : bool, default=False
        Skip situations whose state was already expanded.
    cache_states : bool, default=False
        Keep states in the frontier instead of re-progressing from the
        initial state on every pop.
    timeout : float or None, default=1800
        Wall-clock limit in seconds per search.
    max_frontier : int or None, default=None

    Attributes
    ----------
    task_ : PlanningTask
    outcome_ : Plan, NoPlanWithinBound or ResourceLimit
    plan_ : tuple of GroundAction or None
    stats_ : SearchStats
    """

    def __init__(self, bound=100, heuristic="rpg", memo=False, dedup=False,
                 cache_states=False, timeout=DEFAULT_TIMEOUT, max_frontier=None):
        self.bound = bound
        self.heuristic = heuristic
        self.memo = memo
        self.dedup = dedup
        self.cache_states = cache_states
        self.timeout = timeout
        self.max_frontier = max_frontier

    def _check_params(self) -> None:
        if not isinstance(self.bound, int) or self.bound < 0:
            raise ValueError(f"bound must be a non-negative int, got {self.bound!r}")
        if self.heuristic not in HEURISTICS:
            raise ValueError(f"heuristic must be one of {HEURISTICS}, got {self.heuristic!r}")
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive or None")

    def _solve(self, task: PlanningTask):
        return plan(
            task,
            make_heuristic(self.heuristic, self.memo),
            Limits(timeout=self.timeout, max_frontier=self.max_frontier),
            dedup=self.dedup,
            cache_states=self.cache_states,
        )

    def fit(self, X, y=None):
        """Solve one task; ``y`` is ignored."""
        self._check_params()
        self.task_ = check_task(X, self.bound)
        self.outcome_ = self._solve(self.task_)
        self.stats_ = self.outcome_.stats
        self.plan_ = self.outcome_.actions if isinstance(self.outcome_, Plan) else None
        return self

    def predict(self, X=None) -> list:
        """Plans (action tuples, or ``None`` when unsolved) for each task in ``X``.

        With ``X=None`` the plan found by ``fit`` is returned in a one-item list.
        """
        if X is None:
            check_is_fitted(self, "outcome_")
            return [self.plan_]
        self._check_params()
        out = []
        for t in _check_tasks(X):
            outcome = self._solve(check_task(t, self.bound))
            out.append(outcome.actions if isinstance(outcome, Plan) else None)
        return out

    def score(self, X=None, y=None) -> float:
        """Mean plan-length / situations-visited ratio over solved tasks."""
        if X is None:
            check_is_fitted(self, "outcome_")
            outcomes = [(self.task_, self.outcome_)]
        else:
            self._check_params()
            outcomes = []
            for t in _check_tasks(X):
                task = check_task(t, self.bound)
                outcomes.append((task, self._solve(task)))
        ratios = []
        for task, o in outcomes:
            if isinstance(o, Plan):
                if not validate(task, o.actions):
                    raise RuntimeError(f"{task.name}: search returned an invalid plan")
                ratios.append(len(o) / o.stats.situations_visited)
        return sum(ratios) / len(ratios) if ratios else 0.0

    def format_plan(self) -> list:
        check_is_fitted(self, "outcome_")
        return [self.task_.format_action(a) for a in self.plan_ or ()]
