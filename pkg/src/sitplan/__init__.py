"""Lifted forward-search planning over situations."""

from .heuristic import HeuristicResult, PlanningGraph, build_planning_graph, h, make_heuristic, reachability
from .model import GroundAction, PlanningTask, Situation, State, do, is_prefix, s0
from .pddl import compile_task, load_task, parse_domain, parse_problem
from .reasoner import executable, find_all_possible_actions, progress, progress_along, satisfy
from .search import Limits, NoPlanWithinBound, Plan, ResourceLimit, extract_plan, plan
from .validate import Verdict, validate

__version__ = "0.1.0"

__all__ = [
    "GroundAction", "HeuristicResult", "Limits", "NoPlanWithinBound", "Plan", "PlanningGraph",
    "PlanningTask", "ResourceLimit", "Situation", "State", "Verdict", "build_planning_graph",
    "compile_task", "do", "executable", "extract_plan", "find_all_possible_actions", "h",
    "is_prefix", "load_task", "make_heuristic", "parse_domain", "parse_problem", "plan",
    "progress", "progress_along", "reachability", "s0", "satisfy", "validate",
]
