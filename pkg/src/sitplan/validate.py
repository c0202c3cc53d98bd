"""Independent plan checking and the plain-text plan format."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .model import GroundAction, PlanningTask
from .reasoner import is_possible, progress, satisfy


@dataclass(frozen=True)
class Verdict:
    valid: bool
    failed_step: Optional[int] = None  # 1-based
    reason: str = "valid"

    def __bool__(self) -> bool:
        return self.valid

    def __str__(self) -> str:
        return self.reason


def validate(task: PlanningTask, actions: Iterable[GroundAction]) -> Verdict:
    """Re-execute ``actions`` from the initial state, then check the goal."""
    st = task.init
    for i, a in enumerate(actions, 1):
        if not is_possible(task, st, a):
            return Verdict(False, i, f"step-{i}-precondition-failed")
        st = progress(st, a, task)
    if not satisfy(st, task.goal):
        return Verdict(False, None, "goal-unsatisfied")
    return Verdict(True)


class PlanFormatError(ValueError):
    pass


def format_plan(task: PlanningTask, actions: Iterable[GroundAction]) -> str:
    return "".join(task.format_action(a) + "\n" for a in actions)


def parse_plan(task: PlanningTask, text: str) -> list:
    """Read one ``(name arg ...)`` action per line; ``;`` starts a comment."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if not (line.startswith("(") and line.endswith(")")):
            raise PlanFormatError(f"line {lineno}: expected '(action args...)', got {raw!r}")
        name, *args = line[1:-1].lower().split()
        try:
            a = task.action(name, *args)
        except KeyError as exc:
            raise PlanFormatError(f"line {lineno}: unknown symbol {exc.args[0]!r}") from None
        if len(a.args) != task.schemas[a.schema].arity:
            raise PlanFormatError(f"line {lineno}: wrong number of arguments for {name}")
        out.append(a)
    return out


def write_plan(path, task: PlanningTask, actions) -> None:
    Path(path).write_text(format_plan(task, actions))


def read_plan(path, task: PlanningTask) -> list:
    return parse_plan(task, Path(path).read_text())
