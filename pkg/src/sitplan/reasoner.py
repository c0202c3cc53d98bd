"""Closed-world evaluation: goal checks, run-time grounding, progression."""

from __future__ import annotations

from typing import Iterable

from .model import ActionSchema, GroundAction, PlanningTask, Situation, State


class PreconditionError(RuntimeError):
    """An action was progressed in a state where it is not possible."""


def satisfy(st: State, goal: Iterable) -> bool:
    """True iff every (positive, ground) goal atom holds in ``st``."""
    return all(atom in st for atom in goal)


def is_possible(task: PlanningTask, st: State, a: GroundAction) -> bool:
    s = task.schemas[a.schema]
    if len(a.args) != s.arity:
        return False
    for c, dom in zip(a.args, task.param_domains[a.schema]):
        if c not in dom:
            return False
    eff = task.ground(a)
    return all(x != y for x, y in eff.neq) and all(atom in st for atom in eff.pre)


def _ground_schema(schema: ActionSchema, domains: tuple, st: State, out: list, idx: int) -> None:
    """Backtracking match of one schema's preconditions against ``st``."""
    n = schema.arity
    # most selective atom first; ties keep declaration order
    order = sorted(schema.precond_pos, key=lambda lit: len(st.tuples(lit[0])))
    if any(not st.tuples(pred) for pred, _ in order):
        return
    # an inequality is checked at the first point where both sides are bound
    bound_at: list = []
    seen: set = set()
    for _, terms in order:
        seen.update(-t - 1 for t in terms if t < 0)
        bound_at.append(set(seen))
    free = [i for i in range(n) if i not in seen]
    checks: list = [[] for _ in range(len(order) + 1)]
    for x, y in schema.precond_neq:
        need = {-t - 1 for t in (x, y) if t < 0}
        for level, b in enumerate(bound_at):
            if need <= b:
                checks[level].append((x, y))
                break
        else:
            checks[len(order)].append((x, y))

    binding: list = [None] * n

    def val(t):
        return binding[-t - 1] if t < 0 else t

    def consistent(level: int) -> bool:
        for x, y in checks[level]:
            if val(x) == val(y):
                return False
        return True

    def finish() -> None:
        if not free:
            if consistent(len(order)):
                out.append(GroundAction(idx, tuple(binding)))
            return

        def enum(k: int) -> None:
            if k == len(free):
                if consistent(len(order)):
                    out.append(GroundAction(idx, tuple(binding)))
                return
            i = free[k]
            for c in sorted(domains[i]):
                binding[i] = c
                enum(k + 1)
            binding[i] = None

        enum(0)

    def rec(level: int) -> None:
        if level == len(order):
            finish()
            return
        pred, terms = order[level]
        tuples = st.tuples(pred)
        pattern = [val(t) if (t >= 0 or binding[-t - 1] is not None) else None for t in terms]
        if None not in pattern:
            if tuple(pattern) in tuples and consistent(level):
                rec(level + 1)
            return
        for tup in tuples:
            newly = []
            ok = True
            for t, want, c in zip(terms, pattern, tup):
                if want is not None:
                    if want != c:
                        ok = False
                        break
                    continue
                i = -t - 1
                cur = binding[i]
                if cur is None:
                    if c not in domains[i]:
                        ok = False
                        break
                    binding[i] = c
                    newly.append(i)
                elif cur != c:  # repeated variable within one atom
                    ok = False
                    break
            if ok and consistent(level):
                rec(level + 1)
            for i in newly:
                binding[i] = None

    rec(0)


def find_all_possible_actions(task: PlanningTask, st: State) -> list:
    """Every ground action possible in ``st``, sorted by (schema, args)."""
    out: list = []
    for idx, schema in enumerate(task.schemas):
        found: list = []
        _ground_schema(schema, task.param_domains[idx], st, found, idx)
        found.sort()
        out.extend(found)
    return out


def progress(st: State, a: GroundAction, task: PlanningTask, check: bool = False) -> State:
    """The state after doing ``a`` in ``st``; ``st`` itself is unchanged."""
    if check and not is_possible(task, st, a):
        raise PreconditionError(f"{task.format_action(a)} is not possible")
    eff = task.ground(a)
    return st.apply(eff.delete, eff.add)


def progress_along(init: State, s: Situation, task: PlanningTask, check: bool = False) -> State:
    """Fold :func:`progress` over the actions of ``s`` starting from ``init``."""
    st = init
    for a in s.actions:
        st = progress(st, a, task, check)
    return st


def executable(init: State, s, task: PlanningTask) -> bool:
    """Each action is possible in the state reached by its predecessors."""
    actions = s.actions if isinstance(s, Situation) else s
    st = init
    for a in actions:
        if not is_possible(task, st, a):
            return False
        st = progress(st, a, task)
    return True
