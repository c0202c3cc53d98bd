"""Domain model: situations, ground actions, states, schemas and tasks.

Every identifier is interned to a dense integer before it reaches this
module; atoms are ``(predicate_id, (const_id, ...))`` tuples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Optional

Atom = tuple  # (predicate id, tuple of constant ids)

_EMPTY: frozenset = frozenset()


class GroundAction(NamedTuple):
    """An action schema instantiated with constants."""

    schema: int
    args: tuple


class Situation:
    """A finite sequence of ground actions rooted at S0.

    Nodes share structure: each one stores only its last action and a link
    to the parent situation, so ``do`` is O(1) in time and memory.
    """

    __slots__ = ("parent", "action", "length", "_hash")

    def __init__(self, parent: Optional["Situation"] = None, action: Optional[GroundAction] = None):
        if (parent is None) != (action is None):
            raise ValueError("parent and action must be given together")
        self.parent = parent
        self.action = action
        self.length = 0 if parent is None else parent.length + 1
        self._hash = 0x5A17 if parent is None else hash((parent._hash, action))

    @property
    def actions(self) -> tuple:
        """Actions in execution order (S0-first)."""
        out = []
        node = self
        while node.parent is not None:
            out.append(node.action)
            node = node.parent
        out.reverse()
        return tuple(out)

    def __len__(self) -> int:
        return self.length

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if not isinstance(other, Situation):
            return NotImplemented
        a, b = self, other
        if a.length != b.length or a._hash != b._hash:
            return False
        while a is not b:
            if a.action != b.action:
                return False
            a, b = a.parent, b.parent
        return True

    def ancestor(self, length: int) -> "Situation":
        """The prefix of this situation with the given length."""
        if not 0 <= length <= self.length:
            raise ValueError(f"no prefix of length {length} in a situation of length {self.length}")
        node = self
        while node.length > length:
            node = node.parent
        return node

    def __repr__(self) -> str:
        if self.parent is None:
            return "S0"
        return f"Situation({list(self.actions)!r})"


def s0() -> Situation:
    """The initial situation (empty action sequence)."""
    return Situation()


def do(a: GroundAction, s: Situation) -> Situation:
    return Situation(s, a)


def do_all(actions: Iterable[GroundAction], s: Optional[Situation] = None) -> Situation:
    """``do([a1, ..., an], s)``; defaults to starting at S0."""
    s = s0() if s is None else s
    for a in actions:
        s = Situation(s, a)
    return s


def is_prefix(s: Situation, s2: Situation) -> bool:
    """True iff ``s`` is a (non-strict) initial sub-sequence of ``s2``."""
    if s.length > s2.length:
        return False
    return s2.ancestor(s.length) == s


class State:
    """A closed-world set of ground atoms, indexed by predicate.

    Instances are immutable values. Derived states share the per-predicate
    frozensets of every predicate they do not touch.
    """

    __slots__ = ("_facts", "_size", "_hash")

    def __init__(self, atoms: Iterable[Atom] = ()):
        facts: dict = {}
        for pred, args in atoms:
            facts.setdefault(pred, set()).add(tuple(args))
        self._facts = {p: frozenset(ts) for p, ts in facts.items() if ts}
        self._size = sum(len(ts) for ts in self._facts.values())
        self._hash = None

    @classmethod
    def _from_facts(cls, facts: dict) -> "State":
        st = cls.__new__(cls)
        st._facts = facts
        st._size = sum(len(ts) for ts in facts.values())
        st._hash = None
        return st

    def tuples(self, pred: int) -> frozenset:
        """All argument tuples for which ``pred`` holds."""
        return self._facts.get(pred, _EMPTY)

    def holds(self, pred: int, args: tuple) -> bool:
        return args in self._facts.get(pred, _EMPTY)

    def __contains__(self, atom) -> bool:
        pred, args = atom
        return args in self._facts.get(pred, _EMPTY)

    def __iter__(self) -> Iterator[Atom]:
        for pred in sorted(self._facts):
            for args in sorted(self._facts[pred]):
                yield (pred, args)

    def __len__(self) -> int:
        return self._size

    @property
    def predicates(self) -> frozenset:
        return frozenset(self._facts)

    def apply(self, delete: Iterable[Atom], add: Iterable[Atom]) -> "State":
        """``(self - delete) | add`` as a new state; ``self`` is untouched."""
        changed: dict = {}
        for pred, args in delete:
            cur = changed.get(pred)
            if cur is None:
                cur = changed[pred] = set(self._facts.get(pred, _EMPTY))
            cur.discard(args)
        for pred, args in add:
            cur = changed.get(pred)
            if cur is None:
                cur = changed[pred] = set(self._facts.get(pred, _EMPTY))
            cur.add(args)
        if not changed:
            return self
        facts = dict(self._facts)
        for pred, ts in changed.items():
            if ts:
                facts[pred] = frozenset(ts)
            else:
                facts.pop(pred, None)
        return State._from_facts(facts)

    def union(self, atoms: Iterable[Atom]) -> "State":
        return self.apply((), atoms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, State):
            return NotImplemented
        return self._facts == other._facts

    def __hash__(self) -> int:
        # order-independent; each frozenset hash is already a set hash
        if self._hash is None:
            self._hash = hash(frozenset(self._facts.items()))
        return self._hash

    def __le__(self, other: "State") -> bool:
        return all(ts <= other.tuples(p) for p, ts in self._facts.items())

    def __lt__(self, other: "State") -> bool:
        return self <= other and self._size < other._size

    def __repr__(self) -> str:
        return f"State({list(self)!r})"


# Terms inside schemas: constants are non-negative symbol ids, the i-th
# parameter is encoded as ``-(i + 1)``.
def var(i: int) -> int:
    return -(i + 1)


def is_var(term: int) -> bool:
    return term < 0


def var_index(term: int) -> int:
    return -term - 1


@dataclass(frozen=True)
class ActionSchema:
    """A lifted STRIPS operator over interned symbols.

    ``precond_pos``, ``add`` and ``delete`` hold ``(pred, terms)`` pairs;
    ``precond_neq`` holds ``(term, term)`` pairs that must differ.
    """

    name: str
    params: tuple  # parameter names
    param_types: tuple  # type name per parameter
    precond_pos: tuple
    precond_neq: tuple
    add: tuple
    delete: tuple

    @property
    def arity(self) -> int:
        return len(self.params)

    def __post_init__(self):
        n = len(self.params)
        for pred, terms in self.precond_pos + self.add + self.delete:
            for t in terms:
                if is_var(t) and var_index(t) >= n:
                    raise ValueError(f"{self.name}: free variable in literal of predicate {pred}")
        for pair in self.precond_neq:
            for t in pair:
                if is_var(t) and var_index(t) >= n:
                    raise ValueError(f"{self.name}: free variable in inequality")
        if set(self.add) & set(self.delete):
            raise ValueError(f"{self.name}: add and delete sets overlap")


def _instantiate(literals: tuple, args: tuple) -> tuple:
    return tuple(
        (pred, tuple(args[-t - 1] if t < 0 else t for t in terms)) for pred, terms in literals
    )


@dataclass(frozen=True)
class GroundEffects:
    pre: tuple
    neq: tuple
    add: tuple
    delete: tuple


@dataclass(eq=False)
class PlanningTask:
    """A compiled planning problem: schemas, typed universe, init, goal, bound."""

    schemas: tuple
    predicates: tuple  # predicate names, index = symbol id
    predicate_arity: tuple
    constants: tuple  # constant names, index = symbol id
    types: dict  # type name -> tuple of constant ids (flattened hierarchy)
    init: State
    goal: frozenset  # ground atoms
    bound: int = 100
    name: str = ""
    domain_name: str = ""
    diagnostics: list = field(default_factory=list)
    _ground_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.bound < 0:
            raise ValueError("bound must be non-negative")
        self._schema_index = {s.name: i for i, s in enumerate(self.schemas)}
        self._const_index = {c: i for i, c in enumerate(self.constants)}
        self._pred_index = {p: i for i, p in enumerate(self.predicates)}
        self.param_domains = tuple(
            tuple(frozenset(self.types.get(t, ())) for t in s.param_types) for s in self.schemas
        )

    @property
    def universe(self) -> tuple:
        return tuple(range(len(self.constants)))

    def with_bound(self, bound: int) -> "PlanningTask":
        return PlanningTask(
            self.schemas, self.predicates, self.predicate_arity, self.constants, self.types,
            self.init, self.goal, bound, self.name, self.domain_name, list(self.diagnostics),
        )

    def ground(self, a: GroundAction) -> GroundEffects:
        """Instantiated precondition/effect atoms of ``a`` (cached)."""
        eff = self._ground_cache.get(a)
        if eff is None:
            s = self.schemas[a.schema]
            args = a.args
            neq = tuple(
                (args[-x - 1] if x < 0 else x, args[-y - 1] if y < 0 else y) for x, y in s.precond_neq
            )
            eff = GroundEffects(
                _instantiate(s.precond_pos, args), neq,
                _instantiate(s.add, args), _instantiate(s.delete, args),
            )
            self._ground_cache[a] = eff
        return eff

    # -- symbol lookup -------------------------------------------------

    def predicate_id(self, name: str) -> int:
        return self._pred_index[name.lower()]

    def constant_id(self, name: str) -> int:
        return self._const_index[name.lower()]

    def schema_id(self, name: str) -> int:
        return self._schema_index[name.lower()]

    def atom(self, pred: str, *args: str) -> Atom:
        return (self.predicate_id(pred), tuple(self.constant_id(a) for a in args))

    def action(self, name: str, *args: str) -> GroundAction:
        return GroundAction(self.schema_id(name), tuple(self.constant_id(a) for a in args))

    def state(self, atoms: Iterable[tuple]) -> State:
        """Build a state from ``("pred", "arg", ...)`` name tuples."""
        return State(self.atom(*t) for t in atoms)

    def format_atom(self, atom: Atom) -> str:
        pred, args = atom
        return "(" + " ".join([self.predicates[pred], *(self.constants[c] for c in args)]) + ")"

    def format_action(self, a: GroundAction) -> str:
        return "(" + " ".join([self.schemas[a.schema].name, *(self.constants[c] for c in a.args)]) + ")"
