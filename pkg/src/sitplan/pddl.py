"""PDDL reader for the STRIPS + typing + negated-equality fragment.

Domain and problem text are read into small frozen ASTs, which
:func:`compile_task` turns into an interned :class:`~sitplan.model.PlanningTask`.
Anything outside the fragment is rejected with :class:`UnsupportedFeatureError`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from .model import ActionSchema, PlanningTask, State, var

log = logging.getLogger(__name__)

ROOT_TYPE = "object"
SUPPORTED_REQUIREMENTS = frozenset({":strips", ":typing", ":equality"})

# heads that are legal PDDL but outside the fragment
_UNSUPPORTED_HEADS = {
    "or": ":disjunctive-preconditions",
    "imply": ":disjunctive-preconditions",
    "exists": ":existential-preconditions",
    "forall": ":universal-preconditions",
    "when": ":conditional-effects",
    "increase": ":numeric-fluents",
    "decrease": ":numeric-fluents",
    "assign": ":numeric-fluents",
    "scale-up": ":numeric-fluents",
    "scale-down": ":numeric-fluents",
    "either": "either-types",
}
_UNSUPPORTED_SECTIONS = {
    ":functions": ":numeric-fluents",
    ":derived": ":derived-predicates",
    ":durative-action": ":durative-actions",
    ":axiom": ":derived-predicates",
    ":metric": "plan-metric",
    ":constraints": ":constraints",
}


class PDDLError(Exception):
    """Base class for PDDL reading errors; carries a source position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + message)


class PDDLSyntaxError(PDDLError):
    pass


class UnsupportedFeatureError(PDDLError):
    def __init__(self, construct: str, line: int = 0, col: int = 0):
        self.construct = construct
        super().__init__(f"unsupported PDDL construct: {construct}", line, col)


class PDDLSemanticError(PDDLError):
    """Unknown symbols, arity mismatches, malformed goals."""


# -- s-expressions ----------------------------------------------------------


class Sym(str):
    """A lower-cased token remembering where it came from."""

    line: int
    col: int

    def __new__(cls, text: str, line: int, col: int):
        obj = super().__new__(cls, text.lower())
        obj.line, obj.col = line, col
        return obj


class SList(list):
    line: int
    col: int

    def __init__(self, line: int, col: int):
        super().__init__()
        self.line, self.col = line, col


def _pos(node) -> tuple:
    return getattr(node, "line", 0), getattr(node, "col", 0)


def read_sexpr(text: str) -> SList:
    """Read exactly one top-level s-expression."""
    stack: list = []
    top = None
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            if top is not None and not stack:
                raise PDDLSyntaxError("trailing content after top-level expression", line, col)
            node = SList(line, col)
            if stack:
                stack[-1].append(node)
            stack.append(node)
            i += 1
            col += 1
            continue
        if ch == ")":
            if not stack:
                raise PDDLSyntaxError("unbalanced ')'", line, col)
            top = stack.pop()
            i += 1
            col += 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in "();":
            j += 1
        if not stack:
            raise PDDLSyntaxError(f"token {text[i:j]!r} outside any expression", line, col)
        stack[-1].append(Sym(text[i:j], line, col))
        col += j - i
        i = j
    if stack:
        raise PDDLSyntaxError("unexpected end of input: missing ')'", *_pos(stack[-1]))
    if top is None:
        raise PDDLSyntaxError("empty input", line, col)
    return top


# -- ASTs -----------------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    predicate: str
    args: tuple
    positive: bool = True

    def __str__(self) -> str:
        body = "(" + " ".join((self.predicate, *self.args)) + ")"
        return body if self.positive else f"(not {body})"


@dataclass(frozen=True)
class PredicateDef:
    name: str
    params: tuple  # ((var, type), ...)


@dataclass(frozen=True)
class ActionDef:
    name: str
    params: tuple  # ((var, type), ...)
    precondition: tuple  # positive atoms and negated "=" literals
    add: tuple
    delete: tuple


@dataclass(frozen=True)
class DomainAst:
    name: str
    requirements: tuple
    types: tuple  # ((type, parent), ...)
    constants: tuple  # ((name, type), ...)
    predicates: tuple
    actions: tuple

    def parent_map(self) -> dict:
        return {ROOT_TYPE: None, **dict(self.types)}

    def predicate(self, name: str) -> PredicateDef:
        for p in self.predicates:
            if p.name == name:
                return p
        raise KeyError(name)


@dataclass(frozen=True)
class ProblemAst:
    name: str
    domain_name: str
    objects: tuple  # ((name, type), ...)
    init: tuple  # ground positive Literals
    goal: tuple  # ground positive Literals


# -- parsing helpers ------------------------------------------------------


def _expect_list(node, what: str) -> SList:
    if not isinstance(node, SList):
        raise PDDLSyntaxError(f"expected {what}, found {node!r}", *_pos(node))
    return node


def _expect_sym(node, what: str) -> Sym:
    if not isinstance(node, Sym):
        raise PDDLSyntaxError(f"expected {what}, found a list", *_pos(node))
    return node


def _typed_list(items, allow_vars: bool, what: str) -> list:
    """Parse ``a b - t c`` into ``[(a, t), (b, t), (c, object)]``."""
    out: list = []
    pending: list = []
    i = 0
    while i < len(items):
        tok = items[i]
        if isinstance(tok, SList):
            if tok and isinstance(tok[0], Sym) and tok[0] == "either":
                raise UnsupportedFeatureError("either-types", *_pos(tok))
            raise PDDLSyntaxError(f"unexpected list in {what}", *_pos(tok))
        if tok == "-":
            if not pending or i + 1 >= len(items):
                raise PDDLSyntaxError(f"dangling '-' in {what}", *_pos(tok))
            typ = items[i + 1]
            if isinstance(typ, SList):
                if typ and typ[0] == "either":
                    raise UnsupportedFeatureError("either-types", *_pos(typ))
                raise PDDLSyntaxError(f"bad type in {what}", *_pos(typ))
            out.extend((p, str(typ)) for p in pending)
            pending = []
            i += 2
            continue
        if allow_vars != tok.startswith("?"):
            kind = "variable" if allow_vars else "name"
            raise PDDLSyntaxError(f"expected {kind} in {what}, found {tok!r}", *_pos(tok))
        pending.append(tok)
        i += 1
    out.extend((p, ROOT_TYPE) for p in pending)
    return [(str(a), t) for a, t in out]


def _check_head(node: SList) -> str:
    if not node:
        raise PDDLSyntaxError("empty expression", *_pos(node))
    head = node[0]
    if isinstance(head, SList):
        raise PDDLSyntaxError("expected a keyword or predicate name", *_pos(head))
    if head in _UNSUPPORTED_HEADS:
        raise UnsupportedFeatureError(_UNSUPPORTED_HEADS[head], *_pos(head))
    return head


def _atom(node, allow_vars: bool, what: str) -> Literal:
    node = _expect_list(node, what)
    head = _check_head(node)
    args = []
    for a in node[1:]:
        a = _expect_sym(a, "a term")
        if a.startswith("?") and not allow_vars:
            raise PDDLSemanticError(f"{what} must be ground, found variable {a}", *_pos(a))
        args.append(str(a))
    return Literal(str(head), tuple(args))


def _conjunction(node, what: str) -> list:
    """Flatten ``(and ...)`` nesting into its conjuncts."""
    node = _expect_list(node, what)
    if not node:
        return []
    head = _check_head(node)
    if head == "and":
        out = []
        for part in node[1:]:
            out.extend(_conjunction(part, what))
        return out
    return [node]


def _precondition(node) -> list:
    out = []
    for part in _conjunction(node, "precondition"):
        head = part[0]
        if head == "not":
            if len(part) != 2:
                raise PDDLSyntaxError("'not' takes one argument", *_pos(part))
            inner = _expect_list(part[1], "negated atom")
            if _check_head(inner) != "=":
                raise UnsupportedFeatureError(":negative-preconditions", *_pos(part))
            lit = _atom(inner, True, "inequality")
            if len(lit.args) != 2:
                raise PDDLSyntaxError("'=' takes two terms", *_pos(inner))
            out.append(Literal("=", lit.args, False))
        elif head == "=":
            raise UnsupportedFeatureError("positive-equality-precondition", *_pos(part))
        else:
            out.append(_atom(part, True, "precondition atom"))
    return out


def _effect(node) -> tuple:
    add, delete = [], []
    for part in _conjunction(node, "effect"):
        if part[0] == "not":
            if len(part) != 2:
                raise PDDLSyntaxError("'not' takes one argument", *_pos(part))
            delete.append(_atom(part[1], True, "delete effect"))
        else:
            add.append(_atom(part, True, "add effect"))
    # an atom both added and deleted ends up true (delete-before-add)
    delete = [d for d in delete if d not in add]
    return _dedup(add), _dedup(delete)


def _dedup(items) -> tuple:
    return tuple(dict.fromkeys(items))


def _sections(root: SList, kind: str):
    root = _expect_list(root, kind)
    if len(root) < 2 or root[0] != "define":
        raise PDDLSyntaxError("expected (define ...)", *_pos(root))
    header = _expect_list(root[1], f"({kind} <name>)")
    if len(header) != 2 or header[0] != kind:
        raise PDDLSyntaxError(f"expected ({kind} <name>)", *_pos(header))
    name = str(_expect_sym(header[1], f"{kind} name"))
    sections = []
    for sec in root[2:]:
        sec = _expect_list(sec, "a section")
        if not sec or not isinstance(sec[0], Sym):
            raise PDDLSyntaxError("malformed section", *_pos(sec))
        if sec[0] in _UNSUPPORTED_SECTIONS:
            raise UnsupportedFeatureError(_UNSUPPORTED_SECTIONS[sec[0]], *_pos(sec))
        sections.append(sec)
    return name, sections


def _requirements(sec: SList) -> tuple:
    reqs = []
    for r in sec[1:]:
        r = _expect_sym(r, "requirement flag")
        if r not in SUPPORTED_REQUIREMENTS:
            raise UnsupportedFeatureError(str(r), *_pos(r))
        reqs.append(str(r))
    return tuple(reqs)


# -- domain -----------------------------------------------------------------


def _parse_action(sec: SList) -> ActionDef:
    if len(sec) < 2:
        raise PDDLSyntaxError("action without a name", *_pos(sec))
    name = str(_expect_sym(sec[1], "action name"))
    params: list = []
    pre: list = []
    add: tuple = ()
    delete: tuple = ()
    i = 2
    while i < len(sec):
        key = _expect_sym(sec[i], "action keyword")
        if i + 1 >= len(sec):
            raise PDDLSyntaxError(f"missing value for {key}", *_pos(key))
        val = sec[i + 1]
        if key == ":parameters":
            params = _typed_list(_expect_list(val, "parameter list"), True, "parameters")
        elif key == ":precondition":
            pre = _precondition(val)
        elif key == ":effect":
            add, delete = _effect(val)
        else:
            raise PDDLSyntaxError(f"unknown action keyword {key}", *_pos(key))
        i += 2
    return ActionDef(name, tuple(params), tuple(pre), add, delete)


def parse_domain(text: str) -> DomainAst:
    """Parse PDDL domain text into a :class:`DomainAst` and check its signature."""
    name, sections = _sections(read_sexpr(text), "domain")
    reqs: tuple = ()
    types: list = []
    constants: list = []
    predicates: list = []
    actions: list = []
    for sec in sections:
        key = sec[0]
        if key == ":requirements":
            reqs = _requirements(sec)
        elif key == ":types":
            types = _typed_list(sec[1:], False, "types")
        elif key == ":constants":
            constants = _typed_list(sec[1:], False, "constants")
        elif key == ":predicates":
            for p in sec[1:]:
                p = _expect_list(p, "predicate declaration")
                head = _check_head(p)
                predicates.append((PredicateDef(str(head), tuple(_typed_list(p[1:], True, "predicate"))), p))
        elif key == ":action":
            actions.append((_parse_action(sec), sec))
        else:
            raise PDDLSyntaxError(f"unknown domain section {key}", *_pos(sec))
    ast = DomainAst(
        name, reqs, tuple(types), tuple(constants),
        tuple(p for p, _ in predicates), tuple(a for a, _ in actions),
    )
    _check_domain(ast, predicates, actions)
    return ast


def _check_domain(ast: DomainAst, predicates, actions) -> None:
    parents = ast.parent_map()
    for t, parent in ast.types:
        if parent not in parents:
            raise PDDLSemanticError(f"type {t} has undeclared parent {parent}")
    for t in parents:
        seen = set()
        cur = t
        while cur is not None:
            if cur in seen:
                raise PDDLSemanticError(f"cyclic type hierarchy at {t}")
            seen.add(cur)
            cur = parents[cur]

    def check_type(t, where):
        if t not in parents:
            raise PDDLSemanticError(f"undeclared type {t} in {where}", *_pos(where))

    for c, t in ast.constants:
        check_type(t, f"constant {c}")
    seen_names: dict = {}
    for p, node in predicates:
        if p.name in seen_names:
            raise PDDLSemanticError(f"duplicate predicate {p.name}", *_pos(node))
        seen_names[p.name] = p
        for _, t in p.params:
            check_type(t, p.name)
    consts = dict(ast.constants)
    seen_actions = set()
    for a, node in actions:
        if a.name in seen_actions:
            raise PDDLSemanticError(f"duplicate action {a.name}", *_pos(node))
        seen_actions.add(a.name)
        scope = dict(a.params)
        if len(scope) != len(a.params):
            raise PDDLSemanticError(f"duplicate parameter in action {a.name}", *_pos(node))
        for _, t in a.params:
            check_type(t, a.name)
        for lit in a.precondition + a.add + a.delete:
            for arg in lit.args:
                if arg.startswith("?"):
                    if arg not in scope:
                        raise PDDLSemanticError(f"free variable {arg} in action {a.name}", *_pos(node))
                elif arg not in consts:
                    raise PDDLSemanticError(f"unknown constant {arg} in action {a.name}", *_pos(node))
            if lit.predicate == "=":
                continue
            pdef = seen_names.get(lit.predicate)
            if pdef is None:
                raise PDDLSemanticError(f"unknown predicate {lit.predicate} in action {a.name}", *_pos(node))
            if len(pdef.params) != len(lit.args):
                raise PDDLSemanticError(
                    f"arity mismatch for {lit.predicate} in action {a.name}: "
                    f"expected {len(pdef.params)}, got {len(lit.args)}", *_pos(node))
            for arg, (_, want) in zip(lit.args, pdef.params):
                have = scope[arg] if arg.startswith("?") else consts[arg]
                if not (_is_subtype(have, want, parents) or _is_subtype(want, have, parents)):
                    raise PDDLSemanticError(
                        f"type mismatch in action {a.name}: {arg} - {have} used as {want} in {lit.predicate}",
                        *_pos(node))


def _is_subtype(t: str, ancestor: str, parents: dict) -> bool:
    while t is not None:
        if t == ancestor:
            return True
        t = parents.get(t)
    return ancestor == ROOT_TYPE


# -- problem ----------------------------------------------------------------


def parse_problem(text: str, domain: DomainAst) -> ProblemAst:
    """Parse problem text and cross-check it against ``domain``."""
    name, sections = _sections(read_sexpr(text), "problem")
    domain_name = None
    objects: list = []
    init: list = []
    goal: list = []
    goal_seen = False
    nodes: list = []
    for sec in sections:
        key = sec[0]
        if key == ":domain":
            domain_name = str(_expect_sym(sec[1], "domain name")) if len(sec) == 2 else None
            if domain_name is None:
                raise PDDLSyntaxError("malformed :domain", *_pos(sec))
        elif key == ":requirements":
            _requirements(sec)
        elif key == ":objects":
            objects = _typed_list(sec[1:], False, "objects")
        elif key == ":init":
            for a in sec[1:]:
                if isinstance(a, SList) and a and a[0] == "not":
                    raise PDDLSemanticError("negative literals are not allowed in :init", *_pos(a))
                if isinstance(a, SList) and a and a[0] == "=":
                    raise UnsupportedFeatureError(":numeric-fluents", *_pos(a))
                if isinstance(a, SList) and len(a) == 3 and a[0] == "at" and _is_number(a[1]):
                    raise UnsupportedFeatureError(":timed-initial-literals", *_pos(a))
                lit = _atom(a, False, "init atom")
                init.append(lit)
                nodes.append((lit, a))
        elif key == ":goal":
            if len(sec) != 2:
                raise PDDLSyntaxError(":goal takes exactly one formula", *_pos(sec))
            goal_seen = True
            for part in _conjunction(sec[1], "goal"):
                if part[0] == "not":
                    raise PDDLSemanticError("goal must be a conjunction of ground atoms", *_pos(part))
                lit = _atom(part, False, "goal atom")
                goal.append(lit)
                nodes.append((lit, part))
        else:
            raise PDDLSyntaxError(f"unknown problem section {key}", *_pos(sec))
    if domain_name is None:
        raise PDDLSemanticError("problem does not name its domain")
    if domain_name != domain.name:
        raise PDDLSemanticError(f"problem is for domain {domain_name}, not {domain.name}")
    if not goal_seen:
        raise PDDLSemanticError("problem has no :goal")
    parents = domain.parent_map()
    typed: dict = dict(domain.constants)
    for o, t in objects:
        if t not in parents:
            raise PDDLSemanticError(f"undeclared type {t} for object {o}")
        if o in typed and typed[o] != t:
            raise PDDLSemanticError(f"object {o} declared with conflicting types")
        typed[o] = t
    preds = {p.name: p for p in domain.predicates}
    for lit, node in nodes:
        pdef = preds.get(lit.predicate)
        if pdef is None:
            raise PDDLSemanticError(f"unknown predicate {lit.predicate}", *_pos(node))
        if len(pdef.params) != len(lit.args):
            raise PDDLSemanticError(
                f"arity mismatch for {lit.predicate}: expected {len(pdef.params)}, got {len(lit.args)}",
                *_pos(node))
        for arg, (_, want) in zip(lit.args, pdef.params):
            if arg not in typed:
                raise PDDLSemanticError(f"unknown constant {arg}", *_pos(node))
            if not _is_subtype(typed[arg], want, parents):
                raise PDDLSemanticError(f"{arg} - {typed[arg]} is not a {want} in {lit.predicate}", *_pos(node))
    return ProblemAst(name, domain_name, tuple(objects), tuple(init), tuple(goal))


def _is_number(node) -> bool:
    try:
        float(node)
    except (TypeError, ValueError):
        return False
    return isinstance(node, Sym)


# -- pretty printing --------------------------------------------------------


def _typed_str(pairs) -> str:
    return " ".join(f"{a} - {t}" for a, t in pairs)


def _conj(lits) -> str:
    return "(and " + " ".join(map(str, lits)) + ")"


def domain_to_pddl(ast: DomainAst) -> str:
    out = [f"(define (domain {ast.name})"]
    if ast.requirements:
        out.append("  (:requirements " + " ".join(ast.requirements) + ")")
    if ast.types:
        out.append("  (:types " + _typed_str(ast.types) + ")")
    if ast.constants:
        out.append("  (:constants " + _typed_str(ast.constants) + ")")
    preds = " ".join("(" + " ".join([p.name, _typed_str(p.params)]).strip() + ")" for p in ast.predicates)
    out.append(f"  (:predicates {preds})")
    for a in ast.actions:
        pre = [Literal("=", l.args) if l.predicate == "=" else l for l in a.precondition]
        pre_s = " ".join(f"(not {l})" if l.predicate == "=" else str(l) for l in pre)
        eff = [*a.add, *(Literal(d.predicate, d.args, False) for d in a.delete)]
        out.append(f"  (:action {a.name}")
        out.append(f"   :parameters ({_typed_str(a.params)})")
        out.append(f"   :precondition (and {pre_s})")
        out.append(f"   :effect {_conj(eff)})")
    out.append(")")
    return "\n".join(out) + "\n"


def problem_to_pddl(ast: ProblemAst) -> str:
    return "\n".join([
        f"(define (problem {ast.name})",
        f"  (:domain {ast.domain_name})",
        f"  (:objects {_typed_str(ast.objects)})",
        "  (:init " + " ".join(map(str, ast.init)) + ")",
        f"  (:goal {_conj(ast.goal)})",
        ")",
    ]) + "\n"


# -- compilation ----------------------------------------------------------


def compile_task(domain: DomainAst, problem: ProblemAst, bound: int = 100) -> PlanningTask:
    """Intern symbols, flatten types and build the CWA initial state."""
    if bound < 0:
        raise ValueError("bound must be non-negative")
    parents = domain.parent_map()
    constants: dict = {}
    for c, t in list(domain.constants) + list(problem.objects):
        constants.setdefault(c, t)
    const_names = tuple(constants)
    const_id = {c: i for i, c in enumerate(const_names)}
    types: dict = {t: [] for t in parents}
    for c, t in constants.items():
        cur = t
        while cur is not None:
            types[cur].append(const_id[c])
            cur = parents[cur]
    types = {t: tuple(ids) for t, ids in types.items()}

    pred_names = tuple(p.name for p in domain.predicates)
    pred_id = {p: i for i, p in enumerate(pred_names)}

    schemas = []
    for a in domain.actions:
        scope = {v: i for i, (v, _) in enumerate(a.params)}

        def term(x, scope=scope):
            return var(scope[x]) if x.startswith("?") else const_id[x]

        def lits(ls):
            return tuple(dict.fromkeys((pred_id[l.predicate], tuple(term(x) for x in l.args)) for l in ls))

        pos = [l for l in a.precondition if l.predicate != "="]
        neq = tuple(dict.fromkeys(tuple(term(x) for x in l.args) for l in a.precondition if l.predicate == "="))
        add = lits(a.add)
        delete = tuple(d for d in lits(a.delete) if d not in add)
        schemas.append(ActionSchema(
            a.name, tuple(v for v, _ in a.params), tuple(t for _, t in a.params),
            lits(pos), neq, add, delete,
        ))

    def ground(lit):
        return (pred_id[lit.predicate], tuple(const_id[x] for x in lit.args))

    init = State(ground(l) for l in problem.init)
    goal = frozenset(ground(l) for l in problem.goal)
    task = PlanningTask(
        tuple(schemas), pred_names, tuple(len(p.params) for p in domain.predicates),
        const_names, types, init, goal, bound, problem.name, domain.name,
    )
    addable = {pred for s in schemas for pred, _ in s.add}
    for atom in sorted(goal):
        if atom not in init and atom[0] not in addable:
            msg = f"goal {task.format_atom(atom)} is false initially and no action adds it: unsolvable"
            task.diagnostics.append(msg)
            log.warning(msg)
    return task


PathOrText = Union[str, Path]


def _read(src: PathOrText) -> str:
    if isinstance(src, Path) or ("(" not in src and Path(src).exists()):
        return Path(src).read_text()
    return src


def load_task(domain: PathOrText, problem: PathOrText, bound: int = 100) -> PlanningTask:
    """Parse and compile a domain/problem pair given as paths or PDDL text."""
    dom = parse_domain(_read(domain))
    prob = parse_problem(_read(problem), dom)
    return compile_task(dom, prob, bound)
