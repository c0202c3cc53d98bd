import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sitplan import instances
from sitplan.pddl import (
    PDDLSemanticError, PDDLSyntaxError, UnsupportedFeatureError, compile_task, domain_to_pddl,
    parse_domain, parse_problem, problem_to_pddl,
)

SUSSMAN = instances.problem_file("blocksworld", "sussman").read_text()


def test_blocksworld_domain_shape(bw_domain_text):
    dom = parse_domain(bw_domain_text)
    assert len(dom.actions) == 3
    assert len(dom.predicates) == 3
    assert [a.name for a in dom.actions] == ["move-b-to-b", "move-b-to-t", "move-t-to-b"]


def test_empty_predicates_block():
    dom = parse_domain("(define (domain empty) (:requirements :strips) (:predicates))")
    assert dom.predicates == ()
    assert dom.actions == ()


def test_identifiers_are_case_insensitive():
    dom = parse_domain("(define (domain D) (:predicates (P ?X)) (:action A :parameters (?x) "
                       ":precondition (p ?x) :effect (not (P ?X))))")
    assert dom.name == "d" and dom.predicates[0].name == "p"
    assert dom.actions[0].delete[0].args == ("?x",)


@pytest.mark.parametrize("snippet,construct", [
    ("(when (p ?x) (q ?x))", ":conditional-effects"),
    ("(forall (?y) (q ?y))", ":universal-preconditions"),
    ("(increase (total-cost) 1)", ":numeric-fluents"),
])
def test_unsupported_effects(snippet, construct):
    text = ("(define (domain d) (:predicates (p ?x) (q ?x)) (:action a :parameters (?x) "
            f":precondition (p ?x) :effect (and (q ?x) {snippet})))")
    with pytest.raises(UnsupportedFeatureError) as err:
        parse_domain(text)
    assert err.value.construct == construct
    assert err.value.line == 1 and err.value.col > 0


@pytest.mark.parametrize("pre,construct", [
    ("(or (p ?x) (q ?x))", ":disjunctive-preconditions"),
    ("(not (p ?x))", ":negative-preconditions"),
    ("(exists (?y) (p ?y))", ":existential-preconditions"),
    ("(= ?x ?x)", "positive-equality-precondition"),
])
def test_unsupported_preconditions(pre, construct):
    text = ("(define (domain d) (:predicates (p ?x) (q ?x)) (:action a :parameters (?x) "
            f":precondition (and {pre}) :effect (q ?x)))")
    with pytest.raises(UnsupportedFeatureError) as err:
        parse_domain(text)
    assert err.value.construct == construct


@pytest.mark.parametrize("req", [":action-costs", ":adl", ":negative-preconditions", ":fluents"])
def test_unsupported_requirements(req):
    with pytest.raises(UnsupportedFeatureError, match=req):
        parse_domain(f"(define (domain d) (:requirements :strips {req}) (:predicates))")


def test_functions_section_rejected():
    with pytest.raises(UnsupportedFeatureError, match=":numeric-fluents"):
        parse_domain("(define (domain d) (:predicates) (:functions (total-cost)))")


def test_syntax_errors_carry_location():
    with pytest.raises(PDDLSyntaxError) as err:
        parse_domain("(define (domain d)\n  (:predicates (p ?x))\n")
    assert err.value.line == 1
    with pytest.raises(PDDLSyntaxError) as err:
        parse_domain("(define (domain d))\n)")
    assert (err.value.line, err.value.col) == (2, 1)


def test_domain_signature_errors():
    with pytest.raises(PDDLSemanticError, match="arity"):
        parse_domain("(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x) "
                     ":precondition (p ?x ?x) :effect (p ?x)))")
    with pytest.raises(PDDLSemanticError, match="free variable"):
        parse_domain("(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x) "
                     ":precondition (p ?x) :effect (p ?y)))")
    with pytest.raises(PDDLSemanticError, match="duplicate predicate"):
        parse_domain("(define (domain d) (:predicates (p ?x) (P ?y)))")
    with pytest.raises(PDDLSemanticError, match="undeclared type"):
        parse_domain("(define (domain d) (:types a) (:predicates (p ?x - b)))")


def test_sussman_problem_counts(bw_domain_text):
    prob = parse_problem(SUSSMAN, parse_domain(bw_domain_text))
    assert len(prob.objects) == 3
    assert len(prob.init) == 5
    assert len(prob.goal) == 2


def test_single_atom_goal(bw_domain_text):
    text = "(define (problem p) (:domain blocksworld) (:objects a) (:init (clear a)) (:goal (ontable a)))"
    prob = parse_problem(text, parse_domain(bw_domain_text))
    assert len(prob.goal) == 1


@pytest.mark.parametrize("init,goal,err", [
    ("(clear z)", "(clear a)", "unknown constant"),
    ("(clear a a)", "(clear a)", "arity mismatch"),
    ("(holding a)", "(clear a)", "unknown predicate"),
    ("(clear a)", "(or (clear a) (ontable a))", "disjunctive"),
    ("(clear a)", "(not (clear a))", "conjunction of ground atoms"),
    ("(clear a)", "(clear ?x)", "ground"),
])
def test_problem_errors(bw_domain_text, init, goal, err):
    text = f"(define (problem p) (:domain blocksworld) (:objects a) (:init {init}) (:goal {goal}))"
    with pytest.raises((PDDLSemanticError, UnsupportedFeatureError), match=err):
        parse_problem(text, parse_domain(bw_domain_text))


def test_problem_type_errors():
    dom = parse_domain(instances.domain_file("gripper").read_text())
    text = ("(define (problem p) (:domain gripper) (:objects r - room b - ball g - gripper) "
            "(:init (at-robby b)) (:goal (at b r)))")
    with pytest.raises(PDDLSemanticError, match="not a room"):
        parse_problem(text, dom)


def test_compile_sussman(sussman):
    assert len(sussman.universe) == 3
    assert sussman.bound == 100
    assert len(sussman.init) == 5
    assert sussman.goal == {sussman.atom("on", "a", "b"), sussman.atom("on", "b", "c")}


def test_duplicate_init_atoms_collapse(bw_domain_text):
    dom = parse_domain(bw_domain_text)
    text = "(define (problem p) (:domain blocksworld) (:objects a) (:init (clear a) (clear a)) (:goal (clear a)))"
    task = compile_task(dom, parse_problem(text, dom), 10)
    assert len(task.init) == 1


def test_move_b_to_b_effects(sussman):
    schema = sussman.schemas[sussman.schema_id("move-b-to-b")]
    on, clear = sussman.predicate_id("on"), sussman.predicate_id("clear")
    x, y, z = -1, -2, -3
    assert set(schema.add) == {(on, (x, z)), (clear, (y,))}
    assert set(schema.delete) == {(on, (x, y)), (clear, (z,))}
    assert schema.precond_neq == ((x, z),)


def test_add_wins_over_delete():
    dom = parse_domain("(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x) "
                       ":precondition (p ?x) :effect (and (not (p ?x)) (p ?x))))")
    assert dom.actions[0].delete == ()


def test_unreachable_goal_is_diagnosed(bw_domain_text):
    text = ("(define (domain d) (:predicates (p) (q)) (:action a :parameters () "
            ":precondition (p) :effect (p)))")
    dom = parse_domain(text)
    prob = parse_problem("(define (problem x) (:domain d) (:init (p)) (:goal (q)))", dom)
    task = compile_task(dom, prob)
    assert task.diagnostics and "unsolvable" in task.diagnostics[0]


def test_types_flattened(bw_domain_text):
    task = instances.load("logistics", "log-1")
    airports = {task.constants[c] for c in task.types["airport"]}
    locations = {task.constants[c] for c in task.types["location"]}
    assert airports == {"c1-air", "c2-air"}
    assert locations == {"c1-air", "c2-air", "c1-depot", "c2-depot"}
    assert set(task.types["object"]) == set(task.universe)


@pytest.mark.parametrize("domain", instances.DOMAINS)
def test_round_trip_bundled_domains(domain):
    dom = parse_domain(instances.domain_file(domain).read_text())
    assert parse_domain(domain_to_pddl(dom)) == dom
    for name in instances.problems(domain):
        prob = parse_problem(instances.problem_file(domain, name).read_text(), dom)
        assert parse_problem(problem_to_pddl(prob), dom) == prob


names = st.sampled_from(["p", "q", "r", "s"])


@st.composite
def random_domains(draw):
    arities = {n: draw(st.integers(0, 3)) for n in draw(st.sets(names, min_size=1))}
    preds = " ".join(f"({n} {' '.join(f'?a{i}' for i in range(k))})" for n, k in arities.items())
    acts = []
    for j in range(draw(st.integers(0, 3))):
        nparams = draw(st.integers(0, 3))
        params = [f"?v{i}" for i in range(nparams)]

        def lit():
            n = draw(st.sampled_from(sorted(arities)))
            if nparams == 0 and arities[n]:
                return None
            return f"({n} {' '.join(draw(st.sampled_from(params)) for _ in range(arities[n]))})"

        pre = [x for x in (lit() for _ in range(draw(st.integers(0, 3)))) if x]
        if nparams >= 2 and draw(st.booleans()):
            pre.append(f"(not (= {params[0]} {params[1]}))")
        eff = [x for x in (lit() for _ in range(draw(st.integers(0, 2)))) if x]
        eff += [f"(not {x})" for x in (lit() for _ in range(draw(st.integers(0, 2)))) if x]
        acts.append(f"(:action act{j} :parameters ({' '.join(params)}) "
                    f":precondition (and {' '.join(pre)}) :effect (and {' '.join(eff)}))")
    return f"(define (domain rnd) (:requirements :strips :equality) (:predicates {preds}) {' '.join(acts)})"


@settings(max_examples=80, deadline=None)
@given(random_domains())
def test_round_trip_random_domains(text):
    dom = parse_domain(text)
    assert parse_domain(domain_to_pddl(dom)) == dom


def test_cwa_completeness(sussman):
    dom = parse_domain(instances.domain_file("blocksworld").read_text())
    prob = parse_problem(SUSSMAN, dom)
    listed = {(l.predicate,) + l.args for l in prob.init}
    for pid, pname in enumerate(sussman.predicates):
        for args in itertools.product(sussman.constants, repeat=sussman.predicate_arity[pid]):
            assert sussman.init.holds(pid, tuple(map(sussman.constant_id, args))) == ((pname,) + args in listed)


@pytest.mark.parametrize("domain", instances.DOMAINS)
def test_signature_closure(domain):
    task = instances.load(domain, instances.problems(domain)[0])
    for s in task.schemas:
        for pred, terms in s.precond_pos + s.add + s.delete:
            assert len(terms) == task.predicate_arity[pred]
            for t in terms:
                assert (t < 0 and -t - 1 < s.arity) or 0 <= t < len(task.constants)
