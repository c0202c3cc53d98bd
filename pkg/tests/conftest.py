import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sitplan import instances  # noqa: E402


@pytest.fixture(scope="session")
def sussman():
    return instances.load("blocksworld", "sussman")


@pytest.fixture(scope="session")
def sussman_axioms():
    """Sussman anomaly under the table-to-block precondition without x != z."""
    return instances.load("blocksworld", "sussman", variant="domain-axioms")


@pytest.fixture(scope="session")
def bw_domain_text():
    return instances.domain_file("blocksworld").read_text()


def bw_task(blocks, init, goal, variant="domain", bound=100):
    """Compile a blocks-world problem from name tuples."""
    from sitplan.pddl import load_task

    fmt = lambda atoms: " ".join("(" + " ".join(a) + ")" for a in atoms)  # noqa: E731
    text = (
        f"(define (problem p) (:domain blocksworld) (:objects {' '.join(blocks)})"
        f" (:init {fmt(init)}) (:goal (and {fmt(goal)})))"
    )
    return load_task(instances.domain_file("blocksworld", variant).read_text(), text, bound)


# Lines appended by tests/test_acceptance.py, echoed in the terminal summary.
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
