"""Access to the PDDL instances shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

DOMAINS = ("blocksworld", "corridor", "gripper", "logistics")


def data_dir() -> Path:
    return Path(str(resources.files("sitplan") / "data"))


def domain_file(domain: str, variant: str = "domain") -> Path:
    return data_dir() / domain / f"{variant}.pddl"


def problem_file(domain: str, problem: str) -> Path:
    return data_dir() / domain / f"{problem}.pddl"


def problems(domain: str) -> list:
    """Problem names of one bundled domain, sorted."""
    return sorted(p.stem for p in (data_dir() / domain).glob("*.pddl") if not p.stem.startswith("domain"))


def all_instances() -> list:
    """``(domain_path, problem_path)`` for every bundled problem."""
    return [(domain_file(d), problem_file(d, p)) for d in DOMAINS for p in problems(d)]


def load(domain: str, problem: str, bound: int = 100, variant: str = "domain"):
    from .pddl import load_task

    return load_task(domain_file(domain, variant), problem_file(domain, problem), bound)
