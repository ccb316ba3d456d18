from functools import lru_cache
from pathlib import Path

import pytest

from holostab.circuit import load_circuit
from holostab.code import load_code
from holostab.compiler import parse_terms, rewrite_generators, synthesize

CORPUS = Path(__file__).resolve().parents[1] / "src" / "holostab" / "corpus"


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run long numerical tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="long-running; pass --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@lru_cache(maxsize=None)
def code(name):
    return load_code(CORPUS / f"{name}.code")


@lru_cache(maxsize=None)
def circuit(code_name, circ_name):
    return load_circuit(CORPUS / f"{circ_name}.circ", code(code_name).n)


@lru_cache(maxsize=None)
def schedule(code_name, circ_name, break_policy="first"):
    return synthesize(code(code_name), circuit(code_name, circ_name), break_policy=break_policy)


@lru_cache(maxsize=None)
def cnot_schedules():
    """(naive, rewritten) Steane CNOT schedules with the reference break choice."""
    naive = schedule("steane_pair", "steane_cnot", "last")
    after, terms = parse_terms((CORPUS / "steane_cnot_rewrite.terms").read_text())
    return naive, rewrite_generators(naive, after, terms)


@pytest.fixture
def rep3():
    return code("repetition3")


@pytest.fixture
def steane():
    return code("steane")


@pytest.fixture
def rep3_xbar():
    return schedule("repetition3", "repetition3_xbar")


@pytest.fixture
def steane_xbar():
    return schedule("steane", "steane_xbar")
