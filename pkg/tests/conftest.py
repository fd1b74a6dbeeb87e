import random

import pytest

from boolqif.corpus import BUNDLED, load_program
from boolqif.lang import parse
from boolqif.randprog import random_program

M1_SRC = "high h:bool[2]; out o:bool[1]; if (!h[1] & h[0]) then o[0]:=false else o[0]:=true"
M2_SRC = "high h:bool[2]; out o:bool[2]; o[0] := h[0]; o[1] := h[1]"
CONST_SRC = "high h:bool[2]; out o:bool[1]; o[0] := true"

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def m1():
    return parse(M1_SRC, "m1")


@pytest.fixture
def m2():
    return parse(M2_SRC, "m2")


@pytest.fixture
def const():
    return parse(CONST_SRC, "const")


def corpus_programs():
    return [load_program(p) for p in sorted(BUNDLED.glob("*.bp"))]


def random_suite(n, seed, **kw):
    rng = random.Random(seed)
    return [random_program(rng, name=f"r{seed}_{i}", **kw) for i in range(n)]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
