import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from boolqif.lang import (
    And, Assign, Decl, Eq, FalseF, If, Not, Or, ParseError, Program, Skip, TrueF, Var,
    While, Xor, desugar, eval_formula, formula_vars, is_core, parse, parse_formula, pretty,
    validate,
)
from boolqif.randprog import random_formula, random_program

from conftest import M1_SRC, corpus_programs


def test_parse_m1(m1):
    assert isinstance(m1.body, If)
    assert m1.body.cond == And(Not(Var("h", 1)), Var("h", 0))
    assert m1.body.then == Assign("o", 0, FalseF())
    assert m1.body.orelse == Assign("o", 0, TrueF())
    assert m1.n_high == 2 and m1.n_out == 1 and m1.loop_free


def test_parse_minimal_skip():
    p = parse("high h:bool[1]; out o:bool[1]; skip")
    assert p.body == Skip()


def test_positions_retained():
    p = parse("high h:bool[1];\nout o:bool[1];\n  o[0] := !h[0]")
    assert p.body.pos == (3, 3)
    assert p.body.expr.pos == (3, 11)
    assert p.body.expr.arg.pos == (3, 12)
    assert p.decls[1].pos == (2, 1)


@pytest.mark.parametrize("src, fragment, pos", [
    ("high h:bool[1]; out o:bool[1]; o[0] := h[2]", "out of range", (1, 42)),
    ("high h:bool[1]; out o:bool[1]; o[0] := g[0]", "unknown variable", (1, 40)),
    ("high h:bool[1]; high h:bool[2]; out o:bool[1]; skip", "duplicate", (1, 22)),
    ("high h:bool[1]; out o:bool[1]; o[0] := ", "expected formula", None),
    ("high h:bool[1]; out o:bool[1]; o[0] = h[0]", "unexpected character '='", (1, 37)),
    ("high h:bool[1]; out o:bool[1]; skip skip", "expected ';'", (1, 37)),
    ("high h:bool[2]; out o:bool[1]; o[0] := h", "bit index is required", (1, 40)),
    ("high h:bool[1]; out o:bool[1]; o[0] := h[0] $", "unexpected character", (1, 45)),
])
def test_parse_errors(src, fragment, pos):
    with pytest.raises(ParseError) as e:
        parse(src)
    assert fragment in e.value.message
    if pos is not None:
        assert e.value.pos == pos


def test_comments_and_sugar_precedence():
    p = parse("""
        // header comment
        high a:bool[1]; high b:bool[1]; out o:bool[1];
        o[0] := a | b & !a == false  // trailing
    """)
    # == binds loosest, then |, then &, then !
    assert p.body.expr == Eq(Or(Var("a"), And(Var("b"), Not(Var("a")))), FalseF())


def test_dangling_else_binds_innermost():
    p = parse("high h:bool[2]; out o:bool[1]; if h[0] then if h[1] then o[0] := true else skip")
    assert p.body.orelse == Skip()
    assert p.body.then.orelse == Skip()


def test_braces_and_while():
    p = parse("high h:bool[1]; out o:bool[1]; while h[0] do { o[0] := true; observe }; skip")
    assert isinstance(p.body.first, While)
    assert not p.loop_free


def test_desugar_examples():
    a, b = Var("a"), Var("b")
    assert desugar(Or(a, b)) == Not(And(Not(a), Not(b)))
    assert desugar(FalseF()) == Not(TrueF())


def test_desugar_xor_truth_table():
    a, b = Var("a"), Var("b")
    core = desugar(Xor(a, b))
    assert is_core(core)
    for x, y in itertools.product((False, True), repeat=2):
        assert eval_formula(core, {("a", 0): x, ("b", 0): y}) == (x != y)


def test_desugar_preserves_truth_exhaustively():
    rng = random.Random(7)
    for v in range(1, 11):
        bits = [(f"x{i}", 0) for i in range(v)]
        for _ in range(3):
            f = random_formula(rng, bits, depth=4)
            core = desugar(f)
            assert is_core(core)
            assert formula_vars(core) <= set(bits)
            for vals in itertools.product((False, True), repeat=v):
                env = dict(zip(bits, vals))
                assert eval_formula(core, env) == eval_formula(f, env)


def test_validate_m1_clean(m1):
    assert validate(m1).ok


def test_validate_write_to_high():
    p = parse("high h:bool[1]; out o:bool[1]; h[0] := true")
    report = validate(p)
    assert len(report.violations) == 1
    assert "high input is read-only" in report.violations[0].message


def test_validate_no_out():
    p = parse("high h:bool[1]; local t:bool[1]; t[0] := h[0]")
    report = validate(p)
    assert [v.message for v in report.violations] == ["program declares no out variable"]


def test_validate_constructed_ast():
    p = Program("x", (Decl("h", "high", 1), Decl("o", "out", 1)), Assign("o", 3, Var("z", 0)))
    msgs = [v.message for v in validate(p).violations]
    assert any("out of range" in m for m in msgs)
    assert any("undeclared variable 'z'" in m for m in msgs)


def test_validate_enumeration_cap():
    p = parse("high h:bool[30]; out o:bool[1]; skip")
    assert not validate(p).ok
    assert validate(p, enum_cap=30).ok


def test_validate_accepts_corpus():
    for p in corpus_programs():
        assert validate(p).ok, p.name


def test_pretty_roundtrip_m1(m1):
    assert parse(pretty(m1)) == m1


def test_pretty_keeps_left_nested_sequences():
    from boolqif.lang import Seq
    s = Seq(Seq(Skip(), Assign("o", 0, TrueF())), Skip())
    p = Program("n", (Decl("h", "high", 1), Decl("o", "out", 1)), s)
    assert parse(pretty(p)) == p


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_pretty_roundtrip_random(seed, loops):
    p = random_program(random.Random(seed), loops=loops, observes=True, max_depth=3)
    assert parse(pretty(p)) == p
    # whitespace does not matter
    assert parse(" ".join(pretty(p).split())) == p


def test_parse_formula_against_decls(m1):
    f = parse_formula("o[0] == !h[1]", m1.decls)
    assert f == Eq(Var("o", 0), Not(Var("h", 1)))
    with pytest.raises(ParseError):
        parse_formula("q[0]", m1.decls)


def test_formula_equality_ignores_positions():
    assert Var("h", 0, pos=(1, 1)) == Var("h", 0, pos=(9, 9))
    assert hash(And(TrueF(), Var("h"))) == hash(And(TrueF((3, 3)), Var("h")))
    assert And(Var("a"), Var("b")) != Or(Var("a"), Var("b"))


def test_m1_source_constant_matches_corpus():
    from boolqif.corpus import BUNDLED, load_program
    assert load_program(BUNDLED / "m1.bp").body == parse(M1_SRC).body
