import itertools
import random
from pathlib import Path

import pytest

from boolqif.corpus import BUNDLED, load_program
from boolqif.interp import enumerate_program
from boolqif.lang import (
    And, Not, Or, TrueF, Var, eval_formula, formula_vars, parse, parse_formula,
)
from boolqif.randprog import random_cnf, random_formula
from boolqif.selfcomp import self_compose
from boolqif.solver import (
    SAT, UNKNOWN, UNSAT, Cnf, NotLoopFree, SolverBudgetExceeded, dag_size, export_dimacs,
    find_counterexample, parse_dimacs, parse_model, passify, sat, tseitin, valid, wp,
)

from conftest import corpus_programs, random_suite
from oracles import truth_table_sat

GOLDEN = Path(__file__).parent / "golden"


def _wp_oracle_check(p, post):
    """h |= wp(p, post) iff post holds after running p on h, for every h."""
    phi = wp(p, post)
    t = enumerate_program(p)
    for bits, o in t.items():
        env_in = dict(zip(p.high_bits, (c == "1" for c in bits)))
        env_out = dict(zip(p.out_bits, (c == "1" for c in o.final)))
        assert eval_formula(phi, env_in) == eval_formula(post, env_out), (p.name, bits)
    return phi


def test_wp_assignment():
    p = parse("high h:bool[1]; out o:bool[1]; o[0] := h[0]")
    assert wp(p, Var("o", 0)) == Var("h", 0)


def test_wp_skip():
    p = parse("high h:bool[1]; out o:bool[1]; skip")
    phi = And(Var("h", 0), Not(Var("o", 0)))
    # out bits start false, so o[0] is substituted by false
    assert wp(p, Var("h", 0)) == Var("h", 0)
    assert eval_formula(wp(p, phi), {("h", 0): True})


def test_wp_m1(m1):
    phi = _wp_oracle_check(m1, Var("o", 0))
    expect = Not(And(Not(Var("h", 1)), Var("h", 0)))
    for h1, h0 in itertools.product((False, True), repeat=2):
        env = {("h", 1): h1, ("h", 0): h0}
        assert eval_formula(phi, env) == eval_formula(expect, env)
    assert formula_vars(phi) <= set(m1.high_bits)


def test_wp_rejects_loops():
    p = parse("high h:bool[1]; out o:bool[1]; while h[0] do skip")
    with pytest.raises(NotLoopFree):
        wp(p, Var("o", 0))


def test_passify_single_assignment(m1):
    pp = passify(m1)
    fresh = [v for v, _ in pp.definitions]
    assert len(fresh) == len(set(fresh))
    defined = set()
    for v, f in pp.definitions:
        for name, bit in formula_vars(f):
            assert (name, bit) in m1.high_bits or (name, bit) in defined
        defined.add((v.name, v.bit))


def test_wp_sound_on_corpus():
    for p in corpus_programs():
        if not p.loop_free or p.name.endswith("_trace"):
            continue
        for b in p.out_bits:
            _wp_oracle_check(p, Var(*b))


def test_wp_random_pairs_and_size():
    rng = random.Random(99)
    for p in random_suite(120, seed=17, max_high=6, n_stmts=10):
        post = random_formula(rng, p.out_bits, depth=3)
        phi = _wp_oracle_check(p, post)
        assert dag_size(phi) <= 10 * p.size() * dag_size(post)


def test_wp_avoids_exponential_blowup():
    # each line doubles the naive substitution size
    lines = ["o[0] := h[0]"] + ["o[0] := o[0] ^ o[0] ^ h[1]"] * 40
    p = parse("high h:bool[2]; out o:bool[1]; " + "; ".join(lines))
    phi = wp(p, Var("o", 0))
    assert dag_size(phi) < 10 * p.size()


def test_tseitin_true():
    c = tseitin(TrueF())
    assert c.num_vars == 1 and c.clauses == [(1,)]
    assert export_dimacs(c) == "p cnf 1 1\n1 0\n"


def test_tseitin_contradiction():
    a = Var("a")
    assert sat(tseitin(And(a, Not(a)))).status == UNSAT


def _projected_models(cnf):
    """Projections of all CNF models onto the named bits, by truth table."""
    keys = sorted(cnf.names, key=cnf.names.get)
    out = set()
    for bits in truth_table_sat(cnf.num_vars, cnf.clauses):
        out.add(tuple(bits[cnf.names[k] - 1] for k in keys))
    return keys, out


def test_tseitin_models_match_truth_table():
    rng = random.Random(8)
    for n in (1, 3, 5, 8):
        bits = [("x", i) for i in range(n)]
        for _ in range(6):
            f = random_formula(rng, bits, depth=3)
            cnf = tseitin(f)
            if cnf.num_vars > 20:
                continue
            keys, models = _projected_models(cnf)
            want = set()
            for vals in itertools.product((False, True), repeat=len(keys)):
                if eval_formula(f, dict(zip(keys, vals))):
                    want.add(vals)
            assert models == want


def test_sat_basic():
    assert sat(Cnf(1, [(1,), (-1,)])).status == UNSAT
    r = sat(Cnf(0, []))
    assert r.status == SAT and r.model == {}
    r = sat(Cnf(3, [(1, 2), (-1,), (-2, 3)]))
    assert r.status == SAT and r.model == {1: False, 2: True, 3: True}


def test_sat_random_vs_truth_table():
    rng = random.Random(12)
    outcomes = set()
    for _ in range(100):
        cnf = Cnf(12, random_cnf(rng, 12, 40, width=rng.choice((2, 3))))
        models = truth_table_sat(12, cnf.clauses)
        outcomes.add(bool(models))
        r = sat(cnf)
        assert r.status == (SAT if models else UNSAT)
        if r.sat:
            assert tuple(r.model[v] for v in range(1, 13)) in models
    assert outcomes == {True, False}


def test_sat_pigeonhole_unsat():
    # 5 pigeons, 4 holes
    var = lambda i, j: i * 4 + j + 1
    clauses = [tuple(var(i, j) for j in range(4)) for i in range(5)]
    for j in range(4):
        for a, b in itertools.combinations(range(5), 2):
            clauses.append((-var(a, j), -var(b, j)))
    assert sat(Cnf(20, clauses)).status == UNSAT


def test_sat_decision_cap_reports_unknown():
    rng = random.Random(4)
    cnf = Cnf(60, random_cnf(rng, 60, 255, 3))
    r = sat(cnf, decision_cap=1)
    assert r.status in (UNKNOWN, SAT, UNSAT)
    assert r.status == UNKNOWN or r.decisions <= 1
    full = sat(cnf)
    assert full.status in (SAT, UNSAT)
    if r.status != UNKNOWN:
        assert r.status == full.status


def test_valid_examples(m1):
    a = Var("a")
    assert valid(Or(a, Not(a)))
    assert not valid(a)
    cp = self_compose(m1, 3, "collision")
    assert valid(wp(cp.program, cp.post))


def test_valid_raises_on_cap():
    # pigeonhole needs search, so one decision cannot settle it
    holes = 5
    x = lambda i, j: Var(f"p{i}", j)
    f = TrueF()
    for i in range(holes + 1):
        row = Not(TrueF())
        for j in range(holes):
            row = Or(row, x(i, j))
        f = And(f, row)
    for j in range(holes):
        for a, b in itertools.combinations(range(holes + 1), 2):
            f = And(f, Not(And(x(a, j), x(b, j))))
    res, _ = find_counterexample(Not(f), decision_cap=1)
    if res.status == UNKNOWN:
        with pytest.raises(SolverBudgetExceeded):
            valid(Not(f), decision_cap=1)
    assert valid(Not(f))


def test_counterexample_projects_to_inputs(m1):
    phi = wp(m1, Var("o", 0))
    res, cnf = find_counterexample(phi)
    assert res.sat
    h = cnf.project(res.model)
    assert h == {("h", 1): False, ("h", 0): True}


@pytest.mark.parametrize("name, build", [
    ("unit.cnf", lambda: tseitin(TrueF())),
    ("unsat_pair.cnf", lambda: Cnf(1, [(1,), (-1,)], {("x", 0): 1})),
    ("m1_wp_o0.cnf", lambda: tseitin(wp(load_program(BUNDLED / "m1.bp"), Var("o", 0)))),
])
def test_dimacs_golden(name, build):
    assert export_dimacs(build()) == (GOLDEN / name).read_text()


def test_dimacs_roundtrip():
    p = load_program(BUNDLED / "password4.bp")
    cnf = tseitin(wp(p, parse_formula("ok[0]", p.decls)))
    back = parse_dimacs(export_dimacs(cnf))
    assert back.num_vars == cnf.num_vars and back.clauses == cnf.clauses and back.names == cnf.names
    assert sat(back).status == sat(cnf).status


def test_model_import():
    assert parse_model("s SATISFIABLE\nv 1 -2 3 0\n") == {1: True, 2: False, 3: True}
    cnf = Cnf(3, [(1, 2), (-1,), (-2, 3)], {("a", 0): 2})
    model = parse_model("-1 2 3")
    assert all(any(model[abs(x)] == (x > 0) for x in c) for c in cnf.clauses)
    assert cnf.project(model) == {("a", 0): True}


def test_parse_dimacs_errors():
    with pytest.raises(ValueError):
        parse_dimacs("1 2 0\n")
    with pytest.raises(ValueError):
        parse_dimacs("p dnf 1 1\n1 0\n")
