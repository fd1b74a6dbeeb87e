import itertools
from fractions import Fraction

import pytest

from boolqif.interp import enumerate_program, int_to_bits
from boolqif.lang import eval_formula, is_core, parse, validate
from boolqif.selfcomp import k_for_ge, k_for_me, self_compose

from conftest import random_suite
from oracles import distinct_output_count, floor_pow2


def _satisfying_tuples(cp, p):
    """Input tuples of the product whose final store satisfies the post."""
    prog = cp.program
    n = p.n_high
    table = enumerate_program(prog)
    hits = []
    for x, o in enumerate(table.observations):
        env = dict(zip(prog.out_bits, (c == "1" for c in o.final)))
        if eval_formula(cp.post, env):
            bits = int_to_bits(x, n * cp.k)
            hits.append(tuple(int(bits[i * n:(i + 1) * n] or "0", 2) for i in range(cp.k)))
    return hits


def test_agreement_m2_is_diagonal(m2):
    cp = self_compose(m2, 2, "agreement")
    assert sorted(_satisfying_tuples(cp, m2)) == [(x, x) for x in range(4)]


def test_distinctness_m1_k3_unsat(m1):
    assert _satisfying_tuples(self_compose(m1, 3, "distinctness"), m1) == []


def test_distinctness_m2_k3_sat(m2):
    hits = _satisfying_tuples(self_compose(m2, 3, "distinctness"), m2)
    assert len(hits) == 4 * 3 * 2


def test_collision_is_negated_distinctness(m1):
    d = set(_satisfying_tuples(self_compose(m1, 2, "distinctness"), m1))
    c = set(_satisfying_tuples(self_compose(m1, 2, "collision"), m1))
    assert d.isdisjoint(c) and len(d | c) == 16


def test_compose_structure(m1):
    cp = self_compose(m1, 3, "collision")
    assert cp.k == 3 and cp.base == "m1"
    assert [d.name for d in cp.program.decls] == ["h_1", "o_1", "h_2", "o_2", "h_3", "o_3"]
    assert cp.copy_bits(2, m1.out_bits) == [("o_2", 0)]
    assert is_core(cp.post)
    assert validate(cp.program).ok


def test_renaming_avoids_clashes():
    p = parse("high h:bool[1]; out h_1:bool[1]; h_1[0] := h[0]")
    cp = self_compose(p, 2, "agreement")
    names = [d.name for d in cp.program.decls]
    assert len(set(names)) == 4 and not set(names) & {"h", "h_1"}
    assert _satisfying_tuples(cp, p) == [(0, 0), (1, 1)]


def test_to_source_has_assert_and_reparses(m1):
    cp = self_compose(m1, 2, "agreement")
    src = cp.to_source()
    assert "assert(" in src
    back = parse(src)
    assert back.body == cp.program.body and back.assertion == cp.post


def test_k_below_two_rejected(m1):
    with pytest.raises(ValueError):
        self_compose(m1, 1, "agreement")
    with pytest.raises(ValueError):
        self_compose(m1, 2, "sideways")


def test_k_for_me_examples():
    assert k_for_me(1) == 3
    assert k_for_me(0) == 2
    assert k_for_me(Fraction(3, 2)) == 3


def test_k_for_ge_examples():
    assert k_for_ge(1) == 5
    assert k_for_ge(0) == 2
    assert k_for_ge(Fraction(1, 2)) == 3


def test_k_for_me_vs_root_oracle():
    for r in range(1, 9):
        for p in range(0, 12 * r + 1):
            assert k_for_me(Fraction(p, r)) == floor_pow2(p, r) + 1


def test_k_formulas_monotone():
    grid = [Fraction(x) for x in ("0", "1/2", "1", "3/2", "2", "3")]
    for f in (k_for_me, k_for_ge):
        ks = [f(q) for q in grid]
        assert ks == sorted(ks)


def test_negative_q_rejected():
    with pytest.raises(ValueError):
        k_for_me(-1)
    with pytest.raises(ValueError):
        k_for_ge(Fraction(-1, 2))


def test_product_soundness():
    progs = random_suite(25, seed=31, max_high=3, max_out=2)
    for p in progs:
        base = enumerate_program(p)
        n = p.n_high
        for k in (2, 3):
            if k * n > 6:
                continue
            cp = self_compose(p, k, "distinctness")
            prod = enumerate_program(cp.program)
            for xs in itertools.product(range(2 ** n), repeat=k):
                got = prod[("".join(int_to_bits(x, n) for x in xs))].final
                want = "".join(base.observations[x].final for x in xs)
                assert got == want, (p.name, xs)


def test_distinctness_satisfiable_iff_k_outputs():
    for p in random_suite(30, seed=41, max_high=3, max_out=2):
        m = distinct_output_count(p)
        for k in (2, 3):
            if k * p.n_high > 9:
                continue
            sat = bool(_satisfying_tuples(self_compose(p, k, "distinctness"), p))
            assert sat == (m >= k), (p.name, k, m)
