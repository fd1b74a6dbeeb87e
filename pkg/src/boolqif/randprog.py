"""Random boolean programs, formulas and CNFs for differential testing."""

from __future__ import annotations

import random

from .lang import (
    And, Assign, Decl, Eq, FalseF, Formula, HIGH, If, LOCAL, Not, Observe, Or, OUT,
    Program, Skip, TrueF, Var, While, Xor, seq,
)


def random_formula(rng: random.Random, bits, depth: int = 3, sugar: bool = True) -> Formula:
    if depth <= 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.06:
            return TrueF()
        if r < 0.12 and sugar:
            return FalseF()
        return Var(*rng.choice(bits))
    if rng.random() < 0.2:
        return Not(random_formula(rng, bits, depth - 1, sugar))
    ops = [And, Or, Xor, Eq] if sugar else [And]
    op = rng.choice(ops)
    return op(random_formula(rng, bits, depth - 1, sugar), random_formula(rng, bits, depth - 1, sugar))


def random_program(
    rng: random.Random,
    max_high: int = 6,
    max_out: int = 3,
    max_local: int = 2,
    n_stmts: int = 8,
    max_depth: int = 2,
    loops: bool = False,
    observes: bool = False,
    name: str = "rand",
) -> Program:
    """A random validated program. With ``loops=False`` it is loop-free."""
    decls = []
    for kind, lo, hi, prefix in ((HIGH, 1, max_high, "h"), (OUT, 1, max_out, "o"), (LOCAL, 0, max_local, "t")):
        total = rng.randint(lo, hi)
        i = 0
        while total > 0:
            w = rng.randint(1, total)
            decls.append(Decl(f"{prefix}{i}", kind, w))
            total -= w
            i += 1
    readable = [(d.name, b) for d in decls for b in range(d.width)]
    writable = [(d.name, b) for d in decls if d.kind != HIGH for b in range(d.width)]

    def block(n: int, depth: int):
        return seq(*(stmt(depth) for _ in range(max(1, n))))

    def stmt(depth: int):
        r = rng.random()
        if depth < max_depth and r < 0.25:
            return If(random_formula(rng, readable, 2), block(rng.randint(1, 3), depth + 1),
                      block(rng.randint(0, 2), depth + 1) if rng.random() < 0.7 else Skip())
        if loops and depth < max_depth and r < 0.35:
            return While(random_formula(rng, readable, 2), block(rng.randint(1, 3), depth + 1))
        if observes and r < 0.45:
            return Observe()
        if r < 0.05:
            return Skip()
        return Assign(*rng.choice(writable), random_formula(rng, readable, 3))

    return Program(name, tuple(decls), block(n_stmts, 0))


def random_cnf(rng: random.Random, n_vars: int, n_clauses: int, width: int = 3) -> list[tuple[int, ...]]:
    """Uniform random ``width``-CNF over distinct variables per clause."""
    clauses = []
    for _ in range(n_clauses):
        vs = rng.sample(range(1, n_vars + 1), min(width, n_vars))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return clauses
