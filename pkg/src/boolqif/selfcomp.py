"""k-fold self-composition and the evidence sizes for the ME and GE bounds."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .lang import (
    And, Assign, Decl, Eq, FalseF, Formula, If, Not, Observe, Program, Seq, Skip, TrueF,
    Var, While, desugar, pretty, seq,
)

DISTINCTNESS, COLLISION, AGREEMENT = "distinctness", "collision", "agreement"
POLARITIES = (DISTINCTNESS, COLLISION, AGREEMENT)


@dataclass(frozen=True)
class ComposedProgram:
    base: str
    k: int
    program: Program
    post: Formula
    polarity: str
    # renamed variable of copy i (1-based) is rename[i - 1][name]
    rename: tuple[dict, ...]

    def copy_bits(self, i: int, bits) -> list[tuple[str, int]]:
        """Renamed (name, bit) pairs of copy ``i`` for the base-program ``bits``."""
        names = self.rename[i - 1]
        return [(names[n], b) for n, b in bits]

    def to_source(self) -> str:
        return pretty(
            Program(self.program.name, self.program.decls, self.program.body, self.post)
        )


def _rename_formula(f: Formula, names: dict) -> Formula:
    if isinstance(f, Var):
        return Var(names[f.name], f.bit)
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Not):
        return Not(_rename_formula(f.arg, names))
    return type(f)(_rename_formula(f.left, names), _rename_formula(f.right, names))


def rename_statement(s, names: dict):
    if isinstance(s, (Skip, Observe)):
        return s
    if isinstance(s, Assign):
        return Assign(names[s.target], s.bit, _rename_formula(s.expr, names), s.pos)
    if isinstance(s, Seq):
        return Seq(rename_statement(s.first, names), rename_statement(s.second, names), s.pos)
    if isinstance(s, If):
        return If(
            _rename_formula(s.cond, names),
            rename_statement(s.then, names),
            rename_statement(s.orelse, names),
            s.pos,
        )
    if isinstance(s, While):
        return While(_rename_formula(s.cond, names), rename_statement(s.body, names), s.pos)
    raise TypeError(s)


def _renamings(p: Program, k: int) -> list[dict]:
    names = [d.name for d in p.decls]
    sep = "_"
    while True:
        maps = [{n: f"{n}{sep}{i}" for n in names} for i in range(1, k + 1)]
        fresh = {v for m in maps for v in m.values()}
        if len(fresh) == k * len(names) and not fresh & set(names):
            return maps
        sep += "_"


def outputs_equal(bits_a, bits_b) -> Formula:
    """Bitwise equality of two output tuples (sugared; desugar before use)."""
    f: Formula = TrueF()
    for a, b in zip(bits_a, bits_b):
        f = And(f, Eq(Var(*a), Var(*b)))
    return f


def self_compose(p: Program, k: int, polarity: str) -> ComposedProgram:
    """Sequentially compose ``k`` renamed copies of ``p`` and build the
    postcondition of the requested polarity over their outputs:

    * distinctness: outputs pairwise different
    * collision: some two outputs equal
    * agreement: all outputs equal to the first
    """
    if k < 2:
        raise ValueError("self-composition needs k >= 2")
    if polarity not in POLARITIES:
        raise ValueError(f"polarity must be one of {POLARITIES}")
    maps = _renamings(p, k)
    decls = tuple(Decl(m[d.name], d.kind, d.width) for m in maps for d in p.decls)
    body = seq(*(rename_statement(p.body, m) for m in maps))
    outs = [[(m[n], b) for n, b in p.out_bits] for m in maps]
    if polarity == AGREEMENT:
        post: Formula = TrueF()
        for j in range(1, k):
            post = And(post, outputs_equal(outs[0], outs[j]))
    else:
        post = TrueF()
        for i in range(k):
            for j in range(i + 1, k):
                post = And(post, Not(outputs_equal(outs[i], outs[j])))
        if polarity == COLLISION:
            post = Not(post)
    program = Program(f"{p.name}_x{k}", decls, body)
    return ComposedProgram(p.name, k, program, desugar(post), polarity, tuple(maps))


def _floor_root(x: int, r: int) -> int:
    """Largest integer t with t**r <= x."""
    lo, hi = 0, 1
    while hi ** r <= x:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid ** r <= x:
            lo = mid
        else:
            hi = mid
    return lo


def k_for_me(q) -> int:
    """Evidence size floor(2^q) + 1 for the ME bounds, computed exactly."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("q must be non-negative")
    return _floor_root(2 ** q.numerator, q.denominator) + 1


def k_for_ge(q) -> int:
    """Evidence size floor((floor(q)+1)^2 / (floor(q)+1-q)) + 1 for the GE bounds."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("q must be non-negative")
    f = floor(q) + 1
    return floor(Fraction(f * f) / (f - q)) + 1

