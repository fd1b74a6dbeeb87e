"""Weakest preconditions of loop-free programs via passification.

A loop-free program is first rewritten into single-assignment form: every
assignment and every branch merge defines a fresh bit. The weakest
precondition of a postcondition is then the postcondition with each output
bit replaced by its defining formula. Definitions are inlined as shared,
hash-consed DAG nodes, so the result has size linear in the passive program
even though its tree expansion can be exponential.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..lang import (
    And, Assign, BoolProgError, Eq, FalseF, Formula, If, Not, Observe, Or, Program, Seq,
    Skip, TrueF, Var, While, Xor, iter_nodes,
)


class NotLoopFree(BoolProgError):
    pass


class FormulaBuilder:
    """Hash-consing constructor for core formulas with light simplification."""

    def __init__(self):
        self._table: dict[Formula, Formula] = {}
        self.true = self._intern(TrueF())
        self.false = self._intern(Not(self.true))

    def _intern(self, node: Formula) -> Formula:
        return self._table.setdefault(node, node)

    def var(self, name: str, bit: int) -> Formula:
        return self._intern(Var(name, bit))

    def not_(self, a: Formula) -> Formula:
        if isinstance(a, Not):
            return a.arg
        return self._intern(Not(a))

    def and_(self, a: Formula, b: Formula) -> Formula:
        if a is self.true:
            return b
        if b is self.true or a is b:
            return a
        if a is self.false or b is self.false:
            return self.false
        if (isinstance(a, Not) and a.arg is b) or (isinstance(b, Not) and b.arg is a):
            return self.false
        return self._intern(And(a, b))

    def or_(self, a: Formula, b: Formula) -> Formula:
        return self.not_(self.and_(self.not_(a), self.not_(b)))

    def iff(self, a: Formula, b: Formula) -> Formula:
        return self.and_(self.not_(self.and_(a, self.not_(b))), self.not_(self.and_(self.not_(a), b)))

    def ite(self, c: Formula, a: Formula, b: Formula) -> Formula:
        if a is b or c is self.true:
            return a
        if c is self.false:
            return b
        if a is self.true and b is self.false:
            return c
        if a is self.false and b is self.true:
            return self.not_(c)
        return self.or_(self.and_(c, a), self.and_(self.not_(c), b))

    def translate(self, f: Formula, env) -> Formula:
        """Rebuild ``f`` (core or sugared) with each ``Var`` mapped through
        ``env``; bits missing from ``env`` stay as variables."""
        memo: dict[int, Formula] = {}
        stack = [(f, False)]
        while stack:
            g, expanded = stack.pop()
            if id(g) in memo:
                continue
            kids = g.children()
            if kids and not expanded:
                stack.append((g, True))
                stack.extend((c, False) for c in kids if id(c) not in memo)
                continue
            if isinstance(g, TrueF):
                out = self.true
            elif isinstance(g, FalseF):
                out = self.false
            elif isinstance(g, Var):
                out = env.get((g.name, g.bit))
                if out is None:
                    out = self.var(g.name, g.bit)
            elif isinstance(g, Not):
                out = self.not_(memo[id(g.arg)])
            else:
                a, b = memo[id(g.left)], memo[id(g.right)]
                if isinstance(g, And):
                    out = self.and_(a, b)
                elif isinstance(g, Or):
                    out = self.or_(a, b)
                elif isinstance(g, Eq):
                    out = self.iff(a, b)
                elif isinstance(g, Xor):
                    out = self.not_(self.iff(a, b))
                else:
                    raise TypeError(g)
            memo[id(g)] = out
        return memo[id(f)]


def dag_size(f: Formula) -> int:
    """Number of distinct nodes; shared subterms count once."""
    return sum(1 for _ in iter_nodes(f))


@dataclass
class PassiveProgram:
    """Single-assignment form of a loop-free program.

    ``definitions`` lists ``(fresh_bit, formula)`` pairs in dependency
    order; each formula mentions only high-input bits and earlier fresh
    bits. ``bindings`` maps every program bit to its final value.
    """

    definitions: list[tuple[Var, Formula]]
    bindings: dict[tuple[str, int], Formula]
    builder: FormulaBuilder

    def __len__(self):
        return len(self.definitions)


def passify(p: Program, builder: FormulaBuilder | None = None) -> PassiveProgram:
    b = builder or FormulaBuilder()
    highs = set(p.high_bits)
    cur = {bit: (b.var(*bit) if bit in highs else b.false) for bit in p.all_bits}
    defs: list[tuple[Var, Formula]] = []

    def define(bit, value: Formula) -> Formula:
        if isinstance(value, (Var, TrueF)) or value is b.false:
            return value  # copy propagation
        fresh = b.var(f"{bit[0]}#{len(defs)}", bit[1])
        defs.append((fresh, value))
        return fresh

    def go(s, store: dict) -> dict:
        if isinstance(s, (Skip, Observe)):
            return store
        if isinstance(s, Assign):
            store = dict(store)
            bit = (s.target, s.bit)
            store[bit] = define(bit, b.translate(s.expr, store))
            return store
        if isinstance(s, Seq):
            return go(s.second, go(s.first, store))
        if isinstance(s, If):
            guard = define(("guard", 0), b.translate(s.cond, store))
            left, right = go(s.then, store), go(s.orelse, store)
            merged = dict(left)
            for bit, v in right.items():
                if left[bit] is not v:
                    merged[bit] = define(bit, b.ite(guard, left[bit], v))
            return merged
        if isinstance(s, While):
            raise NotLoopFree(f"program {p.name!r} contains a loop")
        raise TypeError(s)

    final = go(p.body, cur)
    return PassiveProgram(defs, final, b)


def wp(p: Program, post: Formula, builder: FormulaBuilder | None = None) -> Formula:
    """Weakest precondition of ``post`` (over the program's bits) as a
    hash-consed core formula over the high-input bits."""
    if not p.loop_free:
        raise NotLoopFree(f"program {p.name!r} contains a loop")
    passive = passify(p, builder)
    b = passive.builder
    inlined: dict[tuple[str, int], Formula] = {}
    for fresh, value in passive.definitions:
        inlined[(fresh.name, fresh.bit)] = b.translate(value, inlined)
    final = {bit: b.translate(v, inlined) for bit, v in passive.bindings.items()}
    return b.translate(post, final)
