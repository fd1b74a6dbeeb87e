"""DPLL search with two-watched-literal unit propagation, conflict analysis
and non-chronological backjumping."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from ..lang import BoolProgError
from .cnf import Cnf

SAT, UNSAT, UNKNOWN = "sat", "unsat", "unknown"


class SolverBudgetExceeded(BoolProgError):
    pass


@dataclass
class SatResult:
    status: str
    model: dict[int, bool] | None = None
    decisions: int = 0
    conflicts: int = 0

    @property
    def sat(self) -> bool:
        return self.status == SAT

    @property
    def unsat(self) -> bool:
        return self.status == UNSAT


class Solver:
    """One search over a fixed clause set. Not thread-safe; create one per use."""

    def __init__(self, num_vars: int, clauses, decision_cap: int | None = None):
        self.n = num_vars
        self.original = [tuple(c) for c in clauses]
        self.decision_cap = decision_cap
        self.value = [0] * (num_vars + 1)  # +1 true, -1 false, 0 unassigned
        self.level = [0] * (num_vars + 1)
        self.reason: list[int | None] = [None] * (num_vars + 1)
        self.phase = [-1] * (num_vars + 1)
        self.activity = [0.0] * (num_vars + 1)
        self.var_inc = 1.0
        self.heap = [(0.0, v) for v in range(1, num_vars + 1)]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.decisions = 0
        self.conflicts = 0
        self.trivially_unsat = False

    def _val(self, lit: int) -> int:
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def _assign(self, lit: int, reason: int | None):
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _add_clause(self, lits: list[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.watches.setdefault(lits[0], []).append(ci)
        self.watches.setdefault(lits[1], []).append(ci)
        return ci

    def _load(self) -> bool:
        for c in self.original:
            lits = list(dict.fromkeys(c))
            if any(-x in lits for x in lits):
                continue  # tautology
            if not lits:
                return False
            if len(lits) == 1:
                val = self._val(lits[0])
                if val < 0:
                    return False
                if val == 0:
                    self._assign(lits[0], None)
            else:
                self._add_clause(lits)
        return True

    def _propagate(self) -> int | None:
        """Unit propagation; returns a conflicting clause index or None."""
        value = self.value
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -lit
            ws = self.watches.get(false_lit, [])
            kept = []
            i = 0
            while i < len(ws):
                ci = ws[i]
                i += 1
                c = self.clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = value[abs(first)]
                if (fv if first > 0 else -fv) > 0:
                    kept.append(ci)
                    continue
                for k in range(2, len(c)):
                    x = c[k]
                    xv = value[abs(x)]
                    if (xv if x > 0 else -xv) >= 0:
                        c[1], c[k] = x, c[1]
                        self.watches.setdefault(x, []).append(ci)
                        break
                else:
                    kept.append(ci)
                    if (fv if first > 0 else -fv) < 0:
                        kept.extend(ws[i:])
                        self.watches[false_lit] = kept
                        return ci
                    self._assign(first, ci)
            self.watches[false_lit] = kept
        return None

    def _bump(self, v: int):
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.n + 1) if not self.value[u]]
            heapq.heapify(self.heap)
        elif not self.value[v]:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        """First-UIP conflict clause and the level to jump back to."""
        current = len(self.trail_lim)
        seen = set()
        learnt = [0]
        counter = 0
        lit = 0
        idx = len(self.trail) - 1
        clause = self.clauses[confl]
        while True:
            for q in (clause if lit == 0 else clause[1:]):
                v = abs(q)
                if v in seen or self.level[v] == 0:
                    continue
                seen.add(v)
                self._bump(v)
                if self.level[v] == current:
                    counter += 1
                else:
                    learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            lit = self.trail[idx]
            idx -= 1
            seen.discard(abs(lit))
            counter -= 1
            if counter == 0:
                break
            clause = self.clauses[self.reason[abs(lit)]]
        learnt[0] = -lit
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda j: self.level[abs(learnt[j])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _backjump(self, level: int):
        if len(self.trail_lim) <= level:
            return
        start = self.trail_lim[level]
        for lit in self.trail[start:]:
            v = abs(lit)
            self.phase[v] = 1 if lit > 0 else -1
            self.value[v] = 0
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[start:]
        del self.trail_lim[level:]
        self.qhead = len(self.trail)

    def _pick(self) -> int:
        while self.heap:
            _, v = heapq.heappop(self.heap)
            if not self.value[v]:
                return v
        return 0

    def solve(self) -> SatResult:
        if not self._load():
            return SatResult(UNSAT)
        restart_at, restart_inc = 100, 1.5
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    return SatResult(UNSAT, None, self.decisions, self.conflicts)
                learnt, back = self._analyze(confl)
                self._backjump(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self._assign(learnt[0], self._add_clause(learnt))
                self.var_inc /= 0.95
                continue
            if since_restart >= restart_at:
                since_restart = 0
                restart_at = int(restart_at * restart_inc)
                self._backjump(0)
                continue
            v = self._pick()
            if v == 0:
                return self._model()
            if self.decision_cap is not None and self.decisions >= self.decision_cap:
                return SatResult(UNKNOWN, None, self.decisions, self.conflicts)
            self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._assign(v * self.phase[v], None)

    def _model(self) -> SatResult:
        model = {v: self.value[v] > 0 for v in range(1, self.n + 1)}
        for c in self.original:
            if not any(model[abs(x)] == (x > 0) for x in c):
                raise AssertionError(f"internal error: model violates clause {c}")
        return SatResult(SAT, model, self.decisions, self.conflicts)


def sat(c: Cnf, decision_cap: int | None = None) -> SatResult:
    """Decide satisfiability of ``c``. A SAT model is total over
    ``1..num_vars`` and has been checked against every clause."""
    return Solver(c.num_vars, c.clauses, decision_cap).solve()
