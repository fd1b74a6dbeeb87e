"""Verification-condition generation and satisfiability checking."""

from ..lang import Formula, Not
from .cnf import Cnf, export_dimacs, parse_dimacs, parse_model, tseitin
from .sat import SAT, UNKNOWN, UNSAT, SatResult, Solver, SolverBudgetExceeded, sat
from .wp import FormulaBuilder, NotLoopFree, PassiveProgram, dag_size, passify, wp


def find_counterexample(f: Formula, decision_cap: int | None = None) -> tuple[SatResult, Cnf]:
    """Search for an assignment falsifying ``f``."""
    cnf = tseitin(Not(f))
    return sat(cnf, decision_cap), cnf


def valid(f: Formula, decision_cap: int | None = None) -> bool:
    """True iff ``f`` holds under every assignment."""
    res, _ = find_counterexample(f, decision_cap)
    if res.status == UNKNOWN:
        raise SolverBudgetExceeded(f"decision cap of {decision_cap} reached")
    return res.status == UNSAT


__all__ = [
    "Cnf", "FormulaBuilder", "NotLoopFree", "PassiveProgram", "SAT", "SatResult", "Solver",
    "SolverBudgetExceeded", "UNKNOWN", "UNSAT", "dag_size", "export_dimacs",
    "find_counterexample", "parse_dimacs", "parse_model", "passify", "sat", "tseitin",
    "valid", "wp",
]
