"""Deciders for the QIF bounding problems and non-interference.

Upper-bounding problems ``U_*`` ask whether a measure is ``<= q``;
lower-bounding problems ``L_*`` ask whether it is ``> q``. A measure equal
to ``q`` therefore satisfies ``U_*`` and falsifies ``L_*``.

The enumeration oracle decides all six problems. For loop-free programs the
min-entropy problems are also decided through k-fold self-composition,
weakest preconditions and SAT: ME > q holds iff some ``k = floor(2^q) + 1``
inputs produce pairwise distinct outputs. The guessing-entropy lower bound
gets a sound but incomplete witness method.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .interp import (
    FINAL, Observation, Terminated, enumerate_program, int_to_bits, observation_to_dict, run,
)
from .lang import DEFAULT_ENUM_CAP, BoolProgError, Program
from .measure import (
    GE, GT, LE, ME, SE, Cmp, compare, guessing_qif, min_entropy_qif, partition, shannon_qif,
)
from .selfcomp import AGREEMENT, COLLISION, k_for_ge, k_for_me, self_compose
from .solver import SAT, UNKNOWN, NotLoopFree, find_counterexample, wp

U_SE, U_ME, U_GE = "U_SE", "U_ME", "U_GE"
L_SE, L_ME, L_GE = "L_SE", "L_ME", "L_GE"
NI = "NI"
PROBLEMS = (U_SE, U_ME, U_GE, L_SE, L_ME, L_GE, NI)

HOLDS, FAILS = "holds", "fails"
UNKNOWN_TOLERANCE = "unknown_within_tolerance"
UNKNOWN_RESOURCE = "unknown_resource"
# the witness method found no evidence; the exact oracle may still decide
UNKNOWN_INCOMPLETE = "unknown_incomplete"
OUTCOMES = (HOLDS, FAILS, UNKNOWN_TOLERANCE, UNKNOWN_RESOURCE, UNKNOWN_INCOMPLETE)

ORACLE, KOBS_SAT, KSAFETY_SAT, WITNESS_BOUND = "oracle", "kobs_sat", "ksafety_sat", "witness_bound"

_MEASURES = {SE: shannon_qif, ME: min_entropy_qif, GE: guessing_qif}


class EvidenceError(BoolProgError):
    """Witnesses produced by a decider failed to replay."""


def format_q(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass
class Verdict:
    problem: str
    q: Fraction
    outcome: str
    method: str
    k: int | None = None
    evidence: dict | None = None
    exact_value: str | None = None

    @property
    def holds(self) -> bool:
        return self.outcome == HOLDS

    @property
    def witnesses(self) -> list[dict]:
        return (self.evidence or {}).get("witnesses", [])

    @property
    def exit_code(self) -> int:
        return {HOLDS: 0, FAILS: 1}.get(self.outcome, 3)

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "q": format_q(self.q),
            "outcome": self.outcome,
            "method": self.method,
            "k": self.k,
            "evidence": self.evidence,
            "exact_value": self.exact_value,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> Verdict:
        return cls(
            d["problem"], Fraction(d["q"]), d["outcome"], d["method"], d.get("k"),
            d.get("evidence"), d.get("exact_value"),
        )

    def human(self) -> str:
        head = f"{self.problem} q={format_q(self.q)}: {self.outcome} [{self.method}"
        head += f", k={self.k}]" if self.k is not None else "]"
        lines = [head]
        if self.exact_value is not None:
            lines.append(f"  exact value: {self.exact_value}")
        for w in self.witnesses:
            lines.append(f"  witness input {w['input']} -> output {w['output']}")
        return "\n".join(lines)


def _problem_parts(problem: str) -> tuple[str, str]:
    side, kind = problem.split("_")
    return kind, (LE if side == "U" else GT)


def decide_exact(
    problem: str, p: Program, q, mode: str = FINAL, cap: int = DEFAULT_ENUM_CAP
) -> Verdict:
    """Decide a bounding problem by enumerating every high input."""
    if problem == NI:
        return noninterferent(p, ORACLE, mode=mode, cap=cap)
    q = Fraction(q)
    kind, relation = _problem_parts(problem)
    pp = partition(enumerate_program(p, mode, cap))
    value = _MEASURES[kind](pp)
    cmp = compare(value, q, relation)
    outcome = {Cmp.TRUE: HOLDS, Cmp.FALSE: FAILS, Cmp.WITHIN_TOLERANCE: UNKNOWN_TOLERANCE}[cmp]
    evidence = {"N": pp.N, "class_sizes": list(pp.sizes), "value": value.value}
    return Verdict(problem, q, outcome, ORACLE, None, evidence, value.exact_form())


# --------------------------------------------------------------------------
# Self-composition deciders


def _describe(o: Observation):
    """The final output string when there is one, else the full observation."""
    if isinstance(o, Terminated) and o.final is not None:
        return o.final
    return observation_to_dict(o)


def _witnesses(p: Program, inputs: list[str]) -> list[dict]:
    return [{"input": h, "output": run(p, h).final} for h in inputs]


@lru_cache(maxsize=4096)
def distinct_outputs(p: Program, k: int, decision_cap: int | None = None):
    """Search for ``k`` inputs of loop-free ``p`` with pairwise distinct
    outputs, by checking the weakest precondition of the collision
    postcondition on the k-fold product.

    Returns ``(status, inputs)`` with status ``sat`` (inputs found),
    ``unsat`` (no such inputs) or ``unknown`` (decision cap reached).
    """
    if not p.loop_free:
        raise NotLoopFree(f"program {p.name!r} contains a loop")
    if k > 2 ** p.n_out:
        return "unsat", None  # pigeonhole
    product = self_compose(p, k, COLLISION)
    phi = wp(product.program, product.post)
    res, cnf = find_counterexample(phi, decision_cap)
    if res.status != SAT:
        return res.status, None
    assignment = cnf.project(res.model)
    inputs = []
    for i in range(1, k + 1):
        bits = product.copy_bits(i, p.high_bits)
        inputs.append("".join("1" if assignment.get(b, False) else "0" for b in bits))
    return SAT, tuple(inputs)


def _check_distinct(p: Program, witnesses: list[dict]):
    outs = [w["output"] for w in witnesses]
    if len(set(outs)) != len(outs):
        raise EvidenceError(f"witnesses for {p.name!r} do not replay to distinct outputs: {witnesses}")


def _me_sat(problem: str, p: Program, q, decision_cap) -> Verdict:
    q = Fraction(q)
    if q < 0:
        raise ValueError("q must be non-negative")
    k = k_for_me(q)
    lower = problem == L_ME
    method = KOBS_SAT if lower else KSAFETY_SAT
    status, inputs = distinct_outputs(p, k, decision_cap)
    if status == UNKNOWN:
        return Verdict(problem, q, UNKNOWN_RESOURCE, method, k)
    if status == SAT:
        evidence = {"witnesses": _witnesses(p, list(inputs))}
        _check_distinct(p, evidence["witnesses"])
        return Verdict(problem, q, HOLDS if lower else FAILS, method, k, evidence)
    evidence = {"pigeonhole": True} if k > 2 ** p.n_out else None
    return Verdict(problem, q, FAILS if lower else HOLDS, method, k, evidence)


def me_lower_kobs(p: Program, q, decision_cap: int | None = None) -> Verdict:
    """Decide ME > q for a loop-free program: holds iff ``floor(2^q)+1``
    inputs with pairwise distinct outputs exist."""
    return _me_sat(L_ME, p, q, decision_cap)


def me_upper_ksafety(p: Program, q, decision_cap: int | None = None) -> Verdict:
    """Decide ME <= q for a loop-free program: holds iff the collision
    postcondition of the ``floor(2^q)+1``-fold product is valid."""
    return _me_sat(U_ME, p, q, decision_cap)


def ge_witness_bound(N: int, m: int) -> Fraction:
    """Smallest GE over all partitions of N inputs into m classes."""
    return Fraction((m - 1) * (2 * N - m), 2 * N)


def ge_lower_witness(
    p: Program, q, decision_cap: int | None = None, cap: int = DEFAULT_ENUM_CAP
) -> Verdict:
    """Sound, incomplete check of GE > q: exhibit m inputs with distinct
    outputs such that every partition with m classes already has GE > q.
    Never answers ``fails``."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("q must be non-negative")
    N = 2 ** p.n_high
    k_max = min(k_for_ge(q), N)
    table = None
    if not p.loop_free:
        table = enumerate_program(p, FINAL, cap)
    for m in range(2, k_max + 1):
        if table is None:
            status, inputs = distinct_outputs(p, m, decision_cap)
            if status == UNKNOWN:
                return Verdict(L_GE, q, UNKNOWN_RESOURCE, WITNESS_BOUND, m)
            if status != SAT:
                break
            witnesses = _witnesses(p, list(inputs))
        else:
            firsts: dict = {}
            for bits, o in table.items():
                firsts.setdefault(o, bits)
                if len(firsts) == m:
                    break
            if len(firsts) < m:
                break
            witnesses = [{"input": h, "output": _describe(o)} for o, h in firsts.items()]
        if ge_witness_bound(N, m) > q:
            if table is None:
                _check_distinct(p, witnesses)
            return Verdict(
                L_GE, q, HOLDS, WITNESS_BOUND, m,
                {"witnesses": witnesses, "bound": str(ge_witness_bound(N, m))},
            )
    return Verdict(L_GE, q, UNKNOWN_INCOMPLETE, WITNESS_BOUND, k_max)


def noninterferent(
    p: Program, method: str = ORACLE, mode: str = FINAL, cap: int = DEFAULT_ENUM_CAP,
    decision_cap: int | None = None,
) -> Verdict:
    """Non-interference: every high input yields the same observation.

    ``oracle`` enumerates; ``selfcomp`` checks validity of the weakest
    precondition of output agreement on the 2-fold product (loop-free only).
    """
    if method == ORACLE:
        t = enumerate_program(p, mode, cap)
        first = t.observations[0]
        for bits, o in t.items():
            if o != first:
                ev = {"witnesses": [
                    {"input": int_to_bits(0, p.n_high), "output": _describe(first)},
                    {"input": bits, "output": _describe(o)},
                ]}
                return Verdict(NI, Fraction(0), FAILS, ORACLE, 2, ev)
        return Verdict(NI, Fraction(0), HOLDS, ORACLE, 2)
    if method not in ("selfcomp", KSAFETY_SAT):
        raise ValueError(f"unknown method {method!r}")
    product = self_compose(p, 2, AGREEMENT)
    phi = wp(product.program, product.post)
    res, cnf = find_counterexample(phi, decision_cap)
    if res.status == UNKNOWN:
        return Verdict(NI, Fraction(0), UNKNOWN_RESOURCE, KSAFETY_SAT, 2)
    if res.status == SAT:
        assignment = cnf.project(res.model)
        inputs = [
            "".join("1" if assignment.get(b, False) else "0" for b in product.copy_bits(i, p.high_bits))
            for i in (1, 2)
        ]
        witnesses = _witnesses(p, inputs)
        _check_distinct(p, witnesses)
        return Verdict(NI, Fraction(0), FAILS, KSAFETY_SAT, 2, {"witnesses": witnesses})
    return Verdict(NI, Fraction(0), HOLDS, KSAFETY_SAT, 2)


def decide_sat(problem: str, p: Program, q, decision_cap: int | None = None) -> Verdict:
    """Route a bounding problem to its self-composition decider."""
    if problem == L_ME:
        return me_lower_kobs(p, q, decision_cap)
    if problem == U_ME:
        return me_upper_ksafety(p, q, decision_cap)
    if problem == L_GE:
        return ge_lower_witness(p, q, decision_cap)
    if problem == NI:
        return noninterferent(p, "selfcomp", decision_cap=decision_cap)
    raise ValueError(f"no SAT-backed decider for {problem}")

