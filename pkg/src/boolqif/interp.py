"""Concrete semantics: single runs with exact divergence detection, full
enumeration of the high-input domain, and termination-insensitive trace
equivalence.

Inputs and outputs are bitstrings: high (resp. out) variables in declaration
order, most significant bit first. For ``high h:bool[2]`` the input ``"01"``
sets ``h[1] = 0`` and ``h[0] = 1``.

Two observation modes exist. In ``final`` mode an observation is the output
tuple at termination. In ``trace`` mode it is the sequence of output tuples
emitted by ``observe`` statements; the final store is not observable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterator

from .lang import (
    DEFAULT_ENUM_CAP, And, Assign, BoolProgError, Eq, FalseF, Formula, If, Not,
    Observe, Or, Program, Seq, Skip, TrueF, Var, While, Xor, eval_formula,
)

FINAL, TRACE = "final", "trace"
MODES = (FINAL, TRACE)


class StepBudgetExceeded(BoolProgError):
    """Execution ran longer than the step budget without a repeated configuration."""


class EnumerationCapExceeded(BoolProgError):
    pass


class NotExecutable(BoolProgError):
    pass


@dataclass(frozen=True)
class Terminated:
    emissions: tuple[str, ...] = ()
    final: str | None = None

    kind = "terminated"


@dataclass(frozen=True)
class Diverged:
    prefix: tuple[str, ...] = ()
    lasso: tuple[str, ...] = ()

    kind = "diverged"


Observation = Terminated | Diverged


def observation_to_dict(o: Observation) -> dict:
    if isinstance(o, Terminated):
        return {"kind": o.kind, "emissions": list(o.emissions), "lasso": None, "final": o.final}
    return {"kind": o.kind, "emissions": list(o.prefix), "lasso": list(o.lasso), "final": None}


def observation_from_dict(d: dict) -> Observation:
    if d["kind"] == Terminated.kind:
        return Terminated(tuple(d["emissions"]), d["final"])
    if d["kind"] == Diverged.kind:
        return Diverged(tuple(d["emissions"]), tuple(d["lasso"] or ()))
    raise ValueError(f"unknown observation kind {d['kind']!r}")


def canonical_lasso(prefix, cycle) -> Diverged:
    """Normalise the eventually periodic stream ``prefix . cycle^omega`` to
    the shortest prefix and the minimal repeating block."""
    prefix, cycle = list(prefix), list(cycle)
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle == cycle[:d] * (n // d):
            cycle = cycle[:d]
            break
    while prefix and cycle and prefix[-1] == cycle[-1]:
        prefix.pop()
        cycle = cycle[-1:] + cycle[:-1]
    return Diverged(tuple(prefix), tuple(cycle))


def bits_to_int(bits: str) -> int:
    return int(bits, 2) if bits else 0


def int_to_bits(x: int, n: int) -> str:
    return format(x, f"0{n}b") if n else ""


def default_budget(p: Program) -> int:
    return 2 ** (sum(d.width for d in p.decls) + 8)


# --------------------------------------------------------------------------
# Compiled runner


def _py_formula(f: Formula, slot: dict) -> str:
    if isinstance(f, TrueF):
        return "True"
    if isinstance(f, FalseF):
        return "False"
    if isinstance(f, Var):
        return f"b{slot[(f.name, f.bit)]}"
    if isinstance(f, Not):
        return f"(not {_py_formula(f.arg, slot)})"
    a, b = _py_formula(f.left, slot), _py_formula(f.right, slot)
    if isinstance(f, And):
        return f"({a} and {b})"
    if isinstance(f, Or):
        return f"({a} or {b})"
    if isinstance(f, Xor):
        return f"({a} != {b})"
    if isinstance(f, Eq):
        return f"({a} == {b})"
    raise TypeError(f)


class _Codegen:
    def __init__(self, p: Program, mode: str):
        self.p = p
        self.mode = mode
        self.slot = {bit: i for i, bit in enumerate(p.all_bits)}
        self.lines: list[str] = []
        self.loops = 0
        self.out_tuple = "_bits(" + "".join(f"b{self.slot[b]}, " for b in p.out_bits) + ")"
        self.store_tuple = "(" + "".join(f"b{i}, " for i in range(len(self.slot))) + ")"

    def emit(self, depth: int, line: str):
        self.lines.append("    " * depth + line)

    def stmt(self, s, depth: int):
        if isinstance(s, Skip):
            self.emit(depth, "pass")
        elif isinstance(s, Observe):
            self.emit(depth, f"em.append({self.out_tuple})" if self.mode == TRACE else "pass")
        elif isinstance(s, Assign):
            self.emit(depth, f"b{self.slot[(s.target, s.bit)]} = {_py_formula(s.expr, self.slot)}")
        elif isinstance(s, Seq):
            self.stmt(s.first, depth)
            self.stmt(s.second, depth)
        elif isinstance(s, If):
            self.emit(depth, f"if {_py_formula(s.cond, self.slot)}:")
            self.stmt(s.then, depth + 1)
            self.emit(depth, "else:")
            self.stmt(s.orelse, depth + 1)
        elif isinstance(s, While):
            w = self.loops
            self.loops += 1
            # one visited-map per loop activation: an infinite run has an
            # innermost non-exiting activation, whose head configurations repeat
            self.emit(depth, f"seen{w} = {{}}")
            self.emit(depth, "while True:")
            self.emit(depth + 1, f"key = {self.store_tuple}")
            self.emit(depth + 1, f"if key in seen{w}:")
            self.emit(depth + 2, f"return _diverged(em, seen{w}[key])")
            self.emit(depth + 1, f"seen{w}[key] = len(em)")
            self.emit(depth + 1, "steps += 1")
            self.emit(depth + 1, "if steps > budget:")
            self.emit(depth + 2, "raise _Budget(f'step budget of {budget} exceeded')")
            self.emit(depth + 1, f"if not {_py_formula(s.cond, self.slot)}:")
            self.emit(depth + 2, "break")
            self.stmt(s.body, depth + 1)
        else:
            raise TypeError(s)

    def source(self) -> str:
        p = self.p
        n_h = p.n_high
        self.emit(0, "def _run(x, budget):")
        for c, bit in enumerate(p.high_bits):
            self.emit(1, f"b{self.slot[bit]} = bool(x >> {n_h - 1 - c} & 1)")
        highs = set(p.high_bits)
        for bit in self.slot:
            if bit not in highs:
                self.emit(1, f"b{self.slot[bit]} = False")
        self.emit(1, "em = []")
        self.emit(1, "steps = 0")
        self.stmt(p.body, 1)
        final = "None" if self.mode == TRACE else self.out_tuple
        self.emit(1, f"return _Terminated(tuple(em), {final})")
        return "\n".join(self.lines) + "\n"


def _bits(*bs) -> str:
    return "".join("1" if b else "0" for b in bs)


def _make_diverged(mode):
    def _diverged(em, start):
        if mode == FINAL:
            return Diverged()
        return canonical_lasso(em[:start], em[start:])
    return _diverged


def compile_program(p: Program, mode: str = FINAL) -> Callable[[int, int], Observation]:
    """Compile ``p`` to a Python function ``run(input_index, budget)``."""
    if p.assertion is not None:
        raise NotExecutable("programs carrying an assert(...) postcondition are not executable")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    src = _Codegen(p, mode).source()
    env = {
        "_bits": _bits, "_Terminated": Terminated, "_Budget": StepBudgetExceeded,
        "_diverged": _make_diverged(mode),
    }
    try:
        exec(compile(src, f"<boolprog {p.name}>", "exec"), env)
    except (SyntaxError, RecursionError, MemoryError):
        # pathological nesting depth: fall back to the small-step interpreter
        return lambda x, budget: run_small_step(p, int_to_bits(x, p.n_high), mode, budget)
    return env["_run"]


def run(p: Program, h: str, mode: str = FINAL, budget: int | None = None) -> Observation:
    """Run ``p`` on the high-input bitstring ``h``."""
    if len(h) != p.n_high or set(h) - {"0", "1"}:
        raise ValueError(f"input must be a bitstring of length {p.n_high}, got {h!r}")
    budget = default_budget(p) if budget is None else budget
    return compile_program(p, mode)(bits_to_int(h), budget)


# --------------------------------------------------------------------------
# Small-step reference interpreter (independent of the code generator)


def run_small_step(p: Program, h: str, mode: str = FINAL, budget: int | None = None) -> Observation:
    """Explicit-stack interpreter; detects divergence by repetition of the
    global configuration (continuation, store) at loop heads."""
    if p.assertion is not None:
        raise NotExecutable("programs carrying an assert(...) postcondition are not executable")
    budget = default_budget(p) if budget is None else budget
    store = {bit: False for bit in p.all_bits}
    for c, bit in enumerate(p.high_bits):
        store[bit] = h[c] == "1"

    def out_tuple():
        return "".join("1" if store[b] else "0" for b in p.out_bits)

    stack = [p.body]
    em: list[str] = []
    seen: dict = {}
    steps = 0
    while stack:
        s = stack.pop()
        if isinstance(s, Seq):
            stack += [s.second, s.first]
        elif isinstance(s, Assign):
            store[(s.target, s.bit)] = eval_formula(s.expr, store)
        elif isinstance(s, Observe):
            if mode == TRACE:
                em.append(out_tuple())
        elif isinstance(s, If):
            stack.append(s.then if eval_formula(s.cond, store) else s.orelse)
        elif isinstance(s, While):
            key = (tuple(id(t) for t in stack), id(s), tuple(sorted(store.items())))
            if key in seen:
                if mode == FINAL:
                    return Diverged()
                return canonical_lasso(em[: seen[key]], em[seen[key]:])
            seen[key] = len(em)
            steps += 1
            if steps > budget:
                raise StepBudgetExceeded(f"step budget of {budget} exceeded")
            if eval_formula(s.cond, store):
                stack += [s, s.body]
    return Terminated(tuple(em), None if mode == TRACE else out_tuple())


# --------------------------------------------------------------------------
# Enumeration


@dataclass(frozen=True)
class ObservationTable:
    """Observation for every high input; ``observations[i]`` belongs to the
    input whose bitstring is ``int_to_bits(i, n_high)``."""

    program: str
    mode: str
    n_high: int
    observations: tuple[Observation, ...]

    def __len__(self):
        return len(self.observations)

    def __getitem__(self, bits: str) -> Observation:
        return self.observations[bits_to_int(bits)]

    def items(self) -> Iterator[tuple[str, Observation]]:
        for i, o in enumerate(self.observations):
            yield int_to_bits(i, self.n_high), o

    def to_dict(self) -> dict:
        return {
            "program": self.program,
            "mode": self.mode,
            "n_high": self.n_high,
            "observations": {bits: observation_to_dict(o) for bits, o in self.items()},
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> ObservationTable:
        n = d["n_high"]
        obs = [None] * (2 ** n)
        for bits, o in d["observations"].items():
            obs[bits_to_int(bits)] = observation_from_dict(o)
        if any(o is None for o in obs):
            raise ValueError("observation table is not total")
        return cls(d["program"], d["mode"], n, tuple(obs))


def enumerate_program(
    p: Program, mode: str = FINAL, cap: int = DEFAULT_ENUM_CAP, budget: int | None = None
) -> ObservationTable:
    """Run ``p`` on every high input."""
    if p.n_high > cap:
        raise EnumerationCapExceeded(f"{p.n_high} high bits exceed the enumeration cap of {cap}")
    budget = default_budget(p) if budget is None else budget
    fn = compile_program(p, mode)
    obs = tuple(fn(x, budget) for x in range(2 ** p.n_high))
    return ObservationTable(p.name, mode, p.n_high, obs)


# --------------------------------------------------------------------------
# Termination-insensitive equivalence

_BOTTOM = None


def _at(o: Observation, i: int):
    if isinstance(o, Terminated):
        return o.emissions[i] if i < len(o.emissions) else _BOTTOM
    if i < len(o.prefix):
        return o.prefix[i]
    if not o.lasso:
        # silent divergence emits nothing further
        return _BOTTOM
    return o.lasso[(i - len(o.prefix)) % len(o.lasso)]


def trace_equiv(a: Observation, b: Observation, mode: str = TRACE) -> bool:
    """``forall i. a_i = bottom or b_i = bottom or a_i = b_i``.

    In final mode two terminated observations are equivalent iff their
    finals agree, and a divergence is equivalent to anything.
    """
    if mode == FINAL:
        if isinstance(a, Terminated) and isinstance(b, Terminated):
            return a.final == b.final
        return True
    horizon = 0
    period = 1
    for o in (a, b):
        if isinstance(o, Terminated):
            horizon = max(horizon, len(o.emissions))
        else:
            horizon = max(horizon, len(o.prefix))
            if o.lasso:
                period = math.lcm(period, len(o.lasso))
    for i in range(horizon + period):
        x, y = _at(a, i), _at(b, i)
        if x is not _BOTTOM and y is not _BOTTOM and x != y:
            return False
    return True
