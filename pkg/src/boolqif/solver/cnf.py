"""Tseitin encoding of core formulas and DIMACS import/export."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..lang import And, Formula, Not, TrueF, Var, desugar, formula_vars, is_core


@dataclass
class Cnf:
    num_vars: int
    clauses: list[tuple[int, ...]]
    # named program bit -> CNF variable
    names: dict[tuple[str, int], int] = field(default_factory=dict)
    root: int = 0  # literal of the encoded formula

    def project(self, model: dict[int, bool]) -> dict[tuple[str, int], bool]:
        return {bit: model[v] for bit, v in self.names.items()}


def tseitin(f: Formula) -> Cnf:
    """Equisatisfiable CNF of ``f``; named bits get the lowest variable
    indices, in sorted (name, bit) order."""
    if not is_core(f):
        f = desugar(f)
    names = {bit: i + 1 for i, bit in enumerate(sorted(formula_vars(f)))}
    n = len(names)
    clauses: list[tuple[int, ...]] = []
    lit: dict[int, int] = {}
    true_lit = 0
    stack = [(f, False)]
    while stack:
        g, expanded = stack.pop()
        if id(g) in lit:
            continue
        kids = g.children()
        if kids and not expanded:
            stack.append((g, True))
            stack.extend((c, False) for c in reversed(kids) if id(c) not in lit)
            continue
        if isinstance(g, Var):
            lit[id(g)] = names[(g.name, g.bit)]
        elif isinstance(g, TrueF):
            if not true_lit:
                n += 1
                true_lit = n
                clauses.append((true_lit,))
            lit[id(g)] = true_lit
        elif isinstance(g, Not):
            lit[id(g)] = -lit[id(g.arg)]
        elif isinstance(g, And):
            a, b = lit[id(g.left)], lit[id(g.right)]
            n += 1
            clauses += [(-n, a), (-n, b), (n, -a, -b)]
            lit[id(g)] = n
        else:
            raise TypeError(f"not a core formula node: {g!r}")
    root = lit[id(f)]
    if (root,) not in clauses:
        clauses.append((root,))
    return Cnf(n, clauses, names, root)


def export_dimacs(c: Cnf) -> str:
    """DIMACS text: ``c <name>[<bit>] <var>`` comment lines for the named
    bits (by variable index), the ``p cnf V C`` header, one clause per line."""
    lines = [f"c {name}[{bit}] {v}" for (name, bit), v in sorted(c.names.items(), key=lambda kv: kv[1])]
    lines.append(f"p cnf {c.num_vars} {len(c.clauses)}")
    lines += [" ".join(map(str, cl)) + " 0" for cl in c.clauses]
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> Cnf:
    num_vars = None
    clauses = []
    names = {}
    current: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) == 3 and parts[1].endswith("]") and "[" in parts[1]:
                name, bit = parts[1][:-1].split("[")
                names[(name, int(bit))] = int(parts[2])
            continue
        if line.startswith("p"):
            _, fmt, v, _c = line.split()
            if fmt != "cnf":
                raise ValueError(f"unsupported DIMACS format {fmt!r}")
            num_vars = int(v)
            continue
        for tok in line.split():
            x = int(tok)
            if x == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(x)
    if num_vars is None:
        raise ValueError("missing 'p cnf' header")
    if current:
        clauses.append(tuple(current))
    return Cnf(num_vars, clauses, names)


def parse_model(text: str) -> dict[int, bool]:
    """Read a model as space-separated literals (``v``/``s`` prefixes and a
    trailing 0 are accepted, as printed by common solvers)."""
    model = {}
    for line in text.splitlines():
        toks = line.split()
        if toks and toks[0] == "s":
            continue
        for tok in toks:
            if tok == "v":
                continue
            x = int(tok)
            if x:
                model[abs(x)] = x > 0
    return model
