"""Boolean-program language: AST, parser, pretty-printer, desugaring, validation.

Core formulas are built from four constructors (``TrueF``, ``Var``, ``And``,
``Not``). ``FalseF``, ``Or``, ``Xor`` and ``Eq`` exist only as surface sugar
and are removed by :func:`desugar`.

Concrete syntax::

    program m1;                       // optional header
    high h:bool[2];                   // high (secret) input
    out  o:bool[1];                   // observable output
    local t:bool[1];                  // scratch
    if (!h[1] & h[0]) then o[0] := false else o[0] := true

Statements are ``skip``, ``observe``, ``x[i] := phi``, ``if phi then S
[else S]``, ``while phi do S`` and ``{ S; ...; S }``. Formula operators by
increasing precedence: ``==``, ``|``, ``^``, ``&``, ``!``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

DEFAULT_ENUM_CAP = 24

HIGH, OUT, LOCAL = "high", "out", "local"
KINDS = (HIGH, OUT, LOCAL)

Pos = tuple  # (line, column), 1-based


class BoolProgError(Exception):
    """Base class for errors raised by this package."""


class ParseError(BoolProgError):
    def __init__(self, message: str, pos: Pos | None = None):
        self.message = message
        self.pos = pos
        where = f"{pos[0]}:{pos[1]}: " if pos else ""
        super().__init__(where + message)


# --------------------------------------------------------------------------
# Formulas


class Formula:
    """Base class of formula nodes.

    Nodes are immutable, carry a cached structural hash, and compare
    structurally (source positions are ignored). Identity is checked first,
    so comparing shared sub-DAGs is cheap.
    """

    __slots__ = ()
    prec = 6

    def _key(self) -> tuple:
        raise NotImplementedError

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((type(self).__name__,) + self._key()))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or self._hash != other._hash:
            return False
        return self._key() == other._key()

    def __ne__(self, other):
        return not self == other

    def children(self) -> tuple[Formula, ...]:
        return ()

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True, eq=False)
class TrueF(Formula):
    pos: Pos | None = field(default=None, repr=False)

    def _key(self):
        return ()


@dataclass(frozen=True, eq=False)
class FalseF(Formula):
    pos: Pos | None = field(default=None, repr=False)

    def _key(self):
        return ()


@dataclass(frozen=True, eq=False)
class Var(Formula):
    name: str
    bit: int = 0
    pos: Pos | None = field(default=None, repr=False)

    def _key(self):
        return (self.name, self.bit)


@dataclass(frozen=True, eq=False)
class Not(Formula):
    arg: Formula
    pos: Pos | None = field(default=None, repr=False)
    prec = 5

    def _key(self):
        return (self.arg,)

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class _Binary(Formula):
    left: Formula
    right: Formula
    pos: Pos | None = field(default=None, repr=False)
    symbol = "?"

    def _key(self):
        return (self.left, self.right)

    def children(self):
        return (self.left, self.right)


class And(_Binary):
    prec = 4
    symbol = "&"


class Xor(_Binary):
    prec = 3
    symbol = "^"


class Or(_Binary):
    prec = 2
    symbol = "|"


class Eq(_Binary):
    prec = 1
    symbol = "=="


CORE_TYPES = (TrueF, Var, And, Not)


def is_core(f: Formula) -> bool:
    return all(isinstance(g, CORE_TYPES) for g in iter_nodes(f))


def iter_nodes(f: Formula) -> Iterator[Formula]:
    """Yield each distinct node of the formula DAG once (pre-order)."""
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        yield g
        stack.extend(reversed(g.children()))


def formula_vars(f: Formula) -> set[tuple[str, int]]:
    return {(g.name, g.bit) for g in iter_nodes(f) if isinstance(g, Var)}


def desugar(f: Formula) -> Formula:
    """Rewrite ``f`` into the core constructors ``TrueF/Var/And/Not``."""
    memo: dict[int, Formula] = {}

    def go(g: Formula) -> Formula:
        hit = memo.get(id(g))
        if hit is not None:
            return hit
        if isinstance(g, (TrueF, Var)):
            out = g
        elif isinstance(g, FalseF):
            out = Not(TrueF(pos=g.pos), pos=g.pos)
        elif isinstance(g, Not):
            out = Not(go(g.arg), pos=g.pos)
        elif isinstance(g, And):
            out = And(go(g.left), go(g.right), pos=g.pos)
        elif isinstance(g, Or):
            out = Not(And(Not(go(g.left)), Not(go(g.right))), pos=g.pos)
        elif isinstance(g, Eq):
            a, b = go(g.left), go(g.right)
            out = And(Not(And(a, Not(b))), Not(And(Not(a), b)), pos=g.pos)
        elif isinstance(g, Xor):
            a, b = go(g.left), go(g.right)
            out = Not(And(Not(And(a, Not(b))), Not(And(Not(a), b))), pos=g.pos)
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[id(g)] = out
        return out

    return go(f)


def eval_formula(f: Formula, env) -> bool:
    """Evaluate a (possibly sugared) formula; ``env`` maps (name, bit) to bool."""
    memo: dict[int, bool] = {}
    # iterative post-order so deep DAGs do not hit the recursion limit
    stack = [(f, False)]
    while stack:
        g, expanded = stack.pop()
        if id(g) in memo:
            continue
        kids = g.children()
        if not expanded and kids:
            stack.append((g, True))
            stack.extend((c, False) for c in kids if id(c) not in memo)
            continue
        if isinstance(g, TrueF):
            v = True
        elif isinstance(g, FalseF):
            v = False
        elif isinstance(g, Var):
            v = bool(env[(g.name, g.bit)])
        elif isinstance(g, Not):
            v = not memo[id(g.arg)]
        else:
            a, b = memo[id(g.left)], memo[id(g.right)]
            if isinstance(g, And):
                v = a and b
            elif isinstance(g, Or):
                v = a or b
            elif isinstance(g, Xor):
                v = a != b
            else:
                v = a == b
        memo[id(g)] = v
    return memo[id(f)]


def format_formula(f: Formula) -> str:
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Var):
        return f"{f.name}[{f.bit}]"
    if isinstance(f, Not):
        inner = format_formula(f.arg)
        return "!" + (inner if f.arg.prec >= Not.prec else f"({inner})")
    left = format_formula(f.left)
    right = format_formula(f.right)
    if f.left.prec < f.prec:
        left = f"({left})"
    if f.right.prec <= f.prec:
        right = f"({right})"
    return f"{left} {f.symbol} {right}"


# --------------------------------------------------------------------------
# Statements and programs


@dataclass(frozen=True)
class Skip:
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Observe:
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Assign:
    target: str
    bit: int
    expr: Formula
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Seq:
    first: Statement
    second: Statement
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class If:
    cond: Formula
    then: Statement
    orelse: Statement
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class While:
    cond: Formula
    body: Statement
    pos: Pos | None = field(default=None, compare=False, repr=False)


Statement = Skip | Observe | Assign | Seq | If | While


def seq(*stmts: Statement) -> Statement:
    """Right-nested sequence of ``stmts`` (``Skip`` when empty)."""
    if not stmts:
        return Skip()
    out = stmts[-1]
    for s in reversed(stmts[:-1]):
        out = Seq(s, out)
    return out


def iter_statements(s: Statement) -> Iterator[Statement]:
    stack = [s]
    while stack:
        t = stack.pop()
        yield t
        if isinstance(t, Seq):
            stack += [t.second, t.first]
        elif isinstance(t, If):
            stack += [t.orelse, t.then]
        elif isinstance(t, While):
            stack.append(t.body)


def statement_formulas(s: Statement) -> Iterator[Formula]:
    for t in iter_statements(s):
        if isinstance(t, Assign):
            yield t.expr
        elif isinstance(t, (If, While)):
            yield t.cond


@dataclass(frozen=True)
class Decl:
    name: str
    kind: str
    width: int
    pos: Pos | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Program:
    name: str
    decls: tuple[Decl, ...]
    body: Statement
    # postcondition of a self-composed program; executable programs have none
    assertion: Formula | None = None

    def decl(self, name: str) -> Decl | None:
        for d in self.decls:
            if d.name == name:
                return d
        return None

    def of_kind(self, kind: str) -> tuple[Decl, ...]:
        return tuple(d for d in self.decls if d.kind == kind)

    @property
    def highs(self):
        return self.of_kind(HIGH)

    @property
    def outs(self):
        return self.of_kind(OUT)

    def bits_of(self, kind: str) -> list[tuple[str, int]]:
        """(name, bit) pairs of ``kind`` in bitstring order: declaration
        order, most significant bit first within each variable."""
        return [(d.name, b) for d in self.of_kind(kind) for b in reversed(range(d.width))]

    @property
    def high_bits(self):
        return self.bits_of(HIGH)

    @property
    def out_bits(self):
        return self.bits_of(OUT)

    @property
    def all_bits(self) -> list[tuple[str, int]]:
        return [(d.name, b) for d in self.decls for b in reversed(range(d.width))]

    @property
    def n_high(self) -> int:
        return sum(d.width for d in self.highs)

    @property
    def n_out(self) -> int:
        return sum(d.width for d in self.outs)

    @property
    def loop_free(self) -> bool:
        return not any(isinstance(s, While) for s in iter_statements(self.body))

    def size(self) -> int:
        """Number of statement and formula nodes in the body."""
        n = 0
        for s in iter_statements(self.body):
            n += 1
        for f in statement_formulas(self.body):
            n += sum(1 for _ in iter_nodes(f))
        return n

    def to_source(self) -> str:
        return pretty(self)


# --------------------------------------------------------------------------
# Lexer / parser

KEYWORDS = {
    "program", "high", "out", "local", "bool", "if", "then", "else", "while",
    "do", "skip", "observe", "true", "false", "assert",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[a-zA-Z_][a-zA-Z0-9_]*)
  | (?P<op>:=|==|[:;\[\](){}!&|^])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str  # "int", "ident", "kw", "op", "eof"
    text: str
    pos: Pos


def tokenize(text: str) -> list[Token]:
    toks = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", (line, i - line_start + 1))
        kind = m.lastgroup
        pos = (line, i - line_start + 1)
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident":
            word = m.group()
            toks.append(Token("kw" if word in KEYWORDS else "ident", word, pos))
        elif kind in ("int", "op"):
            toks.append(Token(kind, m.group(), pos))
        i = m.end()
    toks.append(Token("eof", "", (line, i - line_start + 1)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.decls: dict[str, Decl] = {}

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("kw", "op") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def fail(self, msg: str):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"{msg}, found {found}", t.pos)

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.fail("expected identifier")
        return self.advance()

    def integer(self) -> int:
        if self.tok.kind != "int":
            self.fail("expected integer")
        return int(self.advance().text)

    # grammar
    def program(self, default_name: str) -> Program:
        name = default_name
        if self.at("program"):
            self.advance()
            name = self.ident().text
            self.expect(";")
        decls = []
        while self.tok.text in KINDS and self.tok.kind == "kw":
            decls.append(self.declaration())
        body, assertion = self.sequence(top=True)
        if self.tok.kind != "eof":
            self.fail("expected ';' or end of input")
        return Program(name, tuple(decls), body, assertion)

    def declaration(self) -> Decl:
        kind_tok = self.advance()
        name_tok = self.ident()
        self.expect(":")
        self.expect("bool")
        width = 1
        if self.at("["):
            self.advance()
            width_pos = self.tok.pos
            width = self.integer()
            if width < 1:
                raise ParseError("bit-width must be at least 1", width_pos)
            self.expect("]")
        self.expect(";")
        if name_tok.text in self.decls:
            raise ParseError(f"duplicate declaration of {name_tok.text!r}", name_tok.pos)
        d = Decl(name_tok.text, kind_tok.text, width, kind_tok.pos)
        self.decls[d.name] = d
        return d

    _STMT_START = {"skip", "observe", "if", "while", "{"}

    def starts_statement(self) -> bool:
        t = self.tok
        return t.kind == "ident" or (t.kind in ("kw", "op") and t.text in self._STMT_START)

    def sequence(self, top=False):
        stmts = []
        assertion = None
        while True:
            if top and self.at("assert"):
                assertion = self.assertion()
                if self.at(";"):
                    self.advance()
                break
            if not self.starts_statement():
                break
            stmts.append(self.statement())
            if not self.at(";"):
                break
            self.advance()
        body = seq(*stmts)
        return (body, assertion) if top else body

    def assertion(self) -> Formula:
        self.expect("assert")
        self.expect("(")
        f = self.formula()
        self.expect(")")
        return f

    def statement(self) -> Statement:
        t = self.tok
        if self.at("skip"):
            self.advance()
            return Skip(t.pos)
        if self.at("observe"):
            self.advance()
            return Observe(t.pos)
        if self.at("{"):
            self.advance()
            body = self.sequence()
            self.expect("}")
            return body
        if self.at("if"):
            self.advance()
            cond = self.formula()
            self.expect("then")
            then = self.statement()
            orelse = Skip(self.tok.pos)
            if self.at("else"):
                self.advance()
                orelse = self.statement()
            return If(cond, then, orelse, t.pos)
        if self.at("while"):
            self.advance()
            cond = self.formula()
            self.expect("do")
            return While(cond, self.statement(), t.pos)
        if t.kind == "ident":
            name, bit = self.reference()
            self.expect(":=")
            return Assign(name, bit, self.formula(), t.pos)
        self.fail("expected statement")

    def reference(self) -> tuple[str, int]:
        t = self.ident()
        d = self.decls.get(t.text)
        if d is None:
            raise ParseError(f"unknown variable {t.text!r}", t.pos)
        if self.at("["):
            self.advance()
            bit_pos = self.tok.pos
            bit = self.integer()
            self.expect("]")
            if bit >= d.width:
                raise ParseError(
                    f"bit index {bit} out of range for {t.text}:bool[{d.width}]", bit_pos
                )
            return t.text, bit
        if d.width != 1:
            raise ParseError(f"{t.text!r} has {d.width} bits; a bit index is required", t.pos)
        return t.text, 0

    def formula(self) -> Formula:
        return self._binary(0)

    _LEVELS = [("==", Eq), ("|", Or), ("^", Xor), ("&", And)]

    def _binary(self, level: int) -> Formula:
        if level == len(self._LEVELS):
            return self._unary()
        sym, cls = self._LEVELS[level]
        left = self._binary(level + 1)
        while self.at(sym):
            pos = self.advance().pos
            left = cls(left, self._binary(level + 1), pos=pos)
        return left

    def _unary(self) -> Formula:
        t = self.tok
        if self.at("!"):
            self.advance()
            return Not(self._unary(), pos=t.pos)
        if self.at("true"):
            self.advance()
            return TrueF(pos=t.pos)
        if self.at("false"):
            self.advance()
            return FalseF(pos=t.pos)
        if self.at("("):
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "ident":
            name, bit = self.reference()
            return Var(name, bit, pos=t.pos)
        self.fail("expected formula")


def parse(text: str, name: str = "main") -> Program:
    """Parse program source. Raises :class:`ParseError` with a location on
    syntax errors, duplicate declarations, unknown variables and
    out-of-range bit indices."""
    return _Parser(text).program(name)


def parse_formula(text: str, decls) -> Formula:
    """Parse a standalone formula against the declarations ``decls``."""
    p = _Parser(text)
    p.decls = {d.name: d for d in decls}
    f = p.formula()
    if p.tok.kind != "eof":
        p.fail("unexpected trailing input")
    return f


# --------------------------------------------------------------------------
# Pretty-printing


def _block(s: Statement, ind: str) -> str:
    if isinstance(s, Seq):
        return "{\n" + _stmts(s, ind + "  ") + "\n" + ind + "}"
    return _stmt(s, ind)


def _stmt(s: Statement, ind: str) -> str:
    if isinstance(s, Skip):
        return "skip"
    if isinstance(s, Observe):
        return "observe"
    if isinstance(s, Assign):
        return f"{s.target}[{s.bit}] := {format_formula(s.expr)}"
    if isinstance(s, If):
        return (
            f"if {format_formula(s.cond)} then {_block(s.then, ind)}"
            f" else {_block(s.orelse, ind)}"
        )
    if isinstance(s, While):
        return f"while {format_formula(s.cond)} do {_block(s.body, ind)}"
    if isinstance(s, Seq):
        return _block(s, ind)
    raise TypeError(f"not a statement: {s!r}")


def _stmts(s: Statement, ind: str) -> str:
    lines = []
    while isinstance(s, Seq):
        # a left-nested Seq needs braces to survive a round trip
        lines.append(ind + _block(s.first, ind))
        s = s.second
    lines.append(ind + _stmt(s, ind))
    return ";\n".join(lines)


def pretty(p: Program) -> str:
    """Canonical source text; ``parse(pretty(p)) == p``."""
    out = [f"program {p.name};"]
    out += [f"{d.kind} {d.name}:bool[{d.width}];" for d in p.decls]
    body = _stmts(p.body, "")
    if p.assertion is not None:
        body += f";\nassert({format_formula(p.assertion)})"
    out.append(body)
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Violation:
    message: str
    pos: Pos | None = None

    def __str__(self):
        return (f"{self.pos[0]}:{self.pos[1]}: " if self.pos else "") + self.message


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate(p: Program, enum_cap: int = DEFAULT_ENUM_CAP) -> ValidationReport:
    """Check the program invariants, reporting every violation found."""
    report = ValidationReport()
    add = report.violations.append
    names: dict[str, Decl] = {}
    for d in p.decls:
        if d.name in names:
            add(Violation(f"duplicate declaration of {d.name!r}", d.pos))
        if d.kind not in KINDS:
            add(Violation(f"unknown variable kind {d.kind!r}", d.pos))
        if d.width < 1:
            add(Violation(f"{d.name!r} must have at least one bit", d.pos))
        names.setdefault(d.name, d)
    if not p.highs or p.n_high == 0:
        add(Violation("program declares no high input bits"))
    if not p.outs:
        add(Violation("program declares no out variable"))
    if p.n_high > enum_cap:
        add(Violation(f"{p.n_high} high bits exceed the enumeration cap of {enum_cap}"))

    def check_ref(name, bit, pos):
        d = names.get(name)
        if d is None:
            add(Violation(f"undeclared variable {name!r}", pos))
        elif not 0 <= bit < d.width:
            add(Violation(f"bit index {bit} out of range for {name}:bool[{d.width}]", pos))
        return d

    for s in iter_statements(p.body):
        if isinstance(s, Assign):
            d = check_ref(s.target, s.bit, s.pos)
            if d is not None and d.kind == HIGH:
                add(Violation(f"high input is read-only: assignment to {s.target}[{s.bit}]", s.pos))
    formulas = list(statement_formulas(p.body))
    if p.assertion is not None:
        formulas.append(p.assertion)
    for f in formulas:
        for g in iter_nodes(f):
            if isinstance(g, Var):
                check_ref(g.name, g.bit, g.pos)
    return report
