"""Output partitions and the Shannon-, min- and guessing-entropy QIF measures
under the uniform prior, with exact comparison against rational bounds.

Under the uniform prior every measure is a function of the multiset of
output-class sizes ``n_1..n_m`` over ``N`` inputs:

* SE = log2 N - (1/N) * sum n_j log2 n_j
* ME = log2 m
* GE = (N^2 - sum n_j^2) / (2N)

Channel capacity (max over priors of SE) equals ME under the uniform prior
for deterministic programs without low inputs.
"""

from __future__ import annotations

import enum
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .interp import FINAL, Diverged, ObservationTable, trace_equiv

SE, ME, GE, CC = "SE", "ME", "GE", "CC"

SE_TOLERANCE = 1e-9
# exact SE comparison when N <= 4096 and r <= 16 ...
SE_EXACT_MAX_N = 4096
SE_EXACT_MAX_DEN = 16
# ... or, more generally, when the big integers stay within this many bits
SE_EXACT_MAX_BITS = 1 << 20
# far from the bound a float comparison is already exact
_FLOAT_MARGIN = 1e-6


@dataclass(frozen=True)
class OutputPartition:
    N: int
    sizes: tuple[int, ...]  # descending
    merged_warning: bool = False

    def __post_init__(self):
        if not self.sizes or any(n < 1 for n in self.sizes) or sum(self.sizes) != self.N:
            raise ValueError(f"invalid partition {self.sizes} of N={self.N}")
        object.__setattr__(self, "sizes", tuple(sorted(self.sizes, reverse=True)))

    @property
    def m(self) -> int:
        return len(self.sizes)

    @classmethod
    def of(cls, sizes, merged_warning=False) -> OutputPartition:
        sizes = tuple(sizes)
        return cls(sum(sizes), sizes, merged_warning)


def partition(t: ObservationTable) -> OutputPartition:
    """Group inputs by exact observation equality.

    ``merged_warning`` is set when the termination-insensitive equivalence
    relates representatives of two different classes.
    """
    counts = Counter(t.observations)
    reps = list(counts)
    if t.mode == FINAL:
        # a divergence is equivalent to every other observation
        warn = len(reps) > 1 and any(isinstance(o, Diverged) for o in reps)
    else:
        warn = any(trace_equiv(a, b) for a, b in combinations(reps, 2))
    return OutputPartition(len(t), tuple(counts.values()), warn)


@dataclass(frozen=True)
class MeasureValue:
    """A measure value with the data needed to compare it exactly.

    ``exact`` is the class count ``m`` for ME/CC, a :class:`Fraction` for
    GE, and the partition for SE.
    """

    kind: str
    value: float
    exact: object

    def exact_form(self) -> str:
        if self.kind in (ME, CC):
            return f"log2({self.exact})"
        if self.kind == GE:
            return str(self.exact)
        pp: OutputPartition = self.exact
        if pp.m == 1:
            return "0"
        terms = [f"{n}*log2({n})" for n in pp.sizes if n > 1]
        if not terms:
            return f"log2({pp.N})"
        return f"log2({pp.N}) - ({' + '.join(terms)})/{pp.N}"


def shannon_qif(pp: OutputPartition) -> MeasureValue:
    N = pp.N
    if pp.m == 1:
        value = 0.0
    elif pp.m == N:
        value = math.log2(N)
    else:
        value = math.log2(N) - math.fsum(n * math.log2(n) for n in pp.sizes) / N
    return MeasureValue(SE, max(value, 0.0), pp)


def min_entropy_qif(pp: OutputPartition) -> MeasureValue:
    return MeasureValue(ME, math.log2(pp.m), pp.m)


def guessing_qif(pp: OutputPartition) -> MeasureValue:
    N = pp.N
    exact = Fraction(N * N - sum(n * n for n in pp.sizes), 2 * N)
    return MeasureValue(GE, float(exact), exact)


def channel_capacity(pp: OutputPartition) -> MeasureValue:
    return MeasureValue(CC, math.log2(pp.m), pp.m)


class Cmp(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    WITHIN_TOLERANCE = "within_tolerance"

    @classmethod
    def of(cls, b: bool) -> Cmp:
        return cls.TRUE if b else cls.FALSE


GT, LE = ">", "<="


def _exceeds(v: MeasureValue, q: Fraction) -> bool | None:
    """Exactly decide ``v > q``; ``None`` when no exact procedure applies."""
    p, r = q.numerator, q.denominator
    if v.kind != GE and abs(v.value - float(q)) > _FLOAT_MARGIN:
        return v.value > float(q)
    if v.kind in (ME, CC):
        # log2 m > p/r  <=>  m^r > 2^p
        return v.exact ** r > 2 ** p
    if v.kind == GE:
        return v.exact > q
    pp: OutputPartition = v.exact
    N = pp.N
    if pp.m == 1:
        return 0 > q
    if q >= N.bit_length():
        return False  # q > log2 N >= SE
    cost = N * r * (N - 1).bit_length()
    if not ((N <= SE_EXACT_MAX_N and r <= SE_EXACT_MAX_DEN) or cost <= SE_EXACT_MAX_BITS):
        return None
    # SE > p/r  <=>  N^(N r) > 2^(N p) * prod n_j^(n_j r)
    lhs = N ** (N * r)
    rhs = 1 << (N * p)
    for n, c in Counter(pp.sizes).items():
        if n > 1:
            rhs *= n ** (n * r * c)
    return lhs > rhs


def compare(v: MeasureValue, q, relation: str) -> Cmp:
    """Compare a measure against the rational bound ``q`` with ``>`` or ``<=``."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("bound must be non-negative")
    if relation not in (GT, LE):
        raise ValueError(f"relation must be {GT!r} or {LE!r}")
    gt = _exceeds(v, q)
    if gt is None:
        if abs(v.value - float(q)) <= SE_TOLERANCE:
            return Cmp.WITHIN_TOLERANCE
        gt = v.value > float(q)
    return Cmp.of(gt if relation == GT else not gt)


# --------------------------------------------------------------------------
# Reports


@dataclass
class MeasureReport:
    program: str
    mode: str
    N: int
    class_sizes: tuple[int, ...]
    SE: float
    ME: float
    GE: float
    CC: float
    exact_forms: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def ge_exact(self) -> Fraction:
        return Fraction(self.exact_forms[GE])

    @property
    def m(self) -> int:
        return len(self.class_sizes)

    def to_dict(self) -> dict:
        return {
            "program": self.program,
            "mode": self.mode,
            "N": self.N,
            "class_sizes": list(self.class_sizes),
            "SE": self.SE,
            "ME": self.ME,
            "GE": self.GE,
            "CC": self.CC,
            "exact_forms": dict(self.exact_forms),
            "warnings": list(self.warnings),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> MeasureReport:
        d = dict(d)
        d["class_sizes"] = tuple(d["class_sizes"])
        return cls(**d)

    def human(self) -> str:
        lines = [
            f"program {self.program} ({self.mode} mode), N = {self.N}, classes = {list(self.class_sizes)}",
            f"  SE = {self.SE:.9g}  [{self.exact_forms[SE]}]",
            f"  ME = {self.ME:.9g}  [{self.exact_forms[ME]}]",
            f"  GE = {self.GE:.9g}  [{self.exact_forms[GE]}]",
            f"  CC = {self.CC:.9g}  [{self.exact_forms[CC]}]",
        ]
        lines += [f"  warning: {w}" for w in self.warnings]
        return "\n".join(lines)


def measure_table(t: ObservationTable) -> tuple[MeasureReport, OutputPartition]:
    pp = partition(t)
    values = [shannon_qif(pp), min_entropy_qif(pp), guessing_qif(pp), channel_capacity(pp)]
    warnings = []
    diverging = sum(1 for o in t.observations if isinstance(o, Diverged))
    if diverging:
        warnings.append(f"{diverging} of {pp.N} inputs diverge")
    if pp.merged_warning:
        warnings.append(
            "termination-insensitive equivalence relates observations in different classes"
        )
    report = MeasureReport(
        program=t.program,
        mode=t.mode,
        N=pp.N,
        class_sizes=pp.sizes,
        exact_forms={v.kind: v.exact_form() for v in values},
        warnings=warnings,
        **{v.kind: v.value for v in values},
    )
    return report, pp
