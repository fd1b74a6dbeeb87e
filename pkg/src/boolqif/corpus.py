"""Bundled example programs and the expected-values harness."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .decide import decide_exact, decide_sat
from .interp import enumerate_program
from .lang import BoolProgError, Program, parse, validate
from .measure import MeasureReport, measure_table

BUNDLED = Path(__file__).parent / "corpus"
MANIFEST = "manifest.json"


class CorpusError(BoolProgError):
    pass


def load_program(path) -> Program:
    path = Path(path)
    return parse(path.read_text(encoding="utf-8"), path.stem)


@dataclass
class Mismatch:
    program: str
    measure: str
    expected: object
    got: object

    def to_dict(self) -> dict:
        plain = lambda v: v if isinstance(v, (bool, int, float, str, list)) or v is None else str(v)
        return {"program": self.program, "measure": self.measure,
                "expected": plain(self.expected), "got": plain(self.got)}

    def __str__(self):
        return f"{self.program}: {self.measure} expected {self.expected}, got {self.got}"


@dataclass
class CorpusResult:
    reports: list[MeasureReport] = field(default_factory=list)
    mismatches: list[Mismatch] = field(default_factory=list)
    checks: int = 0

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _check_entry(path: Path, entry: dict, tol: float, result: CorpusResult):
    p = load_program(path)
    name = path.name

    def expect(measure, expected, got, same=None):
        result.checks += 1
        if not (same(expected, got) if same else expected == got):
            result.mismatches.append(Mismatch(name, measure, expected, got))

    report = validate(p)
    expect("valid", True, report.ok)
    if not report.ok:
        return
    mode = entry.get("mode", "final")
    rep, pp = measure_table(enumerate_program(p, mode))
    result.reports.append(rep)
    expect("N", entry["N"], rep.N)
    expect("class_sizes", sorted(entry["class_sizes"], reverse=True), list(rep.class_sizes))
    expect("SE", entry["SE"], rep.SE, lambda a, b: math.isclose(a, b, rel_tol=0, abs_tol=tol))
    expect("ME", math.log2(entry["ME_classes"]), rep.ME)
    expect("GE", Fraction(entry["GE"]), rep.ge_exact)
    if "merged_warning" in entry:
        expect("merged_warning", entry["merged_warning"], pp.merged_warning)
    if "NI" in entry:
        expect("NI", entry["NI"], decide_exact("NI", p, 0, mode).holds)
        if p.loop_free and mode == "final":
            expect("NI[selfcomp]", entry["NI"], decide_sat("NI", p, 0).holds)
    for d in entry.get("decisions", []):
        label = f"{d['problem']}@{d['q']}"
        expect(label, d["outcome"], decide_exact(d["problem"], p, d["q"], mode).outcome)
        if p.loop_free and d["problem"] in ("L_ME", "U_ME"):
            expect(label + "[sat]", d["outcome"], decide_sat(d["problem"], p, d["q"]).outcome)


def run_corpus(directory=None, manifest=None) -> CorpusResult:
    """Check every ``.bp`` file in ``directory`` against the manifest.
    Files are processed in sorted path order."""
    directory = Path(directory) if directory is not None else BUNDLED
    manifest = Path(manifest) if manifest is not None else directory / MANIFEST
    files = sorted(directory.glob("*.bp"))
    if not files:
        raise CorpusError(f"no .bp programs in {directory}")
    if not manifest.exists():
        raise CorpusError(f"manifest {manifest} not found")
    data = json.loads(manifest.read_text(encoding="utf-8"))
    tol = data.get("tolerance", 1e-9)
    entries = {e["file"]: e for e in data["programs"]}
    result = CorpusResult()
    for path in files:
        entry = entries.pop(path.name, None)
        if entry is None:
            result.mismatches.append(Mismatch(path.name, "manifest entry", "present", "missing"))
            continue
        _check_entry(path, entry, tol, result)
    for missing in sorted(entries):
        result.mismatches.append(Mismatch(missing, "program file", "present", "missing"))
    return result
