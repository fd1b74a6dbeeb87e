"""Command-line interface.

Exit codes: 0 holds / success, 1 fails / violation, 2 usage or input error,
3 unknown (tolerance, resource limit, or incomplete method).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .corpus import BUNDLED, CorpusError, load_program, run_corpus
from .decide import PROBLEMS, decide_exact, decide_sat, noninterferent
from .interp import MODES, enumerate_program, observation_to_dict, run
from .lang import DEFAULT_ENUM_CAP, BoolProgError, parse_formula, pretty, validate
from .measure import measure_table
from .selfcomp import POLARITIES, self_compose
from .solver import dag_size, export_dimacs, find_counterexample, tseitin, wp

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2, 3

_PROBLEM_ALIASES = {p.replace("_", "").lower(): p for p in PROBLEMS if p != "NI"}


class UsageError(Exception):
    pass


def parse_q(text: str) -> Fraction:
    """Exact rational from ``p/r`` or a finite decimal."""
    try:
        q = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"invalid bound {text!r}; use p/r or a decimal") from None
    if q < 0:
        raise UsageError("bound must be non-negative")
    return q


def _resolve(path: str) -> Path:
    p = Path(path)
    if not p.exists() and p.parts and p.parts[0] == "corpus" and (BUNDLED / p.name).exists():
        return BUNDLED / p.name
    return p


def _load(args, require_valid=True):
    p = load_program(_resolve(args.file))
    if require_valid:
        report = validate(p, getattr(args, "cap", DEFAULT_ENUM_CAP))
        if not report.ok:
            raise UsageError("; ".join(str(v) for v in report.violations))
    return p


def _emit(args, data: dict, human: str):
    if args.format == "json":
        print(json.dumps(data, indent=2))
    else:
        print(human)


def cmd_parse(args) -> int:
    p = _load(args, require_valid=False)
    report = validate(p, args.cap)
    data = {
        "program": p.name,
        "valid": report.ok,
        "violations": [str(v) for v in report.violations],
        "n_high": p.n_high,
        "n_out": p.n_out,
        "loop_free": p.loop_free,
        "source": pretty(p),
    }
    human = pretty(p).rstrip() + "".join(f"\n// violation: {v}" for v in report.violations)
    _emit(args, data, human)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_run(args) -> int:
    p = _load(args)
    o = run(p, args.input, args.mode)
    _emit(args, observation_to_dict(o), repr(o))
    return EXIT_OK


def cmd_measure(args) -> int:
    p = _load(args)
    report, _ = measure_table(enumerate_program(p, args.mode, args.cap))
    _emit(args, report.to_dict(), report.human())
    if args.plot:
        from .plotting import plot_partition

        plot_partition(report, args.plot)
    return EXIT_OK


def cmd_decide(args) -> int:
    problem = _PROBLEM_ALIASES[args.problem]
    p = _load(args)
    q = parse_q(args.q)
    if args.method == "oracle":
        verdict = decide_exact(problem, p, q, args.mode, args.cap)
    else:
        if problem not in ("L_ME", "U_ME", "L_GE"):
            raise UsageError(f"no SAT-backed decider for {problem}; use --method oracle")
        if not p.loop_free and problem != "L_GE":
            raise UsageError("SAT deciders need a loop-free program; use --method oracle")
        verdict = decide_sat(problem, p, q, args.decision_cap)
    _emit(args, verdict.to_dict(), verdict.human())
    return verdict.exit_code


def cmd_ni(args) -> int:
    p = _load(args)
    if args.method == "selfcomp" and not p.loop_free:
        raise UsageError("self-composition needs a loop-free program; use --method oracle")
    verdict = noninterferent(p, args.method, args.mode, args.cap, args.decision_cap)
    _emit(args, verdict.to_dict(), verdict.human())
    return verdict.exit_code


def cmd_compose(args) -> int:
    p = _load(args)
    if args.k < 2:
        raise UsageError("--k must be at least 2")
    print(self_compose(p, args.k, args.post).to_source(), end="")
    return EXIT_OK


def cmd_wp(args) -> int:
    p = _load(args)
    if not p.loop_free:
        raise UsageError("weakest preconditions need a loop-free program")
    post = parse_formula(args.post, p.decls)
    phi = wp(p, post)
    res, _ = find_counterexample(phi, args.decision_cap)
    cnf = tseitin(phi)
    if args.dimacs:
        Path(args.dimacs).write_text(export_dimacs(cnf), encoding="utf-8")
    data = {
        "program": p.name,
        "post": args.post,
        "wp_nodes": dag_size(phi),
        "program_size": p.size(),
        "valid": {"unsat": True, "sat": False}.get(res.status),
        "cnf_vars": cnf.num_vars,
        "cnf_clauses": len(cnf.clauses),
        "dimacs": args.dimacs,
    }
    human = "\n".join(f"{k}: {v}" for k, v in data.items())
    _emit(args, data, human)
    return EXIT_OK


def cmd_corpus(args) -> int:
    result = run_corpus(args.dir, args.manifest)
    for m in result.mismatches:
        print(f"MISMATCH {m}", file=sys.stderr)
    if args.report_dir:
        out = Path(args.report_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "corpus_report.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["program", "mode", "N", "classes", "SE", "ME", "GE", "GE_exact", "warnings"])
            for r in result.reports:
                w.writerow([r.program, r.mode, r.N, len(r.class_sizes), f"{r.SE:.12g}",
                            f"{r.ME:.12g}", f"{r.GE:.12g}", r.exact_forms["GE"], "; ".join(r.warnings)])
        from .plotting import plot_corpus

        plot_corpus(result.reports, out / "corpus_measures.png")
    data = {
        "programs": len(result.reports),
        "checks": result.checks,
        "mismatches": [m.to_dict() for m in result.mismatches],
        "reports": [r.to_dict() for r in result.reports],
    }
    status = "all pass" if result.ok else f"{len(result.mismatches)} mismatch(es)"
    human = "\n".join(
        [f"{r.program:<18} SE={r.SE:<10.6g} ME={r.ME:<8.6g} GE={r.exact_forms['GE']}" for r in result.reports]
        + [f"{result.checks} checks: {status}"]
    )
    _emit(args, data, human)
    return EXIT_OK if result.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="boolqif", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "human"), default="json")
    common.add_argument("--mode", choices=MODES, default="final")
    common.add_argument("--cap", type=_positive, default=DEFAULT_ENUM_CAP, help="max high-input bits to enumerate")
    common.add_argument("--decision-cap", type=_positive, default=None, help="SAT decision limit")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", parents=[common], help="parse, validate and pretty-print")
    s.add_argument("file")
    s.set_defaults(func=cmd_parse)

    s = sub.add_parser("run", parents=[common], help="run on one high input")
    s.add_argument("file")
    s.add_argument("--input", required=True, help="high input bitstring, MSB first")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("measure", parents=[common], help="SE/ME/GE/CC under the uniform prior")
    s.add_argument("file")
    s.add_argument("--plot", metavar="PNG", help="write a class-size figure")
    s.set_defaults(func=cmd_measure)

    s = sub.add_parser("decide", parents=[common], help="decide a bounding problem")
    s.add_argument("problem", choices=sorted(_PROBLEM_ALIASES))
    s.add_argument("file")
    s.add_argument("--q", required=True, help="bound as p/r or decimal")
    s.add_argument("--method", choices=("oracle", "sat"), default="oracle")
    s.set_defaults(func=cmd_decide)

    s = sub.add_parser("ni", parents=[common], help="decide non-interference")
    s.add_argument("file")
    s.add_argument("--method", choices=("oracle", "selfcomp"), default="oracle")
    s.set_defaults(func=cmd_ni)

    s = sub.add_parser("compose", parents=[common], help="print the k-fold self-composition")
    s.add_argument("file")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--post", choices=POLARITIES, required=True)
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("wp", parents=[common], help="weakest precondition and DIMACS export")
    s.add_argument("file")
    s.add_argument("--post", required=True, help="postcondition formula")
    s.add_argument("--dimacs", metavar="OUT", help="write the CNF of the precondition")
    s.set_defaults(func=cmd_wp)

    s = sub.add_parser("corpus", help="bundled corpus")
    csub = s.add_subparsers(dest="corpus_command", required=True)
    c = csub.add_parser("run", parents=[common], help="check programs against the manifest")
    c.add_argument("dir", nargs="?", default=None)
    c.add_argument("--manifest", default=None)
    c.add_argument("--report-dir", default=None, help="write corpus_report.csv and corpus_measures.png here")
    c.set_defaults(func=cmd_corpus)
    return ap


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, BoolProgError, CorpusError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
