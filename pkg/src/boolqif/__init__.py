"""Quantitative information flow for deterministic boolean programs."""

__version__ = "0.1.0"

from .lang import Program, desugar, parse, pretty, validate
from .interp import enumerate_program, run, trace_equiv
from .measure import (
    channel_capacity, compare, guessing_qif, measure_table, min_entropy_qif, partition,
    shannon_qif,
)
from .selfcomp import k_for_ge, k_for_me, self_compose
from .decide import (
    Verdict, decide_exact, ge_lower_witness, me_lower_kobs, me_upper_ksafety, noninterferent,
)
