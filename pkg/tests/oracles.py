"""Brute-force oracles, deliberately independent of the code they check.

None of these import the measure, solver or self-composition modules; they
work from truth tables, joint distributions and the small-step interpreter.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from fractions import Fraction

from boolqif.interp import int_to_bits, run_small_step


def observations(p, mode="final"):
    """input bitstring -> observation, via the small-step interpreter."""
    return {
        int_to_bits(x, p.n_high): run_small_step(p, int_to_bits(x, p.n_high), mode)
        for x in range(2 ** p.n_high)
    }


def distinct_output_count(p, mode="final") -> int:
    return len(set(observations(p, mode).values()))


def joint_from_sizes(sizes):
    """Uniform joint distribution over (h, o) for a partition: input h lies
    in class o. Returns (N, list of (h, o, prob))."""
    N = sum(sizes)
    rows = []
    h = 0
    for o, n in enumerate(sizes):
        for _ in range(n):
            rows.append((h, o, Fraction(1, N)))
            h += 1
    return N, rows


def shannon_def(sizes) -> float:
    """H(H) - H(H|O) straight from the entropy definitions."""
    N, rows = joint_from_sizes(sizes)
    p_h = defaultdict(Fraction)
    p_o = defaultdict(Fraction)
    for h, o, pr in rows:
        p_h[h] += pr
        p_o[o] += pr
    H = sum(float(pr) * math.log2(1 / float(pr)) for pr in p_h.values() if pr)
    H_cond = 0.0
    for o, po in p_o.items():
        inner = 0.0
        for h, o2, pr in rows:
            if o2 == o:
                c = float(pr / po)
                inner += c * math.log2(1 / c)
        H_cond += float(po) * inner
    return H - H_cond


def min_entropy_def(sizes) -> float:
    """log 1/V(H) - log 1/V(H|O) from the vulnerability definitions."""
    N, rows = joint_from_sizes(sizes)
    V = max(Fraction(1, N) for _ in range(N))
    p_o = defaultdict(Fraction)
    for _, o, pr in rows:
        p_o[o] += pr
    V_cond = sum(po * max(pr / po for _, o2, pr in rows if o2 == o) for o, po in p_o.items())
    return math.log2(1 / V) - math.log2(1 / V_cond)


def guessing_def(sizes) -> Fraction:
    """G(H) - G(H|O): expected rank of the secret when guessing in order of
    decreasing probability."""
    N, rows = joint_from_sizes(sizes)
    probs = sorted((pr for _, _, pr in rows), reverse=True)
    G = sum(i * pr for i, pr in enumerate(probs, 1))
    p_o = defaultdict(Fraction)
    for _, o, pr in rows:
        p_o[o] += pr
    G_cond = Fraction(0)
    for o, po in p_o.items():
        cond = sorted((pr / po for _, o2, pr in rows if o2 == o), reverse=True)
        G_cond += po * sum(i * c for i, c in enumerate(cond, 1))
    return G - G_cond


def integer_partitions(n, max_part=None):
    max_part = n if max_part is None else max_part
    if n == 0:
        yield ()
        return
    for k in range(min(n, max_part), 0, -1):
        for rest in integer_partitions(n - k, k):
            yield (k,) + rest


def truth_table_sat(num_vars, clauses):
    """All satisfying assignments (as tuples of bools, index 0 = var 1)."""
    models = []
    for bits in itertools.product((False, True), repeat=num_vars):
        if all(any(bits[abs(x) - 1] == (x > 0) for x in c) for c in clauses):
            models.append(bits)
    return models


def floor_pow2(p: int, r: int) -> int:
    """floor(2^(p/r)) by scanning integers upward."""
    t = 0
    while (t + 1) ** r <= 2 ** p:
        t += 1
    return t


def min_ge_over_partitions(N, m) -> Fraction:
    """Smallest (N^2 - sum n^2)/(2N) over all partitions of N into m parts."""
    best = None
    for parts in integer_partitions(N):
        if len(parts) == m:
            g = Fraction(N * N - sum(n * n for n in parts), 2 * N)
            best = g if best is None else min(best, g)
    return best
