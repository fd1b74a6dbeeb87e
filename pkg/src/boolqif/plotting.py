"""Figures for measure reports. Uses the object-oriented matplotlib API, so no
pyplot backend state is touched."""

from __future__ import annotations

from matplotlib.figure import Figure

from .measure import MeasureReport


def plot_partition(report: MeasureReport, path) -> None:
    """Bar chart of output-class sizes, annotated with the three measures."""
    fig = Figure(figsize=(6, 3.5), constrained_layout=True)
    ax = fig.add_subplot()
    sizes = list(report.class_sizes)
    ax.bar(range(1, len(sizes) + 1), sizes, color="#4c72b0", width=0.8)
    ax.set_xlabel("output class (by size)")
    ax.set_ylabel("inputs in class")
    ax.set_title(f"{report.program}: N = {report.N}, {len(sizes)} classes")
    ax.text(
        0.98, 0.95,
        f"SE = {report.SE:.5g}\nME = {report.ME:.5g}\nGE = {report.exact_forms['GE']}",
        transform=ax.transAxes, ha="right", va="top", family="monospace",
    )
    if len(sizes) <= 32:
        ax.set_xticks(range(1, len(sizes) + 1))
    fig.savefig(path)


def plot_corpus(reports: list[MeasureReport], path) -> None:
    """Grouped bars of SE, ME and GE per program."""
    fig = Figure(figsize=(max(6, 0.7 * len(reports) + 2), 4), constrained_layout=True)
    ax = fig.add_subplot()
    width = 0.27
    xs = range(len(reports))
    for j, (key, color) in enumerate((("SE", "#4c72b0"), ("ME", "#dd8452"), ("GE", "#55a868"))):
        ax.bar([x + (j - 1) * width for x in xs], [getattr(r, key) for r in reports], width, label=key, color=color)
    ax.set_xticks(list(xs))
    ax.set_xticklabels([r.program for r in reports], rotation=45, ha="right")
    ax.set_ylabel("bits (SE, ME) / guesses (GE)")
    ax.legend()
    fig.savefig(path)
