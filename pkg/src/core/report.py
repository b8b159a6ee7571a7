"""
Report module - plain-text summaries of scores and bench runs.

Scores are shown with 6 decimals; documents keep full precision.
"""

from typing import List, Optional

from src.core.bench import DIMENSIONS, BenchAggregate, PairResult
from src.core.diagnostics import CATEGORIES
from src.core.evaluator import ScoreReport


def _num(value: Optional[float]) -> str:
    return 'n/a' if value is None else f"{value:.6f}"


def format_total_line(report: ScoreReport) -> str:
    """One-line summary, e.g. "S_total=1.000000"."""
    return f"S_total={report.total:.6f}"


def format_score_summary(report: ScoreReport) -> str:
    """
    Format a ScoreReport as a readable block.

    Args:
        report: Score report

    Returns:
        Multi-line summary with dimension scores, sub-scores and fallbacks
    """
    tss, gs, cs, ffs = report.tss, report.gs, report.cs, report.ffs
    body = f"📊 Score ({report.mode} mode)\n"
    body += "=" * 50 + "\n"
    body += f"  Topological    {_num(tss.score)}\n"
    body += (f"    s_v={_num(tss.s_v)} s_edge={_num(tss.s_edge)} "
             f"s_face={_num(tss.s_face)} s_crease={_num(tss.s_crease)}\n")
    body += f"  Geometric      {_num(gs.score)}\n"
    body += (f"    s_point={_num(gs.s_point)} s_angle={_num(gs.s_angle)} "
             f"s_size={_num(gs.s_size)}\n")
    body += f"  Foldability    {_num(cs.score)}\n"
    body += (f"    s_TT={_num(cs.s_TT)} s_TTo={_num(cs.s_TTo)} "
             f"s_Trans={_num(cs.s_Trans)} s_flatfold={_num(cs.s_flatfold)}\n")
    body += f"  Final state    {_num(ffs.score)}\n"
    body += f"    s_shape={_num(ffs.s_shape)} s_layer={_num(ffs.s_layer)}\n"
    body += "-" * 50 + "\n"
    body += f"  {format_total_line(report)}\n"

    if report.fallbacks:
        body += f"  Fallbacks: {', '.join(report.fallbacks)}\n"
    if report.diagnostics:
        codes = sorted({d.code for d in report.diagnostics})
        body += f"  Diagnostics: {', '.join(codes)}\n"
    return body


def format_bench_table(summary: BenchAggregate, results: Optional[List[PairResult]] = None) -> str:
    """
    Format a bench aggregate, optionally preceded by one row per pair.

    Incidence is the fraction of pairs with an error of that category;
    "no error" is its complement.
    """
    body = ""
    if results:
        body += f"{'pair':<24} {'compiled':<9} {'S_total':>9}  errors\n"
        for r in results:
            total = _num(r.report.total if r.report else None)
            errors = ','.join(r.categories) or '-'
            body += f"{r.name:<24} {'yes' if r.compiled else 'no':<9} {total:>9}  {errors}\n"
        body += "\n"

    body += f"📊 Bench: {summary.pairs} pair(s), {summary.scored} scored, {summary.skipped} skipped\n"
    if not summary.pairs:
        return body + "  No pairs to aggregate\n"

    body += f"  CPR            {summary.cpr:.6f}\n"
    for category in CATEGORIES:
        body += (f"  {category:<4} incidence {summary.incidence[category]:.6f}"
                 f"  no error {summary.no_error[category]:.6f}\n")
    for name in DIMENSIONS:
        if name in summary.means:
            body += f"  {name:<15}{summary.means[name]:.6f}\n"
    return body
