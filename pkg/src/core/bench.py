"""
Bench module - batch scoring of generated/reference CP pairs.

A bench directory holds <name>.gen.cp and <name>.ref.cp files. Every pair
is scored independently; the aggregate reports the compilation pass rate,
per-category error incidence and the mean of every score dimension.
"""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from src.core.config import EvalConfig
from src.core.cp_model import parse_cp
from src.core.diagnostics import CATEGORIES, CompileError, Diagnostic, categories_of
from src.core.evaluator import ScoreReport, compile_cp, score_compiled

logger = logging.getLogger(__name__)

GEN_SUFFIX = '.gen.cp'
REF_SUFFIX = '.ref.cp'
DIMENSIONS = ('S_topological', 'S_geometric', 'S_foldability', 'S_final_state', 'S_total')


@dataclass(frozen=True)
class BenchPair:
    name: str
    gen_path: str
    ref_path: str


@dataclass
class PairResult:
    """Outcome for one pair; report is None when the generated CP did not parse."""
    name: str
    compiled: bool
    categories: List[str]
    report: Optional[ScoreReport] = None
    diagnostics: List[Diagnostic] = field(default_factory=list)


@dataclass
class BenchAggregate:
    pairs: int = 0
    scored: int = 0
    skipped: int = 0
    # fraction of pairs that folded
    cpr: float = 0.0
    incidence: Dict[str, float] = field(default_factory=dict)
    no_error: Dict[str, float] = field(default_factory=dict)
    means: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            'pairs': self.pairs,
            'scored': self.scored,
            'skipped': self.skipped,
            'CPR': self.cpr,
            'incidence': dict(self.incidence),
            'no_error': dict(self.no_error),
            'means': dict(self.means),
        }


class BenchRunner:
    """Collects pairs from a directory and scores them concurrently."""

    def __init__(self, config: Optional[EvalConfig] = None, jobs: int = 1):
        self.config = config or EvalConfig()
        self.jobs = max(1, jobs)
        self.skipped = 0

    def collect_pairs(self, directory: str) -> List[BenchPair]:
        """
        Find every complete <name>.gen.cp / <name>.ref.cp pair.

        Args:
            directory: Bench directory

        Returns:
            Pairs sorted by name; half pairs are skipped and counted
        """
        names = sorted(os.listdir(directory))
        gens = {n[: -len(GEN_SUFFIX)] for n in names if n.endswith(GEN_SUFFIX)}
        refs = {n[: -len(REF_SUFFIX)] for n in names if n.endswith(REF_SUFFIX)}

        for orphan in sorted(gens ^ refs):
            logger.warning('Skipping %s: missing %s', orphan,
                           REF_SUFFIX if orphan in gens else GEN_SUFFIX)
            self.skipped += 1

        return [
            BenchPair(name,
                      os.path.join(directory, name + GEN_SUFFIX),
                      os.path.join(directory, name + REF_SUFFIX))
            for name in sorted(gens & refs)
        ]

    def score_pair(self, pair: BenchPair) -> Optional[PairResult]:
        """Score one pair; None when the reference is unusable."""
        try:
            with open(pair.ref_path, encoding='utf-8') as handle:
                ref = parse_cp(handle.read())
            with open(pair.gen_path, encoding='utf-8') as handle:
                gen_text = handle.read()
        except (OSError, UnicodeDecodeError, CompileError) as e:
            logger.warning('Skipping %s: %s', pair.name, e)
            return None

        try:
            gen = parse_cp(gen_text)
        except CompileError as e:
            return PairResult(pair.name, False, e.categories, diagnostics=list(e.diagnostics))

        gen_compiled = compile_cp(gen, self.config.fold)
        ref_compiled = compile_cp(ref, self.config.fold)
        report = score_compiled(gen_compiled, ref_compiled, self.config)
        return PairResult(
            name=pair.name,
            compiled=gen_compiled.foldable,
            categories=categories_of(gen_compiled.diagnostics),
            report=report,
            diagnostics=list(gen_compiled.diagnostics),
        )

    def run(self, directory: str) -> Tuple[List[PairResult], BenchAggregate]:
        """Score every pair in a directory and aggregate."""
        self.skipped = 0
        pairs = self.collect_pairs(directory)
        if not pairs:
            logger.warning('No complete pairs found in %s', directory)

        with ThreadPoolExecutor(max_workers=self.jobs) as pool:
            outcomes = list(pool.map(self.score_pair, pairs))

        results = [r for r in outcomes if r is not None]
        self.skipped += len(outcomes) - len(results)
        results.sort(key=lambda r: r.name)
        return results, aggregate(results, skipped=self.skipped)


def aggregate(results: List[PairResult], skipped: int = 0) -> BenchAggregate:
    """Order-independent summary of per-pair results."""
    total = len(results)
    summary = BenchAggregate(pairs=total, skipped=skipped)
    if not total:
        return summary

    summary.cpr = sum(1 for r in results if r.compiled) / total
    for category in CATEGORIES:
        hit = sum(1 for r in results if category in r.categories) / total
        summary.incidence[category] = hit
        summary.no_error[category] = 1.0 - hit

    reports = [r.report for r in results if r.report is not None]
    summary.scored = len(reports)
    if reports:
        for name in DIMENSIONS[:-1]:
            summary.means[name] = math.fsum(rep.dimensions[name] for rep in reports) / len(reports)
        summary.means['S_total'] = math.fsum(rep.total for rep in reports) / len(reports)
    return summary
