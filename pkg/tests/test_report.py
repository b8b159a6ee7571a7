from src.core.bench import BenchAggregate, PairResult, aggregate
from src.core.evaluator import score_total
from src.core.report import format_bench_table, format_score_summary, format_total_line


def test_total_line(half):
    assert format_total_line(score_total(half, half)) == 'S_total=1.000000'


def test_score_summary_lists_dimensions_and_fallbacks(half, maekawa_broken):
    text = format_score_summary(score_total(half, half))
    for label in ('Topological', 'Geometric', 'Foldability', 'Final state'):
        assert label in text
    assert 'Fallbacks' not in text

    text = format_score_summary(score_total(maekawa_broken, half))
    assert 'cs:gate' in text
    assert 's_TT=n/a' in text
    assert 'E_GEOM_ANGLE_CONSTRAINT_VIOLATION' in text


def test_bench_table_rows(half):
    report = score_total(half, half)
    results = [PairResult('half', True, [], report), PairResult('broken', False, ['CSE'])]
    text = format_bench_table(aggregate(results), results)
    lines = text.splitlines()
    assert lines[0].startswith('pair')
    assert 'half' in lines[1] and '1.000000' in lines[1]
    assert 'broken' in lines[2] and 'n/a' in lines[2] and 'CSE' in lines[2]
    assert 'CPR            0.500000' in text


def test_empty_bench_table():
    assert 'No pairs to aggregate' in format_bench_table(BenchAggregate())
