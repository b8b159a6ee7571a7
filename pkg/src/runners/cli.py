#!/usr/bin/env python3
"""
Command-line runner for CPForge.

Subcommands: validate, fold, score, render, session, bench.
The crease-pattern logic is in src/core; this is just the entry point.

Exit codes: 0 success, 1 compile/score failure, 2 I/O or usage error.
Documents and the session line protocol go to stdout; progress and
diagnostics go to stderr.
"""

import argparse
import json
import logging
import sys
import uuid
from dataclasses import replace
from typing import Dict, List, Optional

from src.core import config
from src.core.bench import BenchRunner
from src.core.config import validate_config
from src.core.cp_model import parse_cp, validate_structure
from src.core.diagnostics import CompileError, Diagnostic, render_diagnostic
from src.core.evaluator import score_total
from src.core.folder import export_state, fold
from src.core.render import render_cp, render_export, render_state
from src.core.report import format_bench_table, format_score_summary, format_total_line
from src.core.session import SessionError, apply_action, replay, session_final, session_new
from src.core.storage import get_storage

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_IO = 2


def _err(message: str) -> None:
    print(message, file=sys.stderr)


def _print_diagnostics(diagnostics) -> None:
    for d in diagnostics:
        _err(f"✗ {render_diagnostic(d)[0]}")


def _read(path: str) -> str:
    with open(path, encoding='utf-8') as handle:
        return handle.read()


def _write(path: Optional[str], text: str) -> None:
    """Write to path, or to stdout when no path is given."""
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(text)


def _document(data: Dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + '\n'


def _records(diagnostics: List[Diagnostic]) -> List[Dict]:
    return [render_diagnostic(d)[1] for d in diagnostics]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--mode', choices=config.MODES, default=None,
                        help='Evaluator mode (default: CPFORGE_MODE)')
    common.add_argument('--k', type=float, default=None,
                        help='Hausdorff sensitivity (default: CPFORGE_K)')
    common.add_argument('--layer-cap', type=int, default=None,
                        help='Max layers per overlap cell (default: CPFORGE_LAYER_CAP)')
    common.add_argument('--rounds', type=int, default=None,
                        help='Session round cap (default: CPFORGE_ROUNDS)')
    common.add_argument('--jobs', type=int, default=None,
                        help='Bench concurrency (default: CPFORGE_JOBS)')
    common.add_argument('--auto-complete', action='store_true',
                        help='Assign unassigned creases automatically when folding')
    common.add_argument('--out', default=None, help='Output path (default: stdout)')

    parser = argparse.ArgumentParser(
        prog='cpforge',
        description='CPForge - crease pattern compiler and evaluator'
    )
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('validate', parents=[common], help='Check a CP file structurally')
    p.add_argument('cp', help='CP document')

    p = sub.add_parser('fold', parents=[common], help='Compile a CP into its folded state')
    p.add_argument('cp', help='CP document')

    p = sub.add_parser('score', parents=[common], help='Score a generated CP against a reference')
    p.add_argument('gen', help='Generated CP document')
    p.add_argument('ref', help='Reference CP document')

    p = sub.add_parser('render', parents=[common], help='Render a CP or folded export as SVG')
    p.add_argument('input', help='CP document or folded export document')
    p.add_argument('--folded', action='store_true', help='Fold the CP and draw the folded state')

    p = sub.add_parser('session', parents=[common],
                       help='Interactive session: action records on stdin, feedback on stdout')
    p.add_argument('ref', help='Reference CP document')
    p.add_argument('--replay', metavar='TRANSCRIPT', default=None,
                   help='Replay a stored JSONL transcript and compare every response')
    p.add_argument('--session-id', default=None, help='Session id (default: random)')
    p.add_argument('--no-store', action='store_true', help='Do not persist the transcript')

    p = sub.add_parser('bench', parents=[common], help='Score every <name>.gen.cp/<name>.ref.cp pair')
    p.add_argument('directory', help='Bench directory')
    return parser


def _configs(args):
    fold_cfg = config.get_fold_config()
    if args.layer_cap is not None:
        fold_cfg = replace(fold_cfg, layer_cap=args.layer_cap)
    if args.auto_complete:
        fold_cfg = replace(fold_cfg, auto_complete=True)

    eval_cfg = replace(config.get_eval_config(), fold=fold_cfg)
    if args.mode is not None:
        eval_cfg = replace(eval_cfg, mode=args.mode)
    if args.k is not None:
        eval_cfg = replace(eval_cfg, k=args.k)

    session_cfg = replace(config.get_session_config(), eval=eval_cfg)
    if args.rounds is not None:
        session_cfg = replace(session_cfg, round_cap=args.rounds)
    return fold_cfg, eval_cfg, session_cfg


def _check_overrides(args) -> None:
    problems = []
    if args.k is not None and args.k <= 0:
        problems.append('--k must be > 0')
    for flag, value in (('--layer-cap', args.layer_cap), ('--rounds', args.rounds),
                        ('--jobs', args.jobs)):
        if value is not None and value < 1:
            problems.append(f'{flag} must be >= 1')
    if problems:
        raise ValueError('; '.join(problems))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    text = _read(args.cp)
    try:
        cp = parse_cp(text)
    except CompileError as e:
        _print_diagnostics(e.diagnostics)
        if args.out:
            _write(args.out, _document({'valid': False, 'diagnostics': _records(e.diagnostics)}))
        return EXIT_FAILURE

    report = validate_structure(cp)
    _print_diagnostics(report.diagnostics)
    if args.out:
        _write(args.out, _document({'valid': report.valid,
                                    'diagnostics': _records(list(report.diagnostics))}))
    if report.valid:
        _err(f"✓ {args.cp} is valid ({cp.num_vertices} vertices, "
             f"{cp.num_edges} edges, {cp.num_faces} faces)")
        return EXIT_OK
    return EXIT_FAILURE


def cmd_fold(args, fold_cfg) -> int:
    try:
        state = fold(parse_cp(_read(args.cp)), fold_cfg)
    except CompileError as e:
        _print_diagnostics(e.diagnostics)
        return EXIT_FAILURE
    _write(args.out, _document(export_state(state)))
    _err(f"✓ Folded {args.cp}: {len(state.cells)} overlap cell(s)")
    return EXIT_OK


def cmd_score(args, eval_cfg) -> int:
    try:
        gen = parse_cp(_read(args.gen))
    except CompileError as e:
        _print_diagnostics(e.diagnostics)
        return EXIT_FAILURE
    try:
        ref = parse_cp(_read(args.ref))
    except CompileError as e:
        _err(f"✗ Reference {args.ref} does not parse")
        _print_diagnostics(e.diagnostics)
        return EXIT_IO

    report = score_total(gen, ref, eval_cfg)
    if args.out:
        _write(args.out, _document(report.to_dict()))
    _err(format_score_summary(report))
    print(format_total_line(report))
    return EXIT_OK


def cmd_render(args, fold_cfg) -> int:
    text = _read(args.input)
    try:
        document = json.loads(text)
    except json.JSONDecodeError:
        document = None
    if isinstance(document, dict) and 'SP' in document and 'P' in document:
        _write(args.out, render_export(document))
        return EXIT_OK

    try:
        cp = parse_cp(text)
        svg = render_state(fold(cp, fold_cfg)) if args.folded else render_cp(cp)
    except CompileError as e:
        _print_diagnostics(e.diagnostics)
        return EXIT_FAILURE
    _write(args.out, svg)
    return EXIT_OK


def _load_transcript(path: str, session_id: Optional[str]) -> List[Dict]:
    records = [json.loads(line) for line in _read(path).splitlines() if line.strip()]
    if session_id is None and records:
        session_id = records[0].get('session_id')
    chosen = [r for r in records if r.get('session_id') == session_id]
    return sorted(chosen, key=lambda r: r['round'])


def _replay(args, session_cfg, reference) -> int:
    transcript = _load_transcript(args.replay, args.session_id)
    feedback = replay(reference, [r['request'] for r in transcript], session_cfg)
    mismatches = 0
    for record, fb in zip(transcript, feedback):
        fresh = json.loads(json.dumps(fb.to_record()))
        if fresh != record['response']:
            mismatches += 1
            _err(f"✗ Round {record['round']} differs")
    if len(feedback) != len(transcript):
        mismatches += 1
        _err(f"✗ Replayed {len(feedback)} of {len(transcript)} round(s)")
    if mismatches:
        return EXIT_FAILURE
    _err(f"✓ Replayed {len(feedback)} round(s) identically")
    return EXIT_OK


def cmd_session(args, session_cfg) -> int:
    try:
        reference = parse_cp(_read(args.ref))
        if args.replay:
            return _replay(args, session_cfg, reference)
        state = session_new(reference, session_cfg)
    except CompileError as e:
        _err('✗ Reference does not fold; session refused')
        _print_diagnostics(e.diagnostics)
        return EXIT_FAILURE

    session_id = args.session_id or uuid.uuid4().hex
    store = None if args.no_store else get_storage()
    _err(f"✓ Session {session_id} started ({state.round_cap} rounds)")

    for line in sys.stdin:
        if not line.strip():
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError as e:
            request = {'action': 'invalid', 'raw': line.strip(), 'error': str(e)}
        try:
            feedback = apply_action(state, request)
        except SessionError as e:
            _err(f"✗ {e}")
            break
        response = feedback.to_record()
        if store is not None:
            store.append(session_id, feedback.round, request, response)
        print(json.dumps(response, sort_keys=True), flush=True)
        if feedback.done:
            break

    if not state.done:
        _err('⚠️  Input ended before the session finished')
        state.done = True
    reward, report = session_final(state)
    print(json.dumps({'final_reward': reward, 'report': report.to_dict(),
                      'session_id': session_id}, sort_keys=True))
    return EXIT_OK


def cmd_bench(args, eval_cfg) -> int:
    jobs = args.jobs if args.jobs is not None else config.JOBS
    runner = BenchRunner(eval_cfg, jobs=jobs)
    results, summary = runner.run(args.directory)
    if not results:
        _err(f"⚠️  No scorable pairs in {args.directory}")
    if args.out:
        _write(args.out, _document({
            'aggregate': summary.to_dict(),
            'pairs': [
                {
                    'name': r.name,
                    'compiled': r.compiled,
                    'categories': r.categories,
                    'report': r.report.to_dict() if r.report else None,
                }
                for r in results
            ],
        }))
    print(format_bench_table(summary, results), end='')
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch the subcommand and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, str(config.LOG_LEVEL).upper(), logging.WARNING),
        format='%(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )

    # Validate configuration
    try:
        validate_config()
        _check_overrides(args)
    except ValueError as e:
        _err(f"❌ Configuration error: {e}")
        return EXIT_IO

    fold_cfg, eval_cfg, session_cfg = _configs(args)
    try:
        if args.command == 'validate':
            return cmd_validate(args)
        if args.command == 'fold':
            return cmd_fold(args, fold_cfg)
        if args.command == 'score':
            return cmd_score(args, eval_cfg)
        if args.command == 'render':
            return cmd_render(args, fold_cfg)
        if args.command == 'session':
            return cmd_session(args, session_cfg)
        return cmd_bench(args, eval_cfg)
    except (OSError, UnicodeDecodeError) as e:
        _err(f"✗ I/O error: {e}")
        return EXIT_IO


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n\n⚠️  Interrupted by user", file=sys.stderr)
        sys.exit(0)
    except Exception as e:
        print(f"\n❌ Error: {e}", file=sys.stderr)
        import traceback
        traceback.print_exc()
        sys.exit(1)
