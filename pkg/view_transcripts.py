#!/usr/bin/env python3
"""
Simple transcript viewer - shows stored session rounds.

Usage:
    python view_transcripts.py                       # All sessions (configured store)
    python view_transcripts.py --count               # Just show counts
    python view_transcripts.py --session <id>        # One session, round by round
    python view_transcripts.py --store sqlite --path transcripts.db
"""

import argparse
import sys

from src.core import config
from src.core.storage import get_storage


def describe_request(request) -> str:
    """One-line description of an action record."""
    if not isinstance(request, dict):
        return repr(request)
    action = request.get('action', '?')
    if action == 'add_crease':
        return f"add_crease {request.get('segment')} {request.get('assignment')}"
    if action in ('remove_crease', 'set_assignment'):
        extra = f" -> {request['assignment']}" if 'assignment' in request else ''
        return f"{action} edge {request.get('edge')}{extra}"
    return str(action)


def view_session(store, session_id: str) -> None:
    """Display every round of one session."""
    rounds = store.get_transcript(session_id)
    if not rounds:
        print(f"\n📭 No rounds stored for session {session_id}\n")
        return

    print(f"\n{'='*80}")
    print(f"📊 SESSION {session_id}: {len(rounds)} round(s)")
    print(f"{'='*80}\n")

    total = 0.0
    for record in rounds:
        response = record['response']
        total += response.get('reward', 0.0)
        print(f"{record['round']:>3}. {describe_request(record['request'])}")
        partial = response.get('partial_score')
        if partial is not None:
            print(f"     S_partial: {partial:.6f}")
        print(f"     Reward: {response.get('reward', 0.0):+.6f}")
        for diagnostic in response.get('diagnostics', []):
            print(f"     ✗ {diagnostic.get('category')}/{diagnostic.get('code')}")
        if response.get('done'):
            print("     Done")
    print()
    print(f"📈 SUMMARY:")
    print(f"   Rounds: {len(rounds)}")
    print(f"   Total reward: {total:+.6f}\n")


def view_all(store) -> None:
    session_ids = store.get_session_ids()
    if not session_ids:
        print("\n📭 No transcripts stored.")
        print("Run a session first: python -m src.runners.cli session <ref.cp>\n")
        return
    for session_id in session_ids:
        view_session(store, session_id)


def show_count(store) -> None:
    print(f"\n📊 Transcript Statistics:")
    print(f"   Sessions: {len(store.get_session_ids())}")
    print(f"   Rounds stored: {store.get_record_count()}\n")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(
        description='View stored session transcripts'
    )
    parser.add_argument(
        '--count',
        action='store_true',
        help='Show only count statistics'
    )
    parser.add_argument(
        '--session',
        default=None,
        help='Show only this session id'
    )
    parser.add_argument(
        '--store',
        choices=['jsonl', 'sqlite'],
        default=config.STORE_TYPE,
        help=f'Store type (default: {config.STORE_TYPE})'
    )
    parser.add_argument(
        '--path',
        default=config.STORE_PATH,
        help=f'Store location (default: {config.STORE_PATH})'
    )

    args = parser.parse_args()

    try:
        store = get_storage({'type': args.store, 'path': args.path})
    except (OSError, ValueError) as e:
        print(f"❌ Cannot open transcript store: {e}")
        sys.exit(2)

    if args.count:
        show_count(store)
    elif args.session:
        view_session(store, args.session)
    else:
        view_all(store)
