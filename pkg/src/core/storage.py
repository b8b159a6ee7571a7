"""
Storage module - persists session transcripts.

Supports an append-only JSONL record file (default) and SQLite.
Each record is one round of one session: the request and the response.
"""

import json
import logging
import os
import sqlite3
from typing import Dict, List, Protocol

from src.core import config

logger = logging.getLogger(__name__)


class TranscriptStore(Protocol):
    """Interface that all transcript stores must follow."""

    def init_store(self) -> None: ...
    def append(self, session_id: str, round: int, request: Dict, response: Dict) -> None: ...
    def get_transcript(self, session_id: str) -> List[Dict]: ...
    def get_session_ids(self) -> List[str]: ...
    def get_record_count(self) -> int: ...


class JsonlTranscriptStore:
    """Append-only newline-delimited JSON file."""

    def __init__(self, path: str):
        self.path = path
        self.init_store()

    def init_store(self) -> None:
        """Create the record file (and its directory) if missing."""
        directory = os.path.dirname(self.path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        if not os.path.exists(self.path):
            open(self.path, 'a', encoding='utf-8').close()
            logger.info('Transcript store initialized at %s', self.path)

    def append(self, session_id: str, round: int, request: Dict, response: Dict) -> None:
        record = {
            'session_id': session_id,
            'round': round,
            'request': request,
            'response': response,
        }
        with open(self.path, 'a', encoding='utf-8') as handle:
            handle.write(json.dumps(record, sort_keys=True) + '\n')

    def _records(self) -> List[Dict]:
        records = []
        with open(self.path, encoding='utf-8') as handle:
            for number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError:
                    logger.warning('Skipping malformed record at %s:%d', self.path, number)
        return records

    def get_transcript(self, session_id: str) -> List[Dict]:
        """All rounds of one session, in round order."""
        rounds = [r for r in self._records() if r.get('session_id') == session_id]
        return sorted(rounds, key=lambda r: r['round'])

    def get_session_ids(self) -> List[str]:
        seen: Dict[str, None] = {}
        for record in self._records():
            seen.setdefault(record.get('session_id'), None)
        return list(seen)

    def get_record_count(self) -> int:
        return len(self._records())


class SQLiteTranscriptStore:
    """SQLite implementation; one row per session round."""

    def __init__(self, db_path: str):
        self.db_path = db_path
        self.init_store()

    def init_store(self) -> None:
        """Initialize the database with the transcripts table."""
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute('''
            CREATE TABLE IF NOT EXISTS transcripts (
                session_id TEXT NOT NULL,
                round INTEGER NOT NULL,
                request TEXT NOT NULL,
                response TEXT NOT NULL,
                recorded_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
                PRIMARY KEY (session_id, round)
            )
        ''')

        conn.commit()
        conn.close()
        logger.info('Transcript database initialized at %s', self.db_path)

    def append(self, session_id: str, round: int, request: Dict, response: Dict) -> None:
        """Add one round; a repeated (session, round) keeps the first record."""
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        try:
            cursor.execute('''
                INSERT INTO transcripts (session_id, round, request, response)
                VALUES (?, ?, ?, ?)
            ''', (
                session_id,
                round,
                json.dumps(request, sort_keys=True),
                json.dumps(response, sort_keys=True)
            ))
            conn.commit()
        except sqlite3.IntegrityError:
            logger.warning('Round %d of session %s already stored', round, session_id)
        finally:
            conn.close()

    def get_transcript(self, session_id: str) -> List[Dict]:
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        cursor = conn.cursor()

        cursor.execute(
            'SELECT session_id, round, request, response FROM transcripts '
            'WHERE session_id = ? ORDER BY round',
            (session_id,)
        )
        rows = cursor.fetchall()
        conn.close()

        return [
            {
                'session_id': row['session_id'],
                'round': row['round'],
                'request': json.loads(row['request']),
                'response': json.loads(row['response']),
            }
            for row in rows
        ]

    def get_session_ids(self) -> List[str]:
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute(
            'SELECT session_id FROM transcripts GROUP BY session_id ORDER BY MIN(recorded_at), session_id'
        )
        ids = [row[0] for row in cursor.fetchall()]

        conn.close()
        return ids

    def get_record_count(self) -> int:
        """Get total number of stored rounds."""
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute('SELECT COUNT(*) FROM transcripts')
        count = cursor.fetchone()[0]

        conn.close()
        return count


def get_storage(store_config: Dict = None) -> TranscriptStore:
    """
    Factory function to get the configured transcript store.

    Args:
        store_config: {'type', 'path'}; defaults to config.get_store_config()
    """
    store_config = store_config or config.get_store_config()

    if store_config['type'] == 'jsonl':
        return JsonlTranscriptStore(store_config['path'])
    elif store_config['type'] == 'sqlite':
        return SQLiteTranscriptStore(store_config['path'])
    else:
        raise ValueError(f"Unknown transcript store type: {store_config['type']}")
