import pytest

from src.core.storage import JsonlTranscriptStore, SQLiteTranscriptStore, get_storage


@pytest.fixture(params=['jsonl', 'sqlite'])
def store(request, tmp_path):
    path = tmp_path / 'records' / f'transcripts.{request.param}'
    path.parent.mkdir(exist_ok=True)
    return get_storage({'type': request.param, 'path': str(path)})


def test_empty_store(store):
    assert store.get_record_count() == 0
    assert store.get_session_ids() == []
    assert store.get_transcript('missing') == []


def test_rounds_come_back_in_order(store):
    store.append('s1', 2, {'action': 'compile'}, {'reward': 0.54})
    store.append('s1', 1, {'action': 'add_crease'}, {'reward': -0.01})
    store.append('s2', 1, {'action': 'finish'}, {'reward': 1.0})

    rounds = store.get_transcript('s1')
    assert [r['round'] for r in rounds] == [1, 2]
    assert rounds[1]['request'] == {'action': 'compile'}
    assert rounds[1]['response'] == {'reward': 0.54}
    assert set(store.get_session_ids()) == {'s1', 's2'}
    assert store.get_record_count() == 3


def test_store_reopens_existing_records(store):
    store.append('s1', 1, {'action': 'compile'}, {'reward': 0.04})
    again = type(store)(getattr(store, 'path', None) or store.db_path)
    assert again.get_record_count() == 1


def test_sqlite_keeps_first_copy_of_a_round(tmp_path):
    store = SQLiteTranscriptStore(str(tmp_path / 'db.sqlite'))
    store.append('s1', 1, {'action': 'compile'}, {'reward': 0.1})
    store.append('s1', 1, {'action': 'finish'}, {'reward': 0.9})
    (record,) = store.get_transcript('s1')
    assert record['request'] == {'action': 'compile'}


def test_jsonl_skips_malformed_lines(tmp_path):
    path = tmp_path / 'records.jsonl'
    store = JsonlTranscriptStore(str(path))
    store.append('s1', 1, {'action': 'compile'}, {})
    with open(path, 'a', encoding='utf-8') as handle:
        handle.write('{not json\n')
    assert store.get_record_count() == 1


def test_jsonl_creates_missing_directory(tmp_path):
    path = tmp_path / 'nested' / 'dir' / 'records.jsonl'
    JsonlTranscriptStore(str(path))
    assert path.exists()


def test_unknown_store_type(tmp_path):
    with pytest.raises(ValueError):
        get_storage({'type': 'dynamodb', 'path': str(tmp_path)})
