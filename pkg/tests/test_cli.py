import io
import json

import pytest

from src.core import config
from src.runners.cli import EXIT_FAILURE, EXIT_IO, EXIT_OK, main
from tests.conftest import GOLDEN

HALF_CREASE = {'action': 'add_crease', 'segment': [[0.5, 0.0], [0.5, 1.0]], 'assignment': 'V'}


@pytest.fixture
def transcript_store(monkeypatch, tmp_path):
    path = tmp_path / 'transcripts.jsonl'
    monkeypatch.setattr(config, 'STORE_TYPE', 'jsonl')
    monkeypatch.setattr(config, 'STORE_PATH', str(path))
    return path


def _stdin(monkeypatch, records):
    lines = ''.join(json.dumps(r) + '\n' if isinstance(r, dict) else r + '\n' for r in records)
    monkeypatch.setattr('sys.stdin', io.StringIO(lines))


def test_validate(write_cp, half, capsys):
    assert main(['validate', write_cp('half.cp', half)]) == EXIT_OK
    assert '✓' in capsys.readouterr().err


def test_validate_reports_bad_documents(write_cp, tmp_path, capsys):
    out = tmp_path / 'result.json'
    path = write_cp('bad.cp', '{"vertices_coords": [[0, 0]')
    assert main(['validate', path, '--out', str(out)]) == EXIT_FAILURE
    assert 'CSE/E_CP_SYNTAX_UNEXPECTED_TOKEN' in capsys.readouterr().err
    assert json.loads(out.read_text())['valid'] is False


def test_missing_file_is_an_io_error(tmp_path, capsys):
    assert main(['validate', str(tmp_path / 'nope.cp')]) == EXIT_IO
    assert 'I/O error' in capsys.readouterr().err


def test_fold_writes_the_export(write_cp, half, capsys):
    assert main(['fold', write_cp('half.cp', half)]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert set(document) == {'P', 'SP', 'CF'}


def test_fold_failure(write_cp, letter_fold, capsys):
    assert main(['fold', write_cp('letter.cp', letter_fold)]) == EXIT_FAILURE
    assert 'AFS/E_AMBIGUOUS_LAYER_ORDER' in capsys.readouterr().err


def test_fold_respects_layer_cap(write_cp, half, capsys):
    assert main(['fold', write_cp('half.cp', half), '--layer-cap', '1']) == EXIT_FAILURE
    assert 'E_GEOM_TOO_MANY_LAYERS' in capsys.readouterr().err


def test_score_prints_the_total(write_cp, half, tmp_path, capsys):
    path = write_cp('half.cp', half)
    out = tmp_path / 'score.json'
    assert main(['score', path, path, '--out', str(out)]) == EXIT_OK
    captured = capsys.readouterr()
    assert captured.out == 'S_total=1.000000\n'
    assert 'Topological' in captured.err
    assert json.loads(out.read_text())['S_total'] == pytest.approx(1.0)


def test_score_paper_faithful(write_cp, half, capsys):
    path = write_cp('half.cp', half)
    assert main(['score', path, path, '--mode', 'paper-faithful']) == EXIT_OK
    assert capsys.readouterr().out == 'S_total=0.962500\n'


def test_score_exit_codes(write_cp, half, capsys):
    good = write_cp('half.cp', half)
    bad = write_cp('bad.cp', 'nonsense')
    assert main(['score', bad, good]) == EXIT_FAILURE
    assert main(['score', good, bad]) == EXIT_IO


def test_bad_override_is_a_usage_error(write_cp, half, capsys):
    path = write_cp('half.cp', half)
    assert main(['score', path, path, '--k', '0']) == EXIT_IO
    assert 'Configuration error' in capsys.readouterr().err


def test_render_variants(write_cp, half, tmp_path, capsys):
    path = write_cp('half.cp', half)
    assert main(['render', path]) == EXIT_OK
    assert capsys.readouterr().out.startswith('<svg')

    assert main(['render', path, '--folded']) == EXIT_OK
    assert 'data-face' in capsys.readouterr().out

    export = tmp_path / 'half.fold.json'
    assert main(['fold', path, '--out', str(export)]) == EXIT_OK
    assert main(['render', str(export)]) == EXIT_OK
    assert 'data-cell' in capsys.readouterr().out


def test_session_line_protocol(write_cp, half, monkeypatch, capsys, transcript_store):
    ref = write_cp('half.cp', half)
    _stdin(monkeypatch, [HALF_CREASE, {'action': 'compile'}, {'action': 'finish'}])
    assert main(['session', ref, '--session-id', 's1']) == EXIT_OK

    lines = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [line.get('action') for line in lines[:3]] == ['add_crease', 'compile', 'finish']
    assert lines[1]['reward'] == pytest.approx(1.04)
    assert lines[-1]['final_reward'] == pytest.approx(1.0)
    assert lines[-1]['session_id'] == 's1'

    stored = [json.loads(line) for line in transcript_store.read_text().splitlines()]
    assert [r['round'] for r in stored] == [1, 2, 3]

    assert main(['session', ref, '--replay', str(transcript_store)]) == EXIT_OK
    assert 'identically' in capsys.readouterr().err


def test_session_handles_garbage_and_early_eof(write_cp, half, monkeypatch, capsys):
    ref = write_cp('half.cp', half)
    _stdin(monkeypatch, ['this is not json'])
    assert main(['session', ref, '--no-store']) == EXIT_OK
    captured = capsys.readouterr()
    first, final = [json.loads(line) for line in captured.out.splitlines()]
    assert first['diagnostics'][0]['code'] == 'E_CP_SYNTAX_UNKNOWN_COMMAND'
    assert 0.0 < final['final_reward'] < 1.0
    assert 'Input ended' in captured.err


def test_session_round_cap_flag(write_cp, half, monkeypatch, capsys):
    ref = write_cp('half.cp', half)
    _stdin(monkeypatch, [{'action': 'compile'}] * 5)
    assert main(['session', ref, '--no-store', '--rounds', '2']) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 3
    assert json.loads(lines[1])['done'] is True


def test_session_refuses_unfoldable_reference(write_cp, letter_fold, capsys):
    assert main(['session', write_cp('letter.cp', letter_fold), '--no-store']) == EXIT_FAILURE


def test_bench(write_cp, tmp_path, capsys):
    write_cp('plus.gen.cp', GOLDEN['plus_mmmv'])
    write_cp('plus.ref.cp', GOLDEN['plus_mmmv'])
    out = tmp_path / 'bench.json'
    assert main(['bench', str(tmp_path), '--jobs', '2', '--out', str(out)]) == EXIT_OK
    assert 'CPR            1.000000' in capsys.readouterr().out
    document = json.loads(out.read_text())
    assert document['aggregate']['pairs'] == 1
    assert document['pairs'][0]['report']['S_total'] == pytest.approx(1.0)
