import pytest

from src.core.config import SessionConfig
from src.core.diagnostics import CompileError
from src.core.session import (
    AddCrease,
    Compile,
    Finish,
    SessionError,
    apply_action,
    compute_reward,
    parse_action,
    replay,
    session_final,
    session_new,
)
from tests.conftest import edge_between, half_fold, plus_cp

HALF_CREASE = {'action': 'add_crease', 'segment': [[0.5, 0.0], [0.5, 1.0]], 'assignment': 'V'}


def _codes(feedback):
    return [d.code for d in feedback.diagnostics]


def test_new_session_starts_from_the_bare_sheet(half):
    state = session_new(half)
    assert (state.draft.num_vertices, state.draft.num_edges) == (4, 4)
    assert set(state.draft.edges_assignment) == {'B'}
    assert state.rounds_remaining == 10
    assert not state.done


def test_unfoldable_reference_is_rejected(letter_fold):
    with pytest.raises(CompileError):
        session_new(letter_fold)


def test_exact_crease_scores_perfectly(half):
    state = session_new(half)
    added = apply_action(state, HALF_CREASE)
    assert added.reward == pytest.approx(-0.01)
    assert added.diagnostics == ()
    assert state.draft == state.reference

    compiled = apply_action(state, {'action': 'compile'})
    assert compiled.partial_score == pytest.approx(1.0)
    assert compiled.reward == pytest.approx(1.04)
    assert state.prev_partial == pytest.approx(1.0)

    finished = apply_action(state, Finish())
    assert finished.done
    assert finished.reward == pytest.approx(1.0)
    total, report = session_final(state)
    assert total == pytest.approx(1.0)
    assert report.total == total


def test_failed_compile_costs_the_failure_penalty():
    state = session_new(plus_cp('M', 'M', 'M', 'V'))
    for end in ([1.0, 0.5], [0.5, 1.0], [0.0, 0.5], [0.5, 0.0]):
        feedback = apply_action(state, AddCrease(((0.5, 0.5), tuple(end)), 'M'))
        assert feedback.diagnostics == ()
    compiled = apply_action(state, Compile())
    assert compiled.reward == pytest.approx(-0.11)
    assert _codes(compiled) == ['E_GEOM_ANGLE_CONSTRAINT_VIOLATION']
    assert state.ledger[-1].compile_ok is False
    assert 0.0 < compiled.partial_score < 1.0


def test_second_compile_rewards_progress_only(half):
    state = session_new(half)
    first = apply_action(state, Compile())
    apply_action(state, HALF_CREASE)
    second = apply_action(state, Compile())
    assert second.reward == pytest.approx(second.partial_score - first.partial_score + 0.04)


def test_unknown_action_costs_a_round(half):
    state = session_new(half)
    feedback = apply_action(state, {'action': 'jump'})
    assert _codes(feedback) == ['E_CP_SYNTAX_UNKNOWN_COMMAND']
    assert feedback.reward == pytest.approx(-0.01)
    assert feedback.round == 1
    assert state.draft.num_edges == 4


def test_non_dict_action_is_rejected(half):
    state = session_new(half)
    feedback = apply_action(state, 'compile')
    assert feedback.action == 'invalid'
    assert _codes(feedback) == ['E_CP_SYNTAX_INVALID_PARAM_TYPE']


@pytest.mark.parametrize('record, code', [
    ({'action': 'add_crease', 'segment': [[0.5, 0.0], [0.5, 1.0]], 'assignment': 'B'},
     'E_CP_SYNTAX_INVALID_PARAM_TYPE'),
    ({'action': 'add_crease', 'segment': [[0.5, 0.0], [0.5, 2.0]], 'assignment': 'V'},
     'E_GEOM_CREASE_PLACEMENT_INVALID'),
    ({'action': 'add_crease', 'segment': [[0.5, 0.5], [0.5, 0.5]], 'assignment': 'V'},
     'E_GEOM_CREASE_PLACEMENT_INVALID'),
    ({'action': 'add_crease', 'segment': [[0.5, 0.0]], 'assignment': 'V'},
     'E_CP_SYNTAX_INVALID_PARAM_TYPE'),
    ({'action': 'add_crease', 'assignment': 'V'}, 'E_CP_SYNTAX_INVALID_PARAM_COUNT'),
    ({'action': 'remove_crease', 'edge': 0}, 'E_GEOM_CREASE_PLACEMENT_INVALID'),
    ({'action': 'remove_crease', 'edge': 42}, 'E_CP_SYNTAX_INVALID_LINE_REFERENCE'),
    ({'action': 'remove_crease', 'edge': '1'}, 'E_CP_SYNTAX_INVALID_PARAM_TYPE'),
    ({'action': 'set_assignment', 'edge': 0, 'assignment': 'M'}, 'E_GEOM_CREASE_PLACEMENT_INVALID'),
])
def test_invalid_edits_leave_the_draft(half, record, code):
    state = session_new(half)
    before = state.draft
    feedback = apply_action(state, record)
    assert _codes(feedback) == [code]
    assert feedback.reward == pytest.approx(-0.01)
    assert state.draft == before


def test_remove_and_relabel(half):
    state = session_new(half)
    apply_action(state, HALF_CREASE)
    crease = edge_between(state.draft, (0.5, 0.0), (0.5, 1.0))

    apply_action(state, {'action': 'set_assignment', 'edge': crease, 'assignment': 'M'})
    assert state.draft.edges_assignment[crease] == 'M'

    feedback = apply_action(state, {'action': 'set_assignment', 'edge': crease, 'assignment': 'B'})
    assert _codes(feedback) == ['E_GEOM_CREASE_PLACEMENT_INVALID']

    apply_action(state, {'action': 'remove_crease', 'edge': crease})
    assert (state.draft.num_vertices, state.draft.num_edges) == (4, 4)


def test_round_cap_ends_the_session(half):
    state = session_new(half, SessionConfig(round_cap=2))
    assert not apply_action(state, Compile()).done
    last = apply_action(state, {'action': 'jump'})
    assert last.done
    assert last.rounds_remaining == 0
    with pytest.raises(SessionError):
        apply_action(state, Compile())
    total, report = session_final(state)
    assert total == report.total
    assert 0.0 < total < 1.0


def test_final_requires_a_finished_session(half):
    with pytest.raises(SessionError):
        session_final(session_new(half))


def test_compute_reward():
    assert compute_reward(None, 0.5, True) == pytest.approx(0.54)
    assert compute_reward(0.5, 0.25, True) == pytest.approx(-0.21)
    assert compute_reward(0.5, 0.9, False) == pytest.approx(-0.11)
    config = SessionConfig(b_success=0.0, c_step=0.0)
    assert compute_reward(0.2, 0.7, True, config) == pytest.approx(0.5)


def test_parse_action_builds_typed_actions():
    action = parse_action(dict(HALF_CREASE, note='first crease'))
    assert isinstance(action, AddCrease)
    assert action.segment == ((0.5, 0.0), (0.5, 1.0))
    assert action.note == 'first crease'
    assert isinstance(parse_action({'action': 'finish'}), Finish)


def test_feedback_record(half):
    state = session_new(half)
    record = apply_action(state, {'action': 'jump'}).to_record()
    assert record['action'] == 'jump'
    assert record['rounds_remaining'] == 9
    assert record['diagnostics'][0]['category'] == 'CSE'
    assert record['partial_score'] is None


def test_replay_is_deterministic(half):
    actions = [HALF_CREASE, {'action': 'compile'}, {'action': 'finish'}]
    first = replay(half, actions)
    second = replay(half, actions)
    assert [f.reward for f in first] == [f.reward for f in second]
    assert first[-1].done
    assert replay(half, actions + [{'action': 'compile'}]) == first


def test_ledger_totals(half):
    state = session_new(half)
    apply_action(state, HALF_CREASE)
    apply_action(state, Compile())
    assert [entry.action for entry in state.ledger] == ['add_crease', 'compile']
    assert state.total_reward == pytest.approx(1.03)
