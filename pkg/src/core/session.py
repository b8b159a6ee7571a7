"""
Session module - interactive CP construction against a reference.

An agent edits a draft (add/remove creases, relabel edges), compiles it for
feedback and a shaped reward, and finishes to receive the final score.
Every action, valid or not, consumes one round.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

from shapely.geometry import LineString, Point
from shapely.geometry.polygon import orient

from src.core.config import SessionConfig
from src.core.cp_model import (
    ASSIGNMENTS,
    CreasePattern,
    boundary_polygon,
    build_cp,
    canonicalize_cp,
    with_assignment,
)
from src.core.diagnostics import CompileError, Diagnostic, make_diagnostic, render_diagnostic
from src.core.evaluator import Compilation, ScoreReport, compile_cp, partial_score, score_compiled

logger = logging.getLogger(__name__)

ACTIONS = ('add_crease', 'remove_crease', 'set_assignment', 'compile', 'finish')
CREASE_CODES = ('M', 'V', 'F', 'U')


class SessionError(RuntimeError):
    """Raised on protocol violations, e.g. an action after the session ended."""


@dataclass(frozen=True)
class AddCrease:
    segment: Tuple[Tuple[float, float], Tuple[float, float]]
    assignment: str
    note: Optional[str] = None
    name = 'add_crease'


@dataclass(frozen=True)
class RemoveCrease:
    edge: int
    note: Optional[str] = None
    name = 'remove_crease'


@dataclass(frozen=True)
class SetAssignment:
    edge: int
    assignment: str
    note: Optional[str] = None
    name = 'set_assignment'


@dataclass(frozen=True)
class Compile:
    note: Optional[str] = None
    name = 'compile'


@dataclass(frozen=True)
class Finish:
    note: Optional[str] = None
    name = 'finish'


Action = Union[AddCrease, RemoveCrease, SetAssignment, Compile, Finish]
ACTION_TYPES = (AddCrease, RemoveCrease, SetAssignment, Compile, Finish)


@dataclass(frozen=True)
class Feedback:
    """Response to one action."""
    action: str
    round: int
    diagnostics: Tuple[Diagnostic, ...] = ()
    partial_score: Optional[float] = None
    reward: float = 0.0
    rounds_remaining: int = 0
    done: bool = False

    def to_record(self) -> Dict[str, Any]:
        return {
            'action': self.action,
            'round': self.round,
            'diagnostics': [render_diagnostic(d)[1] for d in self.diagnostics],
            'partial_score': self.partial_score,
            'reward': self.reward,
            'rounds_remaining': self.rounds_remaining,
            'done': self.done,
        }


@dataclass(frozen=True)
class LedgerEntry:
    round: int
    action: str
    reward: float
    compile_ok: Optional[bool] = None


@dataclass
class SessionState:
    """Mutable, single-owner state of one session."""
    reference: CreasePattern
    reference_compilation: Compilation
    draft: CreasePattern
    config: SessionConfig = field(default_factory=SessionConfig)
    round: int = 0
    prev_partial: Optional[float] = None
    ledger: List[LedgerEntry] = field(default_factory=list)
    done: bool = False
    final_report: Optional[ScoreReport] = None

    @property
    def round_cap(self) -> int:
        return self.config.round_cap

    @property
    def rounds_remaining(self) -> int:
        return max(0, self.round_cap - self.round)

    @property
    def total_reward(self) -> float:
        return sum(entry.reward for entry in self.ledger)


# ---------------------------------------------------------------------------
# Action records
# ---------------------------------------------------------------------------

def _type_error(command: str, param: str, expected: str, value: Any) -> CompileError:
    return CompileError([make_diagnostic(
        'E_CP_SYNTAX_INVALID_PARAM_TYPE',
        command=command, param_name=param, expected_type=expected,
        value=repr(value), actual_type=type(value).__name__,
        faulty_token_or_command=command,
    )])


def _require(record: Dict[str, Any], command: str, keys: Iterable[str]) -> None:
    missing = [k for k in keys if k not in record]
    if missing:
        raise CompileError([make_diagnostic(
            'E_CP_SYNTAX_INVALID_PARAM_COUNT',
            command=command, expected=list(keys), got=sorted(k for k in record if k != 'action'),
            faulty_token_or_command=command,
        )])


def _edge_id(record: Dict[str, Any], command: str) -> int:
    value = record['edge']
    if isinstance(value, bool) or not isinstance(value, int):
        raise _type_error(command, 'edge', 'integer', value)
    return value


def _assignment(record: Dict[str, Any], command: str, allowed: Tuple[str, ...]) -> str:
    value = record['assignment']
    if value not in allowed:
        raise _type_error(command, 'assignment', '|'.join(allowed), value)
    return value


def _point(value: Any, command: str) -> Tuple[float, float]:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in value)
            or not all(math.isfinite(c) for c in value)):
        raise _type_error(command, 'segment', 'point [x, y]', value)
    return float(value[0]), float(value[1])


def parse_action(record: Dict[str, Any]) -> Action:
    """
    Turn an action record into an Action.

    Raises:
        CompileError: CSE diagnostics for unknown actions or bad fields
    """
    if not isinstance(record, dict):
        raise _type_error('action', 'record', 'object', record)
    command = record.get('action')
    note = record.get('note')
    if note is not None and not isinstance(note, str):
        raise _type_error(str(command), 'note', 'string', note)
    if command not in ACTIONS:
        raise CompileError([make_diagnostic(
            'E_CP_SYNTAX_UNKNOWN_COMMAND',
            command=str(command), faulty_token_or_command=str(command),
        )])

    if command == 'add_crease':
        _require(record, command, ('segment', 'assignment'))
        segment = record['segment']
        if not isinstance(segment, (list, tuple)) or len(segment) != 2:
            raise _type_error(command, 'segment', '[[x, y], [x, y]]', segment)
        p, q = (_point(pt, command) for pt in segment)
        return AddCrease((p, q), _assignment(record, command, ASSIGNMENTS), note)
    if command == 'remove_crease':
        _require(record, command, ('edge',))
        return RemoveCrease(_edge_id(record, command), note)
    if command == 'set_assignment':
        _require(record, command, ('edge', 'assignment'))
        return SetAssignment(_edge_id(record, command),
                             _assignment(record, command, ASSIGNMENTS), note)
    if command == 'compile':
        return Compile(note)
    return Finish(note)


# ---------------------------------------------------------------------------
# Draft editing
# ---------------------------------------------------------------------------

def _sheet_segments(reference: CreasePattern) -> List[Tuple[tuple, str]]:
    outline = boundary_polygon(reference)
    if outline is None or outline.geom_type != 'Polygon':
        raise CompileError([make_diagnostic(
            'E_CP_SYNTAX_INVALID_PARAM_COUNT',
            check='boundary', command='edges_assignment',
            expected='closed boundary', got='none',
        )])
    ring = list(orient(outline).exterior.coords)
    return [((tuple(p), tuple(q)), 'B') for p, q in zip(ring, ring[1:])]


def bare_sheet(reference: CreasePattern) -> CreasePattern:
    """The reference's outline with no interior creases."""
    return build_cp(_sheet_segments(reference))


def _creases(cp: CreasePattern, skip: Optional[int] = None) -> List[Tuple[tuple, str]]:
    # raw labels: a dangling U crease reads as B once effective
    segments = cp.segments()
    return [
        (segments[e][0], code) for e, code in enumerate(cp.edges_assignment)
        if code != 'B' and e != skip
    ]


def _placement_error(crease_ids, points) -> CompileError:
    return CompileError([make_diagnostic(
        'E_GEOM_CREASE_PLACEMENT_INVALID',
        faulty_crease_ids=list(crease_ids),
        faulty_vertex_ids_or_point_coordinates=[list(p) for p in points],
    )])


def add_crease(state: SessionState, action: AddCrease) -> CreasePattern:
    """
    Draft with a new crease, noded against every existing edge.

    Raises:
        CompileError: GIF when the crease leaves the paper or has zero length,
            CSE when it is labeled B
    """
    if action.assignment == 'B':
        raise _type_error('add_crease', 'assignment', '|'.join(CREASE_CODES), 'B')
    p, q = action.segment
    sheet = boundary_polygon(state.draft)
    if math.dist(p, q) < 1e-9:
        raise _placement_error([], [p, q])
    if sheet is None:
        raise _placement_error([], [p, q])
    paper = sheet.buffer(1e-9)
    outside = [pt for pt in (p, q) if not paper.covers(Point(pt))]
    if outside or not paper.covers(LineString([p, q])):
        raise _placement_error([], outside or [p, q])
    return build_cp(_sheet_segments(state.draft) + _creases(state.draft)
                    + [((p, q), action.assignment)])


def remove_crease(state: SessionState, action: RemoveCrease) -> CreasePattern:
    """
    Raises:
        CompileError: CSE on an unknown edge id, GIF when the edge is boundary
    """
    draft = state.draft
    if not 0 <= action.edge < draft.num_edges:
        raise CompileError([make_diagnostic(
            'E_CP_SYNTAX_INVALID_LINE_REFERENCE',
            command='remove_crease', line_id=action.edge, point_id='-',
            faulty_crease_ids=[action.edge],
        )])
    if draft.edges_assignment[action.edge] == 'B':
        raise _placement_error([action.edge], [])
    return build_cp(_sheet_segments(draft) + _creases(draft, skip=action.edge))


def set_assignment(state: SessionState, action: SetAssignment) -> CreasePattern:
    draft = state.draft
    if not 0 <= action.edge < draft.num_edges:
        raise CompileError([make_diagnostic(
            'E_CP_SYNTAX_INVALID_LINE_REFERENCE',
            command='set_assignment', line_id=action.edge, point_id='-',
            faulty_crease_ids=[action.edge],
        )])
    on_boundary = draft.edges_assignment[action.edge] == 'B'
    if on_boundary != (action.assignment == 'B'):
        raise _placement_error([action.edge], [])
    return with_assignment(draft, action.edge, action.assignment)


# ---------------------------------------------------------------------------
# Session lifecycle
# ---------------------------------------------------------------------------

def session_new(reference: CreasePattern, config: Optional[SessionConfig] = None) -> SessionState:
    """
    Start a session on a reference CP; the draft is the bare sheet.

    Raises:
        CompileError: when the reference does not fold
    """
    config = config or SessionConfig()
    reference = canonicalize_cp(reference)
    compilation = compile_cp(reference, config.eval.fold)
    if not compilation.foldable:
        raise CompileError(compilation.diagnostics)
    state = SessionState(
        reference=reference,
        reference_compilation=compilation,
        draft=bare_sheet(reference),
        config=config,
    )
    logger.info('Session started: reference has %d edges, cap %d rounds',
                reference.num_edges, config.round_cap)
    return state


def compute_reward(prev_partial: Optional[float], new_partial: float,
                   compile_ok: bool, config: Optional[SessionConfig] = None) -> float:
    """
    Step reward of a compile action.

    Args:
        prev_partial: S_partial of the previous compile (None before the first)
        new_partial: S_partial of this compile
        compile_ok: Whether the draft folded
        config: Reward constants

    Returns:
        Progress + success bonus - step penalty, or the failure penalty
    """
    config = config or SessionConfig()
    if not compile_ok:
        return -config.p_fail - config.c_step
    prev = prev_partial if prev_partial is not None else 0.0
    return (new_partial - prev) + config.b_success - config.c_step


def _edit(state: SessionState, action: Action) -> CreasePattern:
    if isinstance(action, AddCrease):
        return add_crease(state, action)
    if isinstance(action, RemoveCrease):
        return remove_crease(state, action)
    return set_assignment(state, action)


def apply_action(state: SessionState, action: Union[Action, Dict[str, Any]]) -> Feedback:
    """
    Apply one action and return its feedback.

    Raises:
        SessionError: when the session is already done
    """
    if state.done:
        raise SessionError('Session is done; no further actions accepted')
    config = state.config

    diagnostics: Tuple[Diagnostic, ...] = ()
    partial = None
    compile_ok = None
    if isinstance(action, ACTION_TYPES):
        name = action.name
    else:
        name = action.get('action', 'invalid') if isinstance(action, dict) else 'invalid'
    try:
        parsed = action if isinstance(action, ACTION_TYPES) else parse_action(action)
    except CompileError as exc:
        parsed = None
        diagnostics = exc.diagnostics
        reward = -config.c_step

    if isinstance(parsed, Compile):
        compilation = compile_cp(state.draft, config.eval.fold)
        compile_ok = compilation.foldable
        diagnostics = compilation.diagnostics
        partial = partial_score(compilation, state.reference_compilation, config.eval)
        reward = compute_reward(state.prev_partial, partial, compile_ok, config)
        state.prev_partial = partial
    elif isinstance(parsed, Finish):
        compilation = compile_cp(state.draft, config.eval.fold)
        compile_ok = compilation.foldable
        state.final_report = score_compiled(compilation, state.reference_compilation, config.eval)
        diagnostics = compilation.diagnostics
        reward = state.final_report.total
        state.done = True
    elif parsed is not None:
        reward = -config.c_step
        try:
            state.draft = _edit(state, parsed)
        except CompileError as exc:
            diagnostics = exc.diagnostics

    state.round += 1
    if state.round >= state.round_cap:
        state.done = True
    state.ledger.append(LedgerEntry(state.round, str(name), reward, compile_ok))
    logger.debug('Round %d %s reward=%.6f', state.round, name, reward)
    return Feedback(
        action=str(name),
        round=state.round,
        diagnostics=tuple(diagnostics),
        partial_score=partial,
        reward=reward,
        rounds_remaining=state.rounds_remaining,
        done=state.done,
    )


def session_final(state: SessionState) -> Tuple[float, ScoreReport]:
    """
    Final reward and report: S_total of the current draft.

    Raises:
        SessionError: when the session is still running
    """
    if not state.done:
        raise SessionError('Session is still running')
    if state.final_report is None:
        gen = compile_cp(state.draft, state.config.eval.fold)
        state.final_report = score_compiled(gen, state.reference_compilation, state.config.eval)
    return state.final_report.total, state.final_report


def replay(reference: CreasePattern, actions: Iterable[Union[Action, Dict[str, Any]]],
           config: Optional[SessionConfig] = None) -> List[Feedback]:
    """Rebuild every Feedback of a recorded action sequence."""
    state = session_new(reference, config)
    feedback = []
    for action in actions:
        if state.done:
            break
        feedback.append(apply_action(state, action))
    return feedback
