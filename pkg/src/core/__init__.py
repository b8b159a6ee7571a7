"""
Core logic for CPForge.

This package contains the crease-pattern compiler (parse, validate, fold),
the scoring pipeline and the interactive session environment, independent
of how they are run (CLI, scripts, tests).
"""

from src.core.config import validate_config, get_store_config
from src.core.cp_model import CreasePattern, parse_cp, serialize_cp, validate_structure
from src.core.diagnostics import CompileError, Diagnostic, render_diagnostic
from src.core.folder import FoldedState, fold
from src.core.evaluator import ScoreReport, score_total
from src.core.session import apply_action, session_new
from src.core.storage import get_storage

__all__ = [
    'validate_config',
    'get_store_config',
    'CreasePattern',
    'parse_cp',
    'serialize_cp',
    'validate_structure',
    'CompileError',
    'Diagnostic',
    'render_diagnostic',
    'FoldedState',
    'fold',
    'ScoreReport',
    'score_total',
    'apply_action',
    'session_new',
    'get_storage'
]
