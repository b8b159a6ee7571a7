"""
Diagnostics module - the compiler's structured error feedback.

Four categories are reported back to callers (and to agents in a session):

- CSE: CP code syntax error      (E_CP_SYNTAX_*)
- GIF: geometrically impossible fold (E_GEOM_*)
- PSI: paper self-intersection   (E_PHYS_*)
- AFS: ambiguous folding state   (E_AMBIGUOUS_*)

The code catalog is frozen; constructing a Diagnostic with an unknown code,
a mismatched category or an undocumented parameter key raises ValueError.
"""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Tuple

CATEGORIES = ('CSE', 'GIF', 'PSI', 'AFS')
SEVERITIES = ('error', 'warning', 'note')

_PREFIXES = {
    'E_CP_SYNTAX_': 'CSE',
    'E_GEOM_': 'GIF',
    'E_PHYS_': 'PSI',
    'E_AMBIGUOUS_': 'AFS',
}

# code -> message template; placeholders are parameter keys
CATALOG: Dict[str, str] = {
    'E_CP_SYNTAX_INVALID_PARAM_COUNT': (
        "Instruction '{command}' has an insufficient or excessive number of "
        "parameters. Expected {expected}, got {got}."
    ),
    'E_CP_SYNTAX_UNKNOWN_COMMAND': (
        "Unrecognized instruction '{command}'. Please check spelling or the "
        "instruction set."
    ),
    'E_CP_SYNTAX_INVALID_PARAM_TYPE': (
        "Parameter '{param_name}' for instruction '{command}' has an invalid type. "
        "Expected type '{expected_type}', but received value '{value}' of type "
        "'{actual_type}'."
    ),
    'E_CP_SYNTAX_VALUE_OUT_OF_RANGE': (
        "Value '{value}' for parameter '{param_name}' of instruction '{command}' "
        "is out of the allowed range [{min_val}, {max_val}]."
    ),
    'E_CP_SYNTAX_UNEXPECTED_TOKEN': (
        "Unexpected symbol/character '{token}' encountered at line {line}, "
        "column {column} while parsing instruction '{command}'."
    ),
    'E_CP_SYNTAX_MISSING_DELIMITER': (
        "Instruction '{command}' is missing a required delimiter. For example, "
        "the expected '{expected_delimiter}' was not found."
    ),
    'E_CP_SYNTAX_INVALID_LINE_REFERENCE': (
        "Instruction '{command}' references a non-existent line ID '{line_id}' "
        "or point ID '{point_id}'."
    ),
    'E_GEOM_TOO_MANY_LAYERS': (
        "Folding near {problematic_coordinates_or_regions} would result in "
        "{calculated_layers_at_point} paper layers, exceeding the limit of "
        "{max_allowable_layers} layers."
    ),
    'E_GEOM_ANGLE_CONSTRAINT_VIOLATION': (
        "Creases {faulty_crease_ids} conflict with existing angles {angles} at "
        "vertex {faulty_vertex_ids_or_point_coordinates} ({reason})."
    ),
    'E_GEOM_CREASE_PLACEMENT_INVALID': (
        "Endpoints of crease {faulty_crease_ids} are outside paper, or crease "
        "illegally intersects boundary."
    ),
    'E_GEOM_LENGTH_CONSTRAINT_VIOLATION': (
        "Operation requires points {point_a} and {point_b} to coincide, but "
        "original distance {d1} != required {d2}, implying stretching."
    ),
    'E_PHYS_SELF_INTERSECTION': (
        "After crease {faulty_crease_ids}, facets {intersecting_facet_ids} "
        "penetrate each other in region {problematic_coordinates_or_regions}."
    ),
    'E_PHYS_INTERSECTION_DURING_MOTION': (
        "During folding of {faulty_crease_ids}, at time t={time}, region "
        "{region_a} collides with {region_b}."
    ),
    'E_PHYS_BOUNDARY_VIOLATION': (
        "Folded part {facet_id} penetrates defined container boundary."
    ),
    'E_AMBIGUOUS_STATE': (
        "CP code is insufficient for a unique state. {number_of_possible_states} "
        "possible configurations in region {problematic_coordinates_or_regions}."
    ),
    'E_AMBIGUOUS_LAYER_ORDER': (
        "Insufficient constraints to determine stacking order of layers "
        "{layer_a_id} and {layer_b_id} in region "
        "{problematic_coordinates_or_regions}. At least two valid orders."
    ),
    'E_AMBIGUOUS_TUCK_CHOICE': (
        "Operation 'tuck' at {problematic_coordinates_or_regions} has multiple "
        "valid insertion methods; CP unspecified."
    ),
    'E_AMBIGUOUS_MOUNTAIN_VALLEY_ASSIGNMENT': (
        "For crease {ambiguous_crease_ids_or_vertex_ids}, multiple valid M/V "
        "assignments satisfy local constraints but yield different global forms."
    ),
}

PARAM_KEYS = frozenset({
    # documented feedback parameters
    'faulty_cp_code_line_numbers',
    'faulty_token_or_command',
    'faulty_crease_ids',
    'faulty_vertex_ids_or_point_coordinates',
    'problematic_coordinates_or_regions',
    'max_allowable_layers',
    'calculated_layers_at_point',
    'conflicting_crease_ids_and_angles',
    'intersecting_layer_ids',
    'intersecting_facet_ids',
    'penetration_depth',
    'ambiguous_crease_ids_or_vertex_ids',
    'number_of_possible_states',
    'suggested_disambiguation',
    # template placeholders and implementation detail
    'check', 'reason', 'vertex', 'edge', 'face', 'expected', 'got', 'value',
    'line', 'column', 'token', 'command', 'param_name', 'expected_type',
    'actual_type', 'min_val', 'max_val', 'expected_delimiter', 'line_id',
    'point_id', 'layer_a_id', 'layer_b_id', 'cycle', 'point_a', 'point_b',
    'd1', 'd2', 'time', 'region_a', 'region_b', 'facet_id', 'angles', 'note',
})

DISAMBIGUATION_HINT = (
    'Suggestion: Add layer order constraint (e.g., LAYER_ABOVE) or specify '
    'crease direction.'
)


def category_for(code: str) -> str:
    """Return the category implied by a code's prefix."""
    for prefix, category in _PREFIXES.items():
        if code.startswith(prefix):
            return category
    raise ValueError(f"Code {code!r} has no known category prefix")


def _plain(value: Any) -> Any:
    """Convert a parameter value to plain JSON-compatible data."""
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if hasattr(value, 'item') and not isinstance(value, (str, bytes)):
        return value.item()  # numpy scalar
    return value


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(round(value, 9))
    if isinstance(value, list):
        return '[' + ', '.join(_fmt(v) for v in value) + ']'
    if isinstance(value, dict):
        return '{' + ', '.join(f"{k}={_fmt(value[k])}" for k in sorted(value)) + '}'
    return str(value)


class _Placeholders(dict):
    def __missing__(self, key):
        return '?'


@dataclass(frozen=True)
class Diagnostic:
    """One structured compiler finding."""
    category: str
    code: str
    message: str
    params: Dict[str, Any] = field(default_factory=dict)
    severity: str = 'error'

    def __post_init__(self):
        if self.code not in CATALOG:
            raise ValueError(f"Unknown diagnostic code: {self.code}")
        if self.category not in CATEGORIES:
            raise ValueError(f"Unknown diagnostic category: {self.category}")
        if category_for(self.code) != self.category:
            raise ValueError(
                f"Code {self.code} does not belong to category {self.category}"
            )
        if self.severity not in SEVERITIES:
            raise ValueError(f"Unknown severity: {self.severity}")
        unknown = sorted(set(self.params) - PARAM_KEYS)
        if unknown:
            raise ValueError(f"Undocumented diagnostic parameters: {unknown}")
        object.__setattr__(self, 'params', _plain(dict(self.params)))

    @property
    def is_error(self) -> bool:
        return self.severity == 'error'


def make_diagnostic(code: str, severity: str = 'error', **params) -> Diagnostic:
    """
    Build a diagnostic whose message is filled from the catalog template.

    Args:
        code: Catalog code, e.g. "E_GEOM_TOO_MANY_LAYERS"
        severity: error, warning or note
        **params: Parameter map (keys from PARAM_KEYS)

    Returns:
        Diagnostic with category derived from the code prefix
    """
    if code not in CATALOG:
        raise ValueError(f"Unknown diagnostic code: {code}")
    plain = _plain(params)
    message = CATALOG[code].format_map(
        _Placeholders({k: _fmt(v) for k, v in plain.items()})
    )
    return Diagnostic(category_for(code), code, message, plain, severity)


def render_diagnostic(d: Diagnostic) -> Tuple[str, Dict[str, Any]]:
    """
    Render a diagnostic as one text line plus a structured record.

    The line reads "CATEGORY/CODE: message {k=v, ...}" with parameters in
    sorted key order. The record is what the session protocol emits.
    """
    rendered_params = ', '.join(f"{k}={_fmt(d.params[k])}" for k in sorted(d.params))
    line = f"{d.category}/{d.code}: {d.message} {{{rendered_params}}}"
    record = {
        'category': d.category,
        'code': d.code,
        'message': d.message,
        'params': {k: d.params[k] for k in sorted(d.params)},
        'severity': d.severity,
        'text': line,
    }
    return line, record


def parse_record(record: Dict[str, Any]) -> Diagnostic:
    """Rebuild a Diagnostic from its structured record."""
    return Diagnostic(
        category=record['category'],
        code=record['code'],
        message=record['message'],
        params=dict(record.get('params', {})),
        severity=record.get('severity', 'error'),
    )


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)


def categories_of(diagnostics: Iterable[Diagnostic]) -> List[str]:
    """Distinct error categories present, in catalog order."""
    present = {d.category for d in diagnostics if d.is_error}
    return [c for c in CATEGORIES if c in present]


class CompileError(Exception):
    """Raised when an operation cannot produce its result; carries diagnostics."""

    def __init__(self, diagnostics: Iterable[Diagnostic]):
        self.diagnostics: Tuple[Diagnostic, ...] = tuple(diagnostics)
        lines = [render_diagnostic(d)[0] for d in self.diagnostics]
        super().__init__('\n'.join(lines) if lines else 'compilation failed')

    @property
    def categories(self) -> List[str]:
        return categories_of(self.diagnostics)


def to_json_lines(diagnostics: Iterable[Diagnostic]) -> str:
    """Serialize diagnostics as newline-delimited JSON records."""
    return ''.join(
        json.dumps(render_diagnostic(d)[1], sort_keys=True) + '\n'
        for d in diagnostics
    )


class CapacityError(ValueError):
    """Raised when an exhaustive search is asked to exceed its cap."""
