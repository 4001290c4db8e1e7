"""Constraint expressions and the ``.mere`` system document format."""

from .document import (
    FILE_EXTENSION,
    FORMAT_VERSION,
    MEDIA_TYPE,
    CanonicalizationWarning,
    DocumentError,
    SystemDocument,
    dump_model,
    load_model,
    parse_system,
    serialize_system,
    to_json_text,
)
from .expr import (
    DslError,
    ExprSyntaxError,
    ExprTypeError,
    FieldError,
    evaluate,
    evaluate_on_behaviors,
    fields_of,
    format_expr,
    parse_constraint,
    parse_expr,
)

__all__ = [
    "FILE_EXTENSION",
    "FORMAT_VERSION",
    "MEDIA_TYPE",
    "CanonicalizationWarning",
    "DocumentError",
    "SystemDocument",
    "dump_model",
    "load_model",
    "parse_system",
    "serialize_system",
    "to_json_text",
    "DslError",
    "ExprSyntaxError",
    "ExprTypeError",
    "FieldError",
    "evaluate",
    "evaluate_on_behaviors",
    "fields_of",
    "format_expr",
    "parse_constraint",
    "parse_expr",
]
