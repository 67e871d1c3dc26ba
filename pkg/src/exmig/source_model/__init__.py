from .lexer import Token, normalized_text, tokenize
from .nodes import AstNode, Diagnostic, ParseResult
from .parser import parse
from .render import OverlappingEdits, render
from .types import qualify, resolve_type, types_equal, visible_variables

__all__ = [
    "AstNode",
    "Diagnostic",
    "OverlappingEdits",
    "ParseResult",
    "Token",
    "normalized_text",
    "parse",
    "qualify",
    "render",
    "resolve_type",
    "tokenize",
    "types_equal",
    "visible_variables",
]
