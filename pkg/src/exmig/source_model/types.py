"""Lexical type resolution: declarations, imports and casts only.

No classpath is consulted. An unknown type is a legal answer and is
reported as ``None``.
"""
from __future__ import annotations

import re

from .lexer import PRIMITIVES
from .nodes import (
    BLOCK,
    CAST,
    CLASS_DECL,
    FIELD_ACCESS,
    FIELD_DECL,
    FOR_STMT,
    LITERAL,
    LOCAL_VAR_DECL,
    METHOD_DECL,
    NAME,
    OBJECT_CREATION,
    TRY_STMT,
    AstNode,
    ParseResult,
)

JAVA_LANG = frozenset(
    "Object String Integer Long Short Byte Character Boolean Float Double Number "
    "CharSequence StringBuilder Math System Thread Runnable Exception RuntimeException "
    "Iterable Class Void Enum".split()
)
_GENERICS = re.compile(r"<.*>")


def strip_generics(type_text: str) -> str:
    return _GENERICS.sub("", type_text).replace("...", "[]")


def simple_name(type_text: str) -> str:
    return strip_generics(type_text).split(".")[-1]


def is_primitive(type_text: str | None) -> bool:
    return type_text is not None and type_text in PRIMITIVES


def types_equal(a: str | None, b: str | None) -> bool:
    """Compare type names, tolerating a missing package qualifier on either side."""
    if a is None or b is None:
        return False
    a, b = strip_generics(a), strip_generics(b)
    if a == b:
        return True
    if _fully_qualified(a) and _fully_qualified(b):
        return False
    return simple_name(a) == simple_name(b)


def _fully_qualified(type_text: str) -> bool:
    return "." in type_text and type_text[0].islower()


def qualify(result: ParseResult, type_text: str | None) -> str | None:
    """Expand a simple or partially qualified type name through the file's imports."""
    if type_text is None:
        return None
    base = strip_generics(type_text)
    if base in PRIMITIVES or base == "var":
        return base
    suffix = ""
    while base.endswith("[]"):
        base, suffix = base[:-2], suffix + "[]"
    head, _, rest = base.partition(".")
    if head and head[0].islower() and rest:
        return base + suffix
    for imp in result.imports:
        path = imp.name or ""
        if imp.role == "static":
            continue
        if path.endswith("." + head):
            return path + ("." + rest if rest else "") + suffix
    if head in JAVA_LANG and not rest:
        return "java.lang." + head + suffix
    package = result.ast.name
    for cls in result.ast.children:
        if cls.kind == CLASS_DECL and cls.name == head and package:
            return f"{package}.{base}{suffix}"
    return base + suffix


def _declared_in(node: AstNode, name: str) -> str | None:
    if node.kind in (LOCAL_VAR_DECL, FIELD_DECL) and name in node.names:
        return node.declared_type
    return None


def visible_variables(result: ParseResult, site: AstNode) -> list[tuple[str, str, AstNode | None]]:
    """Variables in scope at ``site``, nearest declaration first.

    Each entry is ``(name, declared type text, declaring node)``; parameters
    carry their method node, catch variables their catch block.
    """
    found: list[tuple[str, str, AstNode | None]] = []
    child = site
    for anc in result.ancestors(site):
        if anc.kind == BLOCK:
            for stmt in reversed(anc.children):
                if stmt.start >= child.start:
                    continue
                if stmt.kind == LOCAL_VAR_DECL:
                    for var in reversed(stmt.names):
                        found.append((var, stmt.declared_type, stmt))
            if anc.role == "catch":
                for var in anc.names:
                    found.append((var, anc.declared_type, anc))
        elif anc.kind == FOR_STMT:
            for part in anc.children:
                if part.kind == LOCAL_VAR_DECL and part.end <= child.start:
                    for var in part.names:
                        found.append((var, part.declared_type, part))
        elif anc.kind == TRY_STMT:
            for part in anc.children:
                if part.role == "resource" and part.kind == LOCAL_VAR_DECL and part.end <= child.start:
                    for var in part.names:
                        found.append((var, part.declared_type, part))
        elif anc.kind == METHOD_DECL:
            for type_text, var in anc.params:
                found.append((var, type_text, anc))
        elif anc.kind == CLASS_DECL:
            for member in anc.children:
                if member.kind == FIELD_DECL:
                    for var in member.names:
                        found.append((var, member.declared_type, member))
        child = anc
    return found


def resolve_type(result: ParseResult, name: str, site: AstNode) -> str | None:
    """Declared type of variable ``name`` as seen from ``site``, qualified via imports."""
    if name == "this":
        cls = site if site.kind == CLASS_DECL else result.enclosing(site, CLASS_DECL)
        return qualify(result, cls.name) if cls is not None else None
    for var, type_text, _ in visible_variables(result, site):
        if var == name:
            if type_text == "var":
                return None
            return qualify(result, type_text)
    return None


_LITERAL_TYPES = (
    (re.compile(r'^"'), "java.lang.String"),
    (re.compile(r"^'"), "char"),
    (re.compile(r"^(true|false)$"), "boolean"),
    (re.compile(r"^(0[xX][0-9a-fA-F_]+|0[bB][01_]+|\d[\d_]*)[lL]$"), "long"),
    (re.compile(r"^(0[xX][0-9a-fA-F_]+|0[bB][01_]+|\d[\d_]*)$"), "int"),
    (re.compile(r"^.*[fF]$"), "float"),
    (re.compile(r"^[\d.]"), "double"),
)


def literal_type(text: str) -> str | None:
    for pattern, type_name in _LITERAL_TYPES:
        if pattern.match(text):
            return type_name
    return None


def dotted_name(expr: AstNode) -> str | None:
    """``a.b.c`` text for a chain of field accesses rooted at a name or ``this``."""
    if expr.kind == NAME and expr.role != "type":
        return expr.name
    if expr.kind == FIELD_ACCESS:
        base = dotted_name(expr.children[0])
        if base is not None:
            return f"{base}.{expr.name}"
    return None


def expression_type(result: ParseResult, expr: AstNode, call_types=None) -> str | None:
    """Best-effort static type of an expression.

    ``call_types`` is an optional callback giving the return type of a
    method invocation (the API catalog supplies it).
    """
    kind = expr.kind
    if kind == LITERAL:
        return literal_type(expr.name or "")
    if kind == NAME:
        return resolve_type(result, expr.name, expr)
    if kind == CAST:
        return qualify(result, expr.declared_type)
    if kind == OBJECT_CREATION:
        return qualify(result, expr.declared_type)
    if kind == FIELD_ACCESS:
        dotted = dotted_name(expr)
        if dotted is not None:
            parts = dotted.split(".")
            # Android resource identifiers (R.color.x, R.string.y) are ints.
            if len(parts) == 3 and parts[0] == "R":
                return "int"
            if parts[0] == "this" and len(parts) == 2:
                return resolve_type(result, parts[1], expr)
        return None
    if kind == "MethodInvocation" and call_types is not None:
        return call_types(expr)
    return None
