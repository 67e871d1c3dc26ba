from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

from .lexer import Token

COMPILATION_UNIT = "CompilationUnit"
IMPORT_DECL = "ImportDecl"
CLASS_DECL = "ClassDecl"
METHOD_DECL = "MethodDecl"
FIELD_DECL = "FieldDecl"
LOCAL_VAR_DECL = "LocalVarDecl"
EXPR_STMT = "ExprStmt"
RETURN_STMT = "ReturnStmt"
IF_STMT = "IfStmt"
FOR_STMT = "ForStmt"
WHILE_STMT = "WhileStmt"
TRY_STMT = "TryStmt"
BLOCK = "Block"
METHOD_INVOCATION = "MethodInvocation"
OBJECT_CREATION = "ObjectCreation"
FIELD_ACCESS = "FieldAccess"
NAME = "Name"
LITERAL = "Literal"
CAST = "Cast"
BINARY_EXPR = "BinaryExpr"
UNARY_EXPR = "UnaryExpr"
ARRAY_ACCESS = "ArrayAccess"
OPAQUE_EXPR = "OpaqueExpr"

STATEMENT_KINDS = frozenset(
    {LOCAL_VAR_DECL, EXPR_STMT, RETURN_STMT, IF_STMT, FOR_STMT, WHILE_STMT, TRY_STMT, BLOCK}
)
COMPOUND_KINDS = frozenset({IF_STMT, FOR_STMT, WHILE_STMT, TRY_STMT})

FULL = "Full"
PARTIAL = "Partial"


@dataclass(frozen=True, eq=False)
class AstNode:
    """One syntax tree node.

    Nodes compare by identity so they can key dictionaries. Kind-specific
    data lives in the optional fields:

    * ``name``: invoked/declared simple name, accessed field, import path,
      literal text, operator for Binary/UnaryExpr.
    * ``names``: variables declared by a LocalVarDecl/FieldDecl or a catch
      clause.
    * ``declared_type``: declared type text, cast target, created type,
      return type of a method, superclass of a class.
    * ``name_span``/``paren_span``: location of the invoked name and of the
      ``(...)`` argument list of a call.
    """

    kind: str
    span: tuple[int, int]
    children: tuple["AstNode", ...] = ()
    name: str | None = None
    names: tuple[str, ...] = ()
    declared_type: str | None = None
    resolved_partially: bool = False
    name_span: tuple[int, int] | None = None
    paren_span: tuple[int, int] | None = None
    has_receiver: bool = False
    params: tuple[tuple[str, str], ...] = ()
    role: str | None = None

    @property
    def start(self) -> int:
        return self.span[0]

    @property
    def end(self) -> int:
        return self.span[1]

    @property
    def receiver(self) -> AstNode | None:
        if self.kind == METHOD_INVOCATION and self.has_receiver:
            return self.children[0]
        return None

    @property
    def args(self) -> tuple[AstNode, ...]:
        if self.kind == METHOD_INVOCATION:
            return self.children[1:] if self.has_receiver else self.children
        if self.kind == OBJECT_CREATION:
            return self.children
        return ()

    def walk(self) -> Iterator[AstNode]:
        """Pre-order traversal, children in textual order."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def contains(self, other: AstNode) -> bool:
        return self.start <= other.start and other.end <= self.end

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"<{self.kind}{label} {self.start}:{self.end}>"


@dataclass(frozen=True)
class Diagnostic:
    span: tuple[int, int]
    message: str


@dataclass(frozen=True, eq=False)
class ParseResult:
    source: str
    ast: AstNode
    tokens: tuple[Token, ...]
    diagnostics: tuple[Diagnostic, ...] = ()
    path: str | None = field(default=None, compare=False)

    @property
    def completeness(self) -> str:
        if self.diagnostics or any(n.kind == OPAQUE_EXPR for n in self.ast.walk()):
            return PARTIAL
        return FULL

    def text(self, node: AstNode) -> str:
        return self.source[node.start:node.end]

    @cached_property
    def parents(self) -> dict[int, AstNode]:
        table: dict[int, AstNode] = {}
        for node in self.ast.walk():
            for child in node.children:
                table[id(child)] = node
        return table

    def parent(self, node: AstNode) -> AstNode | None:
        return self.parents.get(id(node))

    def ancestors(self, node: AstNode) -> Iterator[AstNode]:
        current = self.parent(node)
        while current is not None:
            yield current
            current = self.parent(current)

    def enclosing(self, node: AstNode, kind: str) -> AstNode | None:
        for anc in self.ancestors(node):
            if anc.kind == kind:
                return anc
        return None

    @cached_property
    def imports(self) -> tuple[AstNode, ...]:
        return tuple(c for c in self.ast.children if c.kind == IMPORT_DECL)

    @cached_property
    def invocations(self) -> tuple[AstNode, ...]:
        calls = [n for n in self.ast.walk() if n.kind == METHOD_INVOCATION]
        calls.sort(key=lambda n: (n.start, -n.end))
        return tuple(calls)

    def significant_tokens(self, start: int, end: int) -> list[Token]:
        return [t for t in self.tokens if start <= t.start and t.end <= end and not t.is_trivia]

    def node_at(self, offset: int, kind: str = METHOD_INVOCATION) -> AstNode | None:
        """Innermost node of ``kind`` starting exactly at ``offset``."""
        found = None
        for node in self.ast.walk():
            if node.kind == kind and node.start == offset:
                if found is None or found.contains(node):
                    found = node
        return found


def header_parts(stmt: AstNode) -> tuple[AstNode, ...]:
    """Children of a compound statement that belong to its header."""
    if stmt.kind == IF_STMT:
        return stmt.children[:1]
    if stmt.kind == WHILE_STMT:
        return tuple(c for c in stmt.children if c.role == "cond")
    if stmt.kind == FOR_STMT:
        return stmt.children[:-1]
    if stmt.kind == TRY_STMT:
        return tuple(c for c in stmt.children if c.role == "resource")
    return ()


def body_parts(stmt: AstNode) -> tuple[AstNode, ...]:
    header = {id(c) for c in header_parts(stmt)}
    return tuple(c for c in stmt.children if id(c) not in header)
