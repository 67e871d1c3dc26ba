"""Tolerant recursive-descent parser for a Java subset.

The parser never fails. Constructs outside the supported subset (lambdas,
anonymous classes, switch, annotations with arguments, ...) are skipped with
balanced-delimiter scanning and kept as ``OpaqueExpr`` leaves, and each
recovery is recorded as a diagnostic.
"""
from __future__ import annotations

from .lexer import IDENTIFIER, KEYWORD, LITERAL as LIT_TOKEN, PRIMITIVES, Token, tokenize
from .nodes import (
    ARRAY_ACCESS,
    BINARY_EXPR,
    BLOCK,
    CAST,
    CLASS_DECL,
    COMPILATION_UNIT,
    EXPR_STMT,
    FIELD_ACCESS,
    FIELD_DECL,
    FOR_STMT,
    IF_STMT,
    IMPORT_DECL,
    LITERAL,
    LOCAL_VAR_DECL,
    METHOD_DECL,
    METHOD_INVOCATION,
    NAME,
    OBJECT_CREATION,
    OPAQUE_EXPR,
    RETURN_STMT,
    TRY_STMT,
    UNARY_EXPR,
    WHILE_STMT,
    AstNode,
    Diagnostic,
    ParseResult,
)

MODIFIERS = frozenset(
    "public protected private static final abstract native synchronized "
    "transient volatile strictfp default sealed non-sealed".split()
)
ASSIGN_OPS = frozenset("= += -= *= /= %= &= |= ^= <<= >>= >>>=".split())
BINARY_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4,
    "&": 5,
    "==": 6,
    "!=": 6,
    "<": 7,
    ">": 7,
    "<=": 7,
    ">=": 7,
    "instanceof": 7,
    "<<": 8,
    ">>": 8,
    ">>>": 8,
    "+": 9,
    "-": 9,
    "*": 10,
    "/": 10,
    "%": 10,
}
OPENERS = {"(": ")", "[": "]", "{": "}"}
CLOSERS = frozenset(OPENERS.values())


class _Backtrack(Exception):
    """Raised inside speculative parses; never escapes :func:`parse`."""


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.all_tokens = tokenize(source)
        self.toks: list[Token] = [t for t in self.all_tokens if not t.is_trivia]
        self.pos = 0
        self.diagnostics: list[Diagnostic] = []

    # -- token helpers -------------------------------------------------

    def peek(self, offset: int = 0) -> Token | None:
        i = self.pos + offset
        return self.toks[i] if i < len(self.toks) else None

    def at(self, text: str, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok is not None and tok.text == text

    def at_ident(self, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok is not None and tok.kind == IDENTIFIER

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise _Backtrack("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok is None or tok.text != text:
            raise _Backtrack(f"expected {text!r}")
        self.pos += 1
        return tok

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != IDENTIFIER:
            raise _Backtrack("expected identifier")
        self.pos += 1
        return tok

    def last_end(self) -> int:
        return self.toks[self.pos - 1].end if self.pos else 0

    def adjacent(self, offset: int) -> bool:
        """True when token at ``offset`` immediately follows the one before it."""
        a, b = self.peek(offset - 1), self.peek(offset)
        return a is not None and b is not None and a.end == b.start

    def multi_gt(self) -> str | None:
        """Shift or compound operator built from adjacent '>' tokens."""
        if not self.at(">"):
            return None
        if self.at(">", 1) and self.adjacent(1):
            if self.at(">", 2) and self.adjacent(2):
                if self.at(">=", 3) and self.adjacent(3):
                    return ">>>="
                return ">>>"
            if self.at(">=", 2) and self.adjacent(2):
                return ">>="
            return ">>"
        return ">"

    def skip_balanced(self) -> None:
        """Skip one token, or a whole bracketed group if it opens one."""
        tok = self.advance()
        if tok.text not in OPENERS:
            return
        depth = 1
        while depth and self.peek() is not None:
            t = self.advance()
            if t.text in OPENERS:
                depth += 1
            elif t.text in CLOSERS:
                depth -= 1

    def opaque(self, start_pos: int, message: str) -> AstNode:
        if self.pos > start_pos:
            span = (self.toks[start_pos].start, self.last_end())
        else:
            here = self.peek().start if self.peek() is not None else self.last_end()
            span = (here, here)
        node = AstNode(OPAQUE_EXPR, span)
        self.diagnostics.append(Diagnostic(node.span, message))
        return node

    # -- types ---------------------------------------------------------

    def parse_type(self) -> str:
        """Consume a type reference and return its normalized text."""
        tok = self.peek()
        if tok is None:
            raise _Backtrack("expected type")
        if tok.text in PRIMITIVES or tok.text == "var":
            self.advance()
            text = tok.text
        elif tok.kind == IDENTIFIER:
            self.advance()
            text = tok.text
            text += self.parse_type_args()
            while self.at(".") and self.at_ident(1):
                self.advance()
                text += "." + self.advance().text
                text += self.parse_type_args()
        else:
            raise _Backtrack("expected type")
        while self.at("[") and self.at("]", 1):
            self.advance()
            self.advance()
            text += "[]"
        if self.at("..."):
            self.advance()
            text += "..."
        return text

    def parse_type_args(self) -> str:
        if not self.at("<"):
            return ""
        start = self.peek().start
        depth = 0
        while True:
            tok = self.peek()
            if tok is None:
                raise _Backtrack("unterminated type arguments")
            if tok.text == "<":
                depth += 1
            elif tok.text == ">":
                depth -= 1
            elif tok.text in (";", "{", "}", "(", ")", "=", "&&", "||"):
                raise _Backtrack("not type arguments")
            elif tok.kind not in (IDENTIFIER, KEYWORD) and tok.text not in (".", ",", "?", "[", "]", "&"):
                raise _Backtrack("not type arguments")
            self.advance()
            if depth == 0:
                return self.source[start:tok.end].replace(" ", "")

    def skip_annotation(self) -> AstNode | None:
        start_pos = self.pos
        self.expect("@")
        if self.at("interface"):
            self.pos = start_pos
            return None
        self.expect_ident()
        while self.at(".") and self.at_ident(1):
            self.advance()
            self.advance()
        if self.at("("):
            self.skip_balanced()
            return self.opaque(start_pos, "annotation arguments skipped")
        return None

    def skip_modifiers(self) -> list[AstNode]:
        opaque: list[AstNode] = []
        while True:
            if self.at("@"):
                before = self.pos
                node = self.skip_annotation()
                if self.pos == before:
                    return opaque
                if node is not None:
                    opaque.append(node)
            elif self.peek() is not None and self.peek().text in MODIFIERS:
                # `default:` inside a switch never reaches here.
                self.advance()
            else:
                return opaque

    # -- compilation unit ----------------------------------------------

    def parse_compilation_unit(self) -> AstNode:
        children: list[AstNode] = []
        package = None
        while self.peek() is not None:
            start_pos = self.pos
            try:
                if self.at("package"):
                    self.advance()
                    package = self.parse_dotted()
                    self.expect(";")
                    continue
                if self.at("import"):
                    children.append(self.parse_import())
                    continue
                if self.at(";"):
                    self.advance()
                    continue
                opaque = self.skip_modifiers()
                if self.at_type_decl():
                    children.append(self.parse_class(start_pos, opaque))
                    continue
                raise _Backtrack("unexpected top-level token")
            except _Backtrack as exc:
                self.pos = start_pos
                children.append(self.recover_member(str(exc)))
        return AstNode(COMPILATION_UNIT, (0, len(self.source)), tuple(children), name=package)

    def parse_dotted(self) -> str:
        parts = [self.expect_ident().text]
        while self.at("."):
            self.advance()
            if self.at("*"):
                self.advance()
                parts.append("*")
                break
            parts.append(self.expect_ident().text)
        return ".".join(parts)

    def parse_import(self) -> AstNode:
        start = self.expect("import").start
        static = False
        if self.at("static"):
            self.advance()
            static = True
        name = self.parse_dotted()
        self.expect(";")
        return AstNode(
            IMPORT_DECL, (start, self.last_end()), name=name, role="static" if static else None
        )

    def at_type_decl(self) -> bool:
        if self.at("class") or self.at("interface") or self.at("enum"):
            return True
        if self.at("@") and self.at("interface", 1):
            return True
        return self.at("record") and self.at_ident(1)

    def parse_class(self, start_pos: int, opaque: list[AstNode]) -> AstNode:
        start = self.toks[start_pos].start
        if self.at("@"):
            self.advance()
        keyword = self.advance().text
        name = self.expect_ident().text
        self.parse_type_args()
        if keyword == "record" and self.at("("):
            self.skip_balanced()
        superclass = None
        while self.peek() is not None and not self.at("{"):
            if self.at("extends"):
                self.advance()
                superclass = self.parse_type()
            else:
                self.advance()
        members = list(opaque)
        self.expect("{")
        if keyword == "enum":
            members.extend(self.skip_enum_constants())
        members.extend(self.parse_class_body())
        return AstNode(
            CLASS_DECL,
            (start, self.last_end()),
            tuple(members),
            name=name,
            declared_type=superclass,
            role=keyword,
        )

    def skip_enum_constants(self) -> list[AstNode]:
        start_pos = self.pos
        while self.peek() is not None and not self.at(";") and not self.at("}"):
            self.skip_balanced()
        if self.pos == start_pos:
            if self.at(";"):
                self.advance()
            return []
        node = self.opaque(start_pos, "enum constants skipped")
        if self.at(";"):
            self.advance()
        return [node]

    def parse_class_body(self) -> list[AstNode]:
        members: list[AstNode] = []
        while self.peek() is not None and not self.at("}"):
            start_pos = self.pos
            try:
                member = self.parse_member()
                if member is not None:
                    members.extend(member)
            except _Backtrack as exc:
                self.pos = start_pos
                members.append(self.recover_member(str(exc)))
        if self.at("}"):
            self.advance()
        else:
            self.diagnostics.append(Diagnostic((self.last_end(), self.last_end()), "missing '}'"))
        return members

    def recover_member(self, message: str) -> AstNode:
        start_pos = self.pos
        while self.peek() is not None:
            if self.at("}"):
                if self.pos == start_pos:
                    self.advance()
                break
            if self.at(";"):
                self.advance()
                break
            if self.at("{"):
                self.skip_balanced()
                break
            self.skip_balanced()
        return self.opaque(start_pos, f"skipped declaration: {message}")

    def parse_member(self) -> list[AstNode] | None:
        if self.at(";"):
            self.advance()
            return None
        start_pos = self.pos
        opaque = self.skip_modifiers()
        if self.at_type_decl():
            return [self.parse_class(start_pos, opaque)]
        if self.at("{"):
            self.skip_balanced()
            return opaque + [self.opaque(start_pos, "initializer block skipped")]
        if self.at("<"):
            self.parse_type_args()
        start = self.toks[start_pos].start
        # constructor
        if self.at_ident() and self.at("(", 1):
            name = self.advance().text
            return opaque + [self.parse_method_rest(start, name, None)]
        type_text = self.parse_type()
        name = self.expect_ident().text
        if self.at("("):
            return opaque + [self.parse_method_rest(start, name, type_text)]
        names = [name]
        inits: list[AstNode] = []
        while True:
            while self.at("[") and self.at("]", 1):
                self.advance()
                self.advance()
            if self.at("="):
                self.advance()
                inits.append(self.parse_var_init())
            if self.at(","):
                self.advance()
                names.append(self.expect_ident().text)
                continue
            break
        self.expect(";")
        return opaque + [
            AstNode(
                FIELD_DECL,
                (start, self.last_end()),
                tuple(inits),
                names=tuple(names),
                declared_type=type_text,
            )
        ]

    def parse_method_rest(self, start: int, name: str, return_type: str | None) -> AstNode:
        params = self.parse_params()
        while self.at("[") and self.at("]", 1):
            self.advance()
            self.advance()
        if self.at("throws"):
            self.advance()
            self.parse_type()
            while self.at(","):
                self.advance()
                self.parse_type()
        if self.at("default"):
            self.advance()
            self.parse_expression()
        children: tuple[AstNode, ...] = ()
        if self.at("{"):
            children = (self.parse_block(),)
        else:
            self.expect(";")
        return AstNode(
            METHOD_DECL,
            (start, self.last_end()),
            children,
            name=name,
            declared_type=return_type,
            params=tuple(params),
        )

    def parse_params(self) -> list[tuple[str, str]]:
        self.expect("(")
        params: list[tuple[str, str]] = []
        while not self.at(")"):
            self.skip_modifiers()
            type_text = self.parse_type()
            if self.at("this"):
                self.advance()
            else:
                params.append((type_text, self.expect_ident().text))
            while self.at("[") and self.at("]", 1):
                self.advance()
                self.advance()
            if not self.at(","):
                break
            self.advance()
        self.expect(")")
        return params

    # -- statements ----------------------------------------------------

    def parse_block(self, role: str | None = None, name: str | None = None, **extra) -> AstNode:
        start = self.expect("{").start
        stmts: list[AstNode] = []
        while self.peek() is not None and not self.at("}"):
            stmt = self.parse_statement()
            if stmt is not None:
                stmts.append(stmt)
        if self.at("}"):
            self.advance()
        else:
            self.diagnostics.append(Diagnostic((self.last_end(), self.last_end()), "missing '}'"))
        return AstNode(BLOCK, (start, self.last_end()), tuple(stmts), role=role, name=name, **extra)

    def parse_statement(self) -> AstNode | None:
        start_pos = self.pos
        try:
            return self.parse_statement_inner()
        except _Backtrack as exc:
            self.pos = start_pos
            return self.recover_statement(str(exc))

    def recover_statement(self, message: str) -> AstNode:
        start_pos = self.pos
        while self.peek() is not None:
            if self.at("}"):
                break
            if self.at(";"):
                self.advance()
                break
            if self.at("{"):
                self.skip_balanced()
                if not (self.at(";") or self.at(")") or self.at(",") or self.at(".")):
                    break
                continue
            self.skip_balanced()
        node = self.opaque(start_pos, f"skipped statement: {message}")
        return AstNode(EXPR_STMT, node.span, (node,), resolved_partially=True)

    def parse_statement_inner(self) -> AstNode | None:
        tok = self.peek()
        if tok is None:
            raise _Backtrack("unexpected end of input")
        text = tok.text
        if text == ";":
            self.advance()
            return None
        if text == "{":
            return self.parse_block()
        if text == "if":
            return self.parse_if()
        if text == "while":
            return self.parse_while()
        if text == "do":
            return self.parse_do()
        if text == "for":
            return self.parse_for()
        if text == "try":
            return self.parse_try()
        if text == "return":
            self.advance()
            children = () if self.at(";") else (self.parse_expression(),)
            self.expect(";")
            return AstNode(RETURN_STMT, (tok.start, self.last_end()), children)
        if text == "throw":
            self.advance()
            expr = self.parse_expression()
            self.expect(";")
            return AstNode(EXPR_STMT, (tok.start, self.last_end()), (expr,), name="throw")
        if text in ("break", "continue"):
            self.advance()
            if self.at_ident():
                self.advance()
            self.expect(";")
            return AstNode(EXPR_STMT, (tok.start, self.last_end()), name=text)
        if text in ("switch", "synchronized", "assert", "class", "interface", "enum") or (
            tok.kind == IDENTIFIER and self.at(":", 1)
        ):
            raise _Backtrack(f"unsupported statement '{text}'")
        if text == "yield" and not self.at("=", 1) and not self.at("(", 1):
            raise _Backtrack("unsupported statement 'yield'")
        decl = self.try_local_var_decl()
        if decl is not None:
            self.expect(";")
            return AstNode(
                LOCAL_VAR_DECL,
                (decl.start, self.last_end()),
                decl.children,
                names=decl.names,
                declared_type=decl.declared_type,
                resolved_partially=decl.resolved_partially,
            )
        expr = self.parse_expression()
        self.expect(";")
        return AstNode(EXPR_STMT, (tok.start, self.last_end()), (expr,))

    def try_local_var_decl(self, allow_colon: bool = False) -> AstNode | None:
        """Speculatively parse ``[mods] Type name [= init] {, name [= init]}``.

        Returns a LocalVarDecl node without the trailing ';' or None after
        restoring the position.
        """
        start_pos = self.pos
        try:
            opaque = self.skip_modifiers()
            tok = self.peek()
            if tok is None or not (tok.kind == IDENTIFIER or tok.text in PRIMITIVES or tok.text == "var"):
                raise _Backtrack("not a declaration")
            type_text = self.parse_type()
            if not self.at_ident():
                raise _Backtrack("not a declaration")
            follow = self.peek(1)
            if follow is None or follow.text not in ("=", ";", ",", "[", ":", ")"):
                raise _Backtrack("not a declaration")
            if follow.text == ":" and not allow_colon:
                raise _Backtrack("not a declaration")
            if follow.text == ")" and not allow_colon:
                raise _Backtrack("not a declaration")
        except _Backtrack:
            self.pos = start_pos
            return None
        start = self.toks[start_pos].start
        names: list[str] = []
        inits: list[AstNode] = list(opaque)
        while True:
            names.append(self.expect_ident().text)
            while self.at("[") and self.at("]", 1):
                self.advance()
                self.advance()
                type_text += "[]"
            if self.at("="):
                self.advance()
                inits.append(self.parse_var_init())
            if self.at(","):
                self.advance()
                continue
            break
        return AstNode(
            LOCAL_VAR_DECL,
            (start, self.last_end()),
            tuple(inits),
            names=tuple(names),
            declared_type=type_text,
            resolved_partially=bool(opaque),
        )

    def parse_var_init(self) -> AstNode:
        if self.at("{"):
            start_pos = self.pos
            self.skip_balanced()
            return self.opaque(start_pos, "array initializer skipped")
        return self.parse_expression()

    def parse_paren_expr(self) -> AstNode:
        self.expect("(")
        expr = self.parse_expression()
        self.expect(")")
        return _with_role(expr, "cond")

    def parse_if(self) -> AstNode:
        start = self.expect("if").start
        cond = self.parse_paren_expr()
        then = _with_role(self.parse_body_statement(), "then")
        children = [cond, then]
        if self.at("else"):
            self.advance()
            children.append(_with_role(self.parse_body_statement(), "else"))
        return AstNode(IF_STMT, (start, self.last_end()), tuple(children))

    def parse_body_statement(self) -> AstNode:
        start = self.peek().start if self.peek() is not None else self.last_end()
        stmt = self.parse_statement()
        if stmt is None:
            return AstNode(BLOCK, (start, self.last_end()))
        return stmt

    def parse_while(self) -> AstNode:
        start = self.expect("while").start
        cond = self.parse_paren_expr()
        body = _with_role(self.parse_body_statement(), "body")
        return AstNode(WHILE_STMT, (start, self.last_end()), (cond, body), name="while")

    def parse_do(self) -> AstNode:
        start = self.expect("do").start
        body = _with_role(self.parse_body_statement(), "body")
        self.expect("while")
        cond = self.parse_paren_expr()
        self.expect(";")
        return AstNode(WHILE_STMT, (start, self.last_end()), (body, cond), name="do")

    def parse_for(self) -> AstNode:
        start = self.expect("for").start
        self.expect("(")
        decl = self.try_local_var_decl(allow_colon=True)
        if decl is not None and self.at(":"):
            self.advance()
            iterable = self.parse_expression()
            self.expect(")")
            body = _with_role(self.parse_body_statement(), "body")
            var = _with_role(decl, "init")
            return AstNode(
                FOR_STMT,
                (start, self.last_end()),
                (var, _with_role(iterable, "iter"), body),
                name="foreach",
            )
        header: list[AstNode] = []
        if decl is not None:
            header.append(_with_role(decl, "init"))
        else:
            while not self.at(";"):
                header.append(_with_role(self.parse_expression(), "init"))
                if not self.at(","):
                    break
                self.advance()
        self.expect(";")
        if not self.at(";"):
            header.append(_with_role(self.parse_expression(), "cond"))
        self.expect(";")
        while not self.at(")"):
            header.append(_with_role(self.parse_expression(), "update"))
            if not self.at(","):
                break
            self.advance()
        self.expect(")")
        body = _with_role(self.parse_body_statement(), "body")
        return AstNode(FOR_STMT, (start, self.last_end()), tuple(header) + (body,), name="for")

    def parse_try(self) -> AstNode:
        start = self.expect("try").start
        children: list[AstNode] = []
        if self.at("("):
            self.advance()
            while not self.at(")"):
                decl = self.try_local_var_decl()
                if decl is not None:
                    children.append(_with_role(decl, "resource"))
                else:
                    children.append(_with_role(self.parse_expression(), "resource"))
                if self.at(";"):
                    self.advance()
                    continue
                break
            self.expect(")")
        children.append(self.parse_block(role="try"))
        while self.at("catch"):
            self.advance()
            self.expect("(")
            self.skip_modifiers()
            types = [self.parse_type()]
            while self.at("|"):
                self.advance()
                types.append(self.parse_type())
            var = self.expect_ident().text
            self.expect(")")
            children.append(
                self.parse_block(role="catch", declared_type="|".join(types), names=(var,))
            )
        if self.at("finally"):
            self.advance()
            children.append(self.parse_block(role="finally"))
        if len(children) == 1 and children[0].role == "try" and not any(
            c.role == "resource" for c in children
        ):
            raise _Backtrack("try without catch or finally")
        return AstNode(TRY_STMT, (start, self.last_end()), tuple(children))

    # -- expressions ---------------------------------------------------

    def parse_expression(self) -> AstNode:
        return self.parse_assignment()

    def parse_assignment(self) -> AstNode:
        lhs = self.parse_ternary()
        op = self.peek().text if self.peek() is not None else None
        width = 1
        gt = self.multi_gt()
        if gt in (">>=", ">>>="):
            op, width = gt, len(gt) - 1
        if op in ASSIGN_OPS:
            for _ in range(width):
                self.advance()
            rhs = self.parse_assignment()
            return AstNode(BINARY_EXPR, (lhs.start, rhs.end), (lhs, rhs), name=op)
        return lhs

    def parse_ternary(self) -> AstNode:
        cond = self.parse_binary(1)
        if self.at("?"):
            self.advance()
            a = self.parse_ternary()
            self.expect(":")
            b = self.parse_lambda_or(self.parse_ternary)
            return AstNode(BINARY_EXPR, (cond.start, b.end), (cond, a, b), name="?:")
        return cond

    def binary_op(self) -> tuple[str, int] | None:
        tok = self.peek()
        if tok is None:
            return None
        if tok.text == ">":
            op = self.multi_gt()
            if op in (">>=", ">>>="):
                return None
            return op, len(op)
        if tok.text in BINARY_PRECEDENCE and tok.kind != LIT_TOKEN:
            return tok.text, 1
        return None

    def parse_binary(self, min_prec: int) -> AstNode:
        lhs = self.parse_unary()
        while True:
            found = self.binary_op()
            if found is None:
                return lhs
            op, width = found
            prec = BINARY_PRECEDENCE[op]
            if prec < min_prec:
                return lhs
            for _ in range(width):
                self.advance()
            if op == "instanceof":
                start = self.peek().start if self.peek() else self.last_end()
                self.skip_modifiers()
                type_text = self.parse_type()
                rhs = AstNode(NAME, (start, self.last_end()), name=type_text, role="type")
                if self.at_ident():
                    self.advance()
                    rhs = AstNode(NAME, (start, self.last_end()), name=type_text, role="type")
            else:
                rhs = self.parse_binary(prec + 1)
            lhs = AstNode(BINARY_EXPR, (lhs.start, rhs.end), (lhs, rhs), name=op)

    def parse_unary(self) -> AstNode:
        tok = self.peek()
        if tok is None:
            raise _Backtrack("expected expression")
        if tok.text in ("+", "-", "!", "~", "++", "--"):
            self.advance()
            operand = self.parse_unary()
            return AstNode(UNARY_EXPR, (tok.start, operand.end), (operand,), name=tok.text)
        if tok.text == "(":
            cast = self.try_cast()
            if cast is not None:
                return cast
        return self.parse_postfix(self.parse_primary())

    def try_cast(self) -> AstNode | None:
        start_pos = self.pos
        start = self.advance().start
        try:
            first = self.peek()
            type_text = self.parse_type()
            while self.at("&"):
                self.advance()
                type_text += "&" + self.parse_type()
            self.expect(")")
        except _Backtrack:
            self.pos = start_pos
            return None
        nxt = self.peek()
        primitive = first is not None and first.text in PRIMITIVES
        if nxt is None:
            self.pos = start_pos
            return None
        castable = (
            nxt.kind in (IDENTIFIER, LIT_TOKEN)
            or nxt.text in ("(", "this", "super", "new", "!", "~")
            or (primitive and nxt.text in ("+", "-", "++", "--"))
        )
        if not castable:
            self.pos = start_pos
            return None
        if self.at_lambda():
            operand = self.parse_lambda()
        else:
            operand = self.parse_unary()
        return AstNode(CAST, (start, operand.end), (operand,), declared_type=type_text)

    def at_lambda(self) -> bool:
        if self.at_ident() and self.at("->", 1):
            return True
        if not self.at("("):
            return False
        depth = 0
        i = self.pos
        while i < len(self.toks):
            t = self.toks[i].text
            if t == "(":
                depth += 1
            elif t == ")":
                depth -= 1
                if depth == 0:
                    return i + 1 < len(self.toks) and self.toks[i + 1].text == "->"
            elif t in (";", "{", "}"):
                return False
            i += 1
        return False

    def parse_lambda(self) -> AstNode:
        start_pos = self.pos
        if self.at("("):
            self.skip_balanced()
        else:
            self.advance()
        self.expect("->")
        if self.at("{"):
            self.skip_balanced()
        else:
            depth = 0
            while self.peek() is not None:
                t = self.peek().text
                if depth == 0 and t in (",", ")", ";", "}", "]", ":"):
                    break
                if t in OPENERS:
                    depth += 1
                elif t in CLOSERS:
                    depth -= 1
                self.advance()
        return self.opaque(start_pos, "lambda captured as opaque expression")

    def parse_lambda_or(self, fallback) -> AstNode:
        if self.at_lambda():
            return self.parse_lambda()
        return fallback()

    def parse_primary(self) -> AstNode:
        tok = self.peek()
        if tok is None:
            raise _Backtrack("expected expression")
        if self.at_lambda():
            return self.parse_lambda()
        if tok.kind == LIT_TOKEN:
            self.advance()
            return AstNode(LITERAL, tok.span, name=tok.text)
        if tok.text == "(":
            self.advance()
            inner = self.parse_expression()
            self.expect(")")
            # Parenthesized expressions keep the inner node; the span is
            # widened so edits on it cover the parentheses.
            return _respan(inner, (tok.start, self.last_end()))
        if tok.text == "new":
            return self.parse_new()
        if tok.text == "switch":
            start_pos = self.pos
            self.advance()
            self.skip_balanced()
            if self.at("{"):
                self.skip_balanced()
            return self.opaque(start_pos, "switch expression skipped")
        if tok.kind == IDENTIFIER or tok.text in ("this", "super") or tok.text in PRIMITIVES:
            self.advance()
            if self.at("("):
                return self.parse_call(None, tok)
            if tok.text in PRIMITIVES:
                # int.class, int[].class
                start_pos = self.pos - 1
                while self.peek() is not None and self.peek().text in ("[", "]", ".", "class"):
                    self.advance()
                return self.opaque(start_pos, "class literal skipped")
            return AstNode(NAME, tok.span, name=tok.text)
        if tok.text == "@":
            start_pos = self.pos
            self.skip_annotation()
            return self.opaque(start_pos, "annotation skipped")
        raise _Backtrack(f"unexpected token {tok.text!r}")

    def parse_args(self) -> tuple[tuple[AstNode, ...], tuple[int, int]]:
        open_tok = self.expect("(")
        args: list[AstNode] = []
        while not self.at(")"):
            args.append(self.parse_lambda_or(self.parse_expression))
            if not self.at(","):
                break
            self.advance()
        close = self.expect(")")
        return tuple(args), (open_tok.start, close.end)

    def parse_call(self, receiver: AstNode | None, name_tok: Token) -> AstNode:
        args, paren = self.parse_args()
        children = ((receiver,) if receiver is not None else ()) + args
        start = receiver.start if receiver is not None else name_tok.start
        return AstNode(
            METHOD_INVOCATION,
            (start, paren[1]),
            children,
            name=name_tok.text,
            name_span=name_tok.span,
            paren_span=paren,
            has_receiver=receiver is not None,
        )

    def parse_new(self) -> AstNode:
        start_pos = self.pos
        start = self.advance().start
        type_text = self.parse_type_creation()
        if self.at("["):
            while self.at("["):
                self.skip_balanced()
            if self.at("{"):
                self.skip_balanced()
            return self.opaque(start_pos, "array creation skipped")
        if self.at("{") and type_text.endswith("[]"):
            self.skip_balanced()
            return self.opaque(start_pos, "array creation skipped")
        args, paren = self.parse_args()
        if self.at("{"):
            self.skip_balanced()
            return self.opaque(start_pos, "anonymous class captured as opaque expression")
        return AstNode(
            OBJECT_CREATION,
            (start, self.last_end()),
            args,
            declared_type=type_text,
            paren_span=paren,
        )

    def parse_type_creation(self) -> str:
        tok = self.peek()
        if tok is not None and tok.text in PRIMITIVES:
            self.advance()
            text = tok.text
            while self.at("[") and self.at("]", 1):
                self.advance()
                self.advance()
                text += "[]"
            return text
        text = self.expect_ident().text
        text += self.parse_type_args()
        while self.at(".") and self.at_ident(1):
            self.advance()
            text += "." + self.advance().text
            text += self.parse_type_args()
        while self.at("[") and self.at("]", 1):
            self.advance()
            self.advance()
            text += "[]"
        return text

    def parse_postfix(self, expr: AstNode) -> AstNode:
        while True:
            if self.at("."):
                self.advance()
                if self.at("<"):
                    self.parse_type_args()
                tok = self.peek()
                if tok is None:
                    raise _Backtrack("expected member name")
                if tok.text == "new":
                    inner = self.parse_new()
                    expr = AstNode(OPAQUE_EXPR, (expr.start, inner.end))
                    self.diagnostics.append(Diagnostic(expr.span, "qualified creation skipped"))
                    continue
                if tok.kind not in (IDENTIFIER,) and tok.text not in ("this", "class", "super"):
                    raise _Backtrack("expected member name")
                self.advance()
                if self.at("("):
                    expr = self.parse_call(expr, tok)
                else:
                    expr = AstNode(
                        FIELD_ACCESS, (expr.start, tok.end), (expr,), name=tok.text, name_span=tok.span
                    )
            elif self.at("["):
                self.advance()
                index = self.parse_expression()
                self.expect("]")
                expr = AstNode(ARRAY_ACCESS, (expr.start, self.last_end()), (expr, index))
            elif self.at("++") or self.at("--"):
                tok = self.advance()
                expr = AstNode(UNARY_EXPR, (expr.start, tok.end), (expr,), name=tok.text, role="postfix")
            elif self.at("::"):
                start = expr.start
                self.advance()
                self.advance()
                expr = AstNode(OPAQUE_EXPR, (start, self.last_end()))
                self.diagnostics.append(Diagnostic(expr.span, "method reference captured as opaque"))
            else:
                return expr


def _with_role(node: AstNode, role: str) -> AstNode:
    if node.role == role:
        return node
    return _replace(node, role=role)


def _respan(node: AstNode, span: tuple[int, int]) -> AstNode:
    return _replace(node, span=span)


def _replace(node: AstNode, **changes) -> AstNode:
    from dataclasses import replace

    return replace(node, **changes)


def parse(source: str, path: str | None = None) -> ParseResult:
    """Parse ``source``; never raises on malformed input."""
    parser = _Parser(source)
    ast = parser.parse_compilation_unit()
    ast = _mark_partial(ast)
    return ParseResult(
        source=source,
        ast=ast,
        tokens=tuple(parser.all_tokens),
        diagnostics=tuple(parser.diagnostics),
        path=path,
    )


def _mark_partial(node: AstNode) -> AstNode:
    if not node.children:
        return node
    children = tuple(_mark_partial(c) for c in node.children)
    partial = node.resolved_partially or any(
        c.kind == OPAQUE_EXPR or c.resolved_partially for c in children
    )
    if partial == node.resolved_partially and all(a is b for a, b in zip(children, node.children)):
        return node
    return _replace(node, children=children, resolved_partially=partial)
