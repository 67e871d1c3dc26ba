"""Lossless tokenizer for the Java-style subject language.

Every character of the input ends up in exactly one token, so joining the
token texts gives back the original source.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

IDENTIFIER = "identifier"
KEYWORD = "keyword"
LITERAL = "literal"
PUNCTUATION = "punctuation"
COMMENT = "comment"
WHITESPACE = "whitespace"

TRIVIA = frozenset({COMMENT, WHITESPACE})

KEYWORDS = frozenset(
    """
    abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while
    """.split()
)
LITERAL_WORDS = frozenset({"true", "false", "null"})
PRIMITIVES = frozenset({"boolean", "byte", "char", "short", "int", "long", "float", "double", "void"})

# '>' is never merged with a following '>' so that nested generics close
# cleanly; the parser rebuilds shift operators from adjacent tokens.
_OPERATORS = sorted(
    """
    <<= >= <= == != && || ++ -- += -= *= /= %= &= |= ^= << -> :: ...
    """.split(),
    key=len,
    reverse=True,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<line_comment>//[^\r\n]*)
  | (?P<block_comment>/\*.*?(?:\*/|\Z))
  | (?P<text_block>\"\"\"(?:\\.|[^\\])*?(?:\"\"\"|\Z))
  | (?P<string>"(?:\\.|[^"\\\r\n])*"?)
  | (?P<char>'(?:\\.|[^'\\\r\n])*'?)
  | (?P<number>
        0[xX][0-9a-fA-F_]+[lL]?
      | 0[bB][01_]+[lL]?
      | (?:\d[\d_]*\.?[\d_]*|\.\d[\d_]*)(?:[eE][+-]?\d+)?[fFdDlL]?
    )
  | (?P<word>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<op>"""
    + "|".join(re.escape(op) for op in _OPERATORS)
    + r""")
  | (?P<other>.)
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int
    end: int

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    @property
    def is_trivia(self) -> bool:
        return self.kind in TRIVIA


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens, keeping comments and whitespace."""
    tokens: list[Token] = []
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        # The trailing '.' alternative guarantees progress.
        assert m is not None and m.end() > pos
        group = m.lastgroup
        text = m.group()
        if group == "ws":
            kind = WHITESPACE
        elif group in ("line_comment", "block_comment"):
            kind = COMMENT
        elif group in ("text_block", "string", "char", "number"):
            kind = LITERAL
        elif group == "word":
            if text in LITERAL_WORDS:
                kind = LITERAL
            elif text in KEYWORDS:
                kind = KEYWORD
            else:
                kind = IDENTIFIER
        else:
            kind = PUNCTUATION
        tokens.append(Token(kind, text, pos, m.end()))
        pos = m.end()
    return tokens


def significant(tokens: list[Token]) -> list[Token]:
    return [t for t in tokens if not t.is_trivia]


def normalized_text(source: str) -> str:
    """Token texts joined by single spaces; whitespace and comments dropped."""
    return " ".join(t.text for t in tokenize(source) if not t.is_trivia)
