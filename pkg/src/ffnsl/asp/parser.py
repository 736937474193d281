"""Tokenizer and recursive-descent parser for the logic-program text format.

Format summary (full grammar in README):
  - statements end with ``.``; ``:-`` separates head and body
  - body literals are separated by ``,`` or ``;``
  - ``not`` prefixes negation-as-failure literals
  - ``%`` starts a comment running to end of line
  - ``1..4`` is an inclusive integer range (facts only)
  - quoted strings (e.g. ``"1, 1"``) are opaque constants
  - ``_`` is an anonymous variable (fresh at every occurrence)
"""

from __future__ import annotations

from ..errors import AspSyntaxError
from .syntax import (Arith, Atom, Compare, Constant, Integer, Naf, NormalRule,
                     Pos, Program, Range, Variable)

_PUNCT2 = (":-", "..", "!=", "<=", ">=")
_PUNCT1 = ".,;(){}<>=+-*/"


class Token:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind, value, line, col):
        self.kind = kind
        self.value = value
        self.line = line
        self.col = col

    def __repr__(self):
        return f"{self.kind}:{self.value!r}"


def tokenize(text: str) -> list[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise AspSyntaxError("unterminated string", line, start_col)
                j += 1
            if j >= n:
                raise AspSyntaxError("unterminated string", line, start_col)
            tokens.append(Token("STRING", text[i:j + 1], line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("INT", int(text[i:j]), line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word == "not":
                kind = "NOT"
            elif word[0] == "_":
                kind = "ANON"
            elif word[0].isupper():
                kind = "VAR"
            else:
                kind = "IDENT"
            tokens.append(Token(kind, word, line, start_col))
            col += j - i
            i = j
            continue
        if ch == "#":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            if j == i + 1:
                raise AspSyntaxError("bare '#'", line, start_col)
            tokens.append(Token("DIRECTIVE", text[i + 1:j], line, start_col))
            col += j - i
            i = j
            continue
        two = text[i:i + 2]
        if two in _PUNCT2:
            tokens.append(Token(two, two, line, start_col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT1:
            tokens.append(Token(ch, ch, line, start_col))
            i += 1
            col += 1
            continue
        raise AspSyntaxError(f"unexpected character {ch!r}", line, start_col)
    tokens.append(Token("EOF", None, line, col))
    return tokens


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset=0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind) -> Token:
        tok = self.next()
        if tok.kind != kind:
            raise AspSyntaxError(f"expected {kind!r}, found {tok.value!r}", tok.line, tok.col)
        return tok

    def at(self, kind) -> bool:
        return self.peek().kind == kind

    def error(self, message):
        tok = self.peek()
        raise AspSyntaxError(message, tok.line, tok.col)


class _RuleParser:
    """Parses one statement; anonymous variables get names unique per rule."""

    def __init__(self, stream: TokenStream):
        self.s = stream
        self.anon_counter = 0

    def fresh_anon(self) -> Variable:
        self.anon_counter += 1
        return Variable(f"_{self.anon_counter}")

    def parse_rule(self) -> NormalRule:
        if self.s.at(":-"):
            self.s.next()
            body = self.parse_body()
            self.s.expect(".")
            return NormalRule(None, body)
        head = self.parse_atom()
        if self.s.at(":-"):
            self.s.next()
            body = self.parse_body()
        else:
            body = ()
        self.s.expect(".")
        return NormalRule(head, body)

    def parse_body(self) -> tuple:
        literals = [self.parse_literal()]
        while self.s.peek().kind in (",", ";"):
            self.s.next()
            literals.append(self.parse_literal())
        return tuple(literals)

    def parse_literal(self):
        if self.s.at("NOT"):
            self.s.next()
            return Naf(self.parse_atom())
        # an atom unless a comparison operator follows a leading term
        if self.s.at("IDENT") and self.s.peek(1).kind not in ("=", "!=", "<", "<=", ">", ">="):
            return Pos(self.parse_atom())
        left = self.parse_term()
        op_tok = self.s.peek()
        if op_tok.kind in ("=", "!=", "<", "<=", ">", ">="):
            self.s.next()
            right = self.parse_term()
            return Compare(op_tok.kind, left, right)
        if isinstance(left, Constant):
            return Pos(Atom(left.symbol))
        self.s.error("expected comparison operator after term")

    def parse_atom(self) -> Atom:
        tok = self.s.expect("IDENT")
        if not self.s.at("("):
            return Atom(tok.value)
        self.s.next()
        args = [self.parse_arg()]
        while self.s.at(","):
            self.s.next()
            args.append(self.parse_arg())
        self.s.expect(")")
        return Atom(tok.value, tuple(args))

    def parse_arg(self):
        # range shorthand is only legal as a whole argument
        if self.s.at("INT") and self.s.peek(1).kind == "..":
            lo = self.s.next().value
            self.s.next()
            hi_tok = self.s.expect("INT")
            return Range(lo, hi_tok.value)
        return self.parse_term()

    def parse_term(self):
        term = self.parse_mul()
        while self.s.peek().kind in ("+", "-"):
            op = self.s.next().kind
            term = Arith(op, term, self.parse_mul())
        return term

    def parse_mul(self):
        term = self.parse_primary()
        while self.s.peek().kind in ("*", "/"):
            op = self.s.next().kind
            term = Arith(op, term, self.parse_primary())
        return term

    def parse_primary(self):
        tok = self.s.next()
        if tok.kind == "INT":
            return Integer(tok.value)
        if tok.kind == "-":
            val = self.s.expect("INT")
            return Integer(-val.value)
        if tok.kind == "VAR":
            return Variable(tok.value)
        if tok.kind == "ANON":
            return self.fresh_anon()
        if tok.kind == "STRING":
            return Constant(tok.value)
        if tok.kind == "IDENT":
            if self.s.at("("):
                raise AspSyntaxError(
                    f"function symbol {tok.value!r} not supported in terms",
                    tok.line, tok.col)
            return Constant(tok.value)
        if tok.kind == "(":
            inner = self.parse_term()
            self.s.expect(")")
            return inner
        raise AspSyntaxError(f"unexpected token {tok.value!r} in term", tok.line, tok.col)


def parse_program(text: str) -> Program:
    """Parse program text into a syntax tree. Ranges are kept symbolic;
    they expand at grounding time."""
    stream = TokenStream(tokenize(text))
    rules = []
    while not stream.at("EOF"):
        rules.append(_RuleParser(stream).parse_rule())
    return Program(rules)


def parse_rule(text: str) -> NormalRule:
    program = parse_program(text)
    if len(program.rules) != 1:
        raise AspSyntaxError(f"expected exactly one rule, found {len(program.rules)}")
    return program.rules[0]


def parse_ground_atom(text: str) -> Atom:
    """Parse a single ground atom such as ``winner(2)``."""
    stream = TokenStream(tokenize(text))
    atom = _RuleParser(stream).parse_atom()
    if not stream.at("EOF"):
        stream.error("trailing input after atom")
    if not atom.is_ground():
        raise AspSyntaxError(f"atom {atom!r} is not ground")
    return atom
