"""Lexer and recursive-descent parser for `.mj` sources.

Grammar sketch::

    program := 'function' ID '(' [param {',' param}] ')' '->' 'int'
               {('requires' | 'ensures') expr} '{' {stmt} '}'
    param   := ID ':' ('int' | 'int' '[' INT ']')
    stmt    := 'var' ID ':' type ['=' expr] ';' | ID '=' expr ';'
             | ID '[' expr ']' '=' expr ';' | 'if' '(' expr ')' block ['else' (block | if)]
             | 'while' '(' expr ')' block | 'return' expr ';'
    expr    := or ['==>' expr]        (forall i in [lo, hi) : expr  is a primary)
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import DuplicateDeclaration, MissingEnsures, ParseError
from . import ast as A

KEYWORDS = {
    "function", "requires", "ensures", "var", "while", "if", "else",
    "return", "forall", "in", "true", "false", "int", "bool",
}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<lcomment>//[^\n]*)
  | (?P<bcomment>/\*.*?\*/)
  | (?P<int>\d+)
  | (?P<result>\\result)
  | (?P<id>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>==>|->|==|!=|<=|>=|&&|\|\||[-+*/%<>=!(){}\[\],;:.])
""", re.VERBOSE | re.DOTALL)


@dataclass(frozen=True)
class Token:
    kind: str  # int, id, kw, op, result, eof
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "bcomment":
            nls = text.count("\n")
            if nls:
                line += nls
                line_start = pos + text.rfind("\n") + 1
        elif kind in ("ws", "lcomment"):
            pass
        elif kind == "id":
            tokens.append(Token("kw" if text in KEYWORDS else "id", text, line, col))
        else:
            tokens.append(Token(kind, text, line, col))
        pos = m.end()
    if "/*" in source[pos:]:
        raise ParseError("unterminated comment", line, 1)
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.i = 0
        self.declared: set[str] = set()

    # --- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, text, kind=None):
        t = self.tok
        return t.text == text and (kind is None or t.kind == kind) and t.kind not in ("id",)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def expect_id(self) -> Token:
        if self.tok.kind != "id":
            self.error(f"expected identifier, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def declare(self, tok: Token):
        if tok.text in self.declared:
            raise DuplicateDeclaration(f"{tok.text!r} declared twice", tok.line, tok.col)
        self.declared.add(tok.text)

    # --- program ------------------------------------------------------------

    def program(self) -> A.Program:
        self.expect("function")
        name = self.expect_id().text
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.param())
            while self.at(","):
                self.advance()
                params.append(self.param())
        self.expect(")")
        self.expect("->")
        rt = self.advance()
        if rt.text != "int":
            self.error("functions must return int", rt)
        requires, ensures = [], []
        while self.at("requires") or self.at("ensures"):
            kw = self.advance().text
            (requires if kw == "requires" else ensures).append(self.expr())
        if not ensures:
            raise MissingEnsures(f"function {name!r} has no ensures clause", self.tok.line, self.tok.col)
        body = self.block()
        if self.tok.kind != "eof":
            self.error("trailing input after function body")
        if not body or not isinstance(body[-1], A.Return):
            raise ParseError("function body must end with a return statement", self.tok.line, 1)
        last = 0
        for s in A.walk_stmts(body):
            if isinstance(s, A.Return) and s is not body[-1]:
                raise ParseError("return is only allowed as the last statement", s.line, 1)
            if s.line <= last:
                raise ParseError("each statement must start on its own line", s.line, 1)
            last = s.line
        return A.Program(name, tuple(params), _conj(requires), _conj(ensures), body)

    def param(self):
        tok = self.expect_id()
        self.declare(tok)
        self.expect(":")
        return (tok.text, self.type_())

    def type_(self):
        t = self.advance()
        if t.text == "bool" and t.kind == "kw":
            self.error("bool variables are not supported", t)
        if t.text != "int" or t.kind != "kw":
            self.error("expected a type", t)
        if self.at("["):
            self.advance()
            n = self.advance()
            if n.kind != "int" or int(n.text) <= 0:
                self.error("array length must be a positive integer literal", n)
            self.expect("]")
            return A.ArrayType(int(n.text))
        return A.INT

    # --- statements ---------------------------------------------------------

    def block(self) -> tuple:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unexpected end of input, missing '}'")
            stmts.append(self.stmt())
        self.advance()
        return tuple(stmts)

    def stmt(self) -> A.Stmt:
        t = self.tok
        if self.at("var"):
            self.advance()
            name = self.expect_id()
            self.declare(name)
            self.expect(":")
            ty = self.type_()
            if isinstance(ty, A.ArrayType):
                self.error("local arrays are not supported", name)
            init = None
            if self.at("="):
                self.advance()
                init = self.expr()
            self.expect(";")
            return A.VarDecl(name.text, ty, init, t.line)
        if self.at("if"):
            return self.if_stmt()
        if self.at("while"):
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            return A.While(cond, self.block(), t.line)
        if self.at("return"):
            self.advance()
            e = self.expr()
            self.expect(";")
            return A.Return(e, t.line)
        if t.kind == "id":
            name = self.advance().text
            if self.at("["):
                self.advance()
                idx = self.expr()
                self.expect("]")
                self.expect("=")
                e = self.expr()
                self.expect(";")
                return A.ArrayAssign(name, idx, e, t.line)
            self.expect("=")
            e = self.expr()
            self.expect(";")
            return A.Assign(name, e, t.line)
        self.error(f"unexpected {t.text or 'end of input'!r} at start of statement")

    def if_stmt(self) -> A.If:
        t = self.expect("if")
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        then = self.block()
        orelse = ()
        if self.at("else"):
            self.advance()
            orelse = (self.if_stmt(),) if self.at("if") else self.block()
        return A.If(cond, then, orelse, t.line)

    # --- expressions --------------------------------------------------------

    def expr(self) -> A.Expr:
        left = self.or_expr()
        if self.at("==>"):
            t = self.advance()
            return A.BoolOp("==>", left, self.expr(), line=t.line)
        return left

    def or_expr(self):
        e = self.and_expr()
        while self.at("||"):
            t = self.advance()
            e = A.BoolOp("||", e, self.and_expr(), line=t.line)
        return e

    def and_expr(self):
        e = self.cmp_expr()
        while self.at("&&"):
            t = self.advance()
            e = A.BoolOp("&&", e, self.cmp_expr(), line=t.line)
        return e

    def cmp_expr(self):
        e = self.add_expr()
        if self.tok.kind == "op" and self.tok.text in ("==", "!=", "<", "<=", ">", ">="):
            t = self.advance()
            e = A.Cmp(t.text, e, self.add_expr(), line=t.line)
            if self.tok.kind == "op" and self.tok.text in ("==", "!=", "<", "<=", ">", ">="):
                self.error("comparisons do not chain; use parentheses")
        return e

    def add_expr(self):
        e = self.mul_expr()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            t = self.advance()
            e = A.BinOp(t.text, e, self.mul_expr(), line=t.line)
        return e

    def mul_expr(self):
        e = self.unary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/", "%"):
            t = self.advance()
            if t.text != "*":
                self.error(f"operator {t.text!r} is not supported", t)
            e = A.BinOp("*", e, self.unary(), line=t.line)
        return e

    def unary(self):
        t = self.tok
        if self.at("-"):
            self.advance()
            return A.Neg(self.unary(), line=t.line)
        if self.at("!"):
            self.advance()
            return A.Not(self.unary(), line=t.line)
        return self.primary()

    def primary(self):
        t = self.tok
        if t.kind == "int":
            self.advance()
            return A.IntLit(int(t.text), line=t.line)
        if t.kind == "result":
            self.advance()
            return A.Result(line=t.line)
        if t.kind == "kw" and t.text in ("true", "false"):
            self.advance()
            return A.BoolLit(t.text == "true", line=t.line)
        if t.kind == "kw" and t.text == "forall":
            self.advance()
            var = self.expect_id().text
            self.expect("in")
            self.expect("[")
            lo = self.expr()
            self.expect(",")
            hi = self.expr()
            self.expect(")")
            self.expect(":")
            return A.Forall(var, lo, hi, self.expr(), line=t.line)
        if t.kind == "id":
            self.advance()
            if self.at("["):
                self.advance()
                idx = self.expr()
                self.expect("]")
                return A.Index(t.text, idx, line=t.line)
            if self.at("."):
                self.advance()
                f = self.expect_id()
                if f.text != "length":
                    self.error("only '.length' is supported", f)
                return A.Length(t.text, line=t.line)
            return A.Var(t.text, line=t.line)
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.error(f"unexpected {t.text or 'end of input'!r} in expression")


def _conj(exprs):
    if not exprs:
        return None
    e = exprs[0]
    for x in exprs[1:]:
        e = A.BoolOp("&&", e, x)
    return e


def parse(source: str) -> A.Program:
    """Parse `.mj` source text into a Program, preserving line numbers."""
    return Parser(source).program()
