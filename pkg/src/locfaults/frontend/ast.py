"""AST of the mini-language.

Nodes are frozen dataclasses so programs can be shared between threads and
compared structurally.  Statements carry their source line; expressions carry
a position for diagnostics only (excluded from equality) and an optional type
filled in by the typechecker.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

INT = "int"
BOOL = "bool"


@dataclass(frozen=True)
class ArrayType:
    length: int

    def __str__(self):
        return f"int[{self.length}]"


Type = Union[str, ArrayType]


# --- expressions ----------------------------------------------------------

@dataclass(frozen=True)
class Expr:
    pass


def _pos():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class IntLit(Expr):
    value: int
    ty: Optional[str] = _pos()
    line: Optional[int] = _pos()


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool
    ty: Optional[str] = _pos()
    line: Optional[int] = _pos()


@dataclass(frozen=True)
class Var(Expr):
    name: str
    ty: Optional[str] = _pos()
    line: Optional[int] = _pos()


@dataclass(frozen=True)
class Result(Expr):
    """The `\\result` keyword of postconditions."""
    ty: Optional[str] = _pos()
    line: Optional[int] = _pos()


@dataclass(frozen=True)
class Index(Expr):
    array: str
    index: Expr
    ty: Optional[str] = _pos()
    line: Optional[int] = _pos()


@dataclass(frozen=True)
class Length(Expr):
    array: str
    ty: Optional[str] = _pos()
    line: Optional[int] = _pos()


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # + - *
    left: Expr
    right: Expr
    ty: Optional[str] = _pos()
    line: Optional[int] = _pos()


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr
    ty: Optional[str] = _pos()
    line: Optional[int] = _pos()


@dataclass(frozen=True)
class Cmp(Expr):
    op: str  # == != < <= > >=
    left: Expr
    right: Expr
    ty: Optional[str] = _pos()
    line: Optional[int] = _pos()


@dataclass(frozen=True)
class BoolOp(Expr):
    op: str  # && || ==>
    left: Expr
    right: Expr
    ty: Optional[str] = _pos()
    line: Optional[int] = _pos()


@dataclass(frozen=True)
class Not(Expr):
    operand: Expr
    ty: Optional[str] = _pos()
    line: Optional[int] = _pos()


@dataclass(frozen=True)
class Forall(Expr):
    var: str
    lo: Expr
    hi: Expr  # exclusive
    body: Expr
    ty: Optional[str] = _pos()
    line: Optional[int] = _pos()


# --- statements -----------------------------------------------------------

@dataclass(frozen=True)
class Stmt:
    pass


@dataclass(frozen=True)
class VarDecl(Stmt):
    name: str
    type: Type
    init: Optional[Expr]
    line: int


@dataclass(frozen=True)
class Assign(Stmt):
    name: str
    expr: Expr
    line: int


@dataclass(frozen=True)
class ArrayAssign(Stmt):
    name: str
    index: Expr
    expr: Expr
    line: int


@dataclass(frozen=True)
class If(Stmt):
    cond: Expr
    then: tuple
    orelse: tuple
    line: int


@dataclass(frozen=True)
class While(Stmt):
    cond: Expr
    body: tuple
    line: int


@dataclass(frozen=True)
class Return(Stmt):
    expr: Expr
    line: int


@dataclass(frozen=True)
class Program:
    name: str
    params: tuple  # of (name, Type)
    requires: Optional[Expr]
    ensures: Expr
    body: tuple

    @property
    def array_lengths(self):
        return {n: t.length for n, t in self.params if isinstance(t, ArrayType)}

    @property
    def return_stmt(self):
        return self.body[-1]


def walk_stmts(stmts):
    """Yield every statement of a block, depth first, in source order."""
    for s in stmts:
        yield s
        if isinstance(s, If):
            yield from walk_stmts(s.then)
            yield from walk_stmts(s.orelse)
        elif isinstance(s, While):
            yield from walk_stmts(s.body)


def subexprs(e):
    """Immediate children of an expression."""
    if isinstance(e, (Index,)):
        return (e.index,)
    if isinstance(e, (BinOp, Cmp, BoolOp)):
        return (e.left, e.right)
    if isinstance(e, (Neg, Not)):
        return (e.operand,)
    if isinstance(e, Forall):
        return (e.lo, e.hi, e.body)
    return ()


def walk_expr(e):
    yield e
    for c in subexprs(e):
        yield from walk_expr(c)
