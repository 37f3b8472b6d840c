"""Static checks: scoping, typing, quantifier placement, definite assignment."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..errors import (QuantifierOutsideSpec, TypeMismatch, UndeclaredVariable,
                      UninitializedVariable)
from . import ast as A


@dataclass(frozen=True)
class TypedProgram:
    program: A.Program
    var_types: dict = field(compare=False)  # every declared name -> Type

    @property
    def name(self):
        return self.program.name

    def __getattr__(self, item):
        # delegate params, body, ensures, ... to the underlying program
        return getattr(self.program, item)


class _Checker:
    def __init__(self, program: A.Program):
        self.p = program
        self.var_types = {}

    def fail(self, cls, msg, line=None):
        raise cls(msg, line)

    # --- expressions --------------------------------------------------------

    def expr(self, e, scope, mode, assigned=None):
        """Return `e` with types filled in.

        mode is "body", "requires" or "ensures"; `assigned` (body only) is the
        set of locals definitely assigned at this point.
        """
        line = getattr(e, "line", None)
        if isinstance(e, A.IntLit):
            return replace(e, ty=A.INT)
        if isinstance(e, A.BoolLit):
            return replace(e, ty=A.BOOL)
        if isinstance(e, A.Result):
            if mode != "ensures":
                self.fail(TypeMismatch, "\\result is only allowed in ensures", line)
            return replace(e, ty=A.INT)
        if isinstance(e, A.Var):
            t = self.lookup(e.name, scope, line)
            if isinstance(t, A.ArrayType):
                self.fail(TypeMismatch, f"array {e.name!r} used as a scalar", line)
            if assigned is not None and e.name in self.var_types and e.name not in assigned:
                self.fail(UninitializedVariable, f"{e.name!r} may be read before assignment", line)
            return replace(e, ty=A.INT)
        if isinstance(e, (A.Index, A.Length)):
            t = self.lookup(e.array, scope, line)
            if not isinstance(t, A.ArrayType):
                self.fail(TypeMismatch, f"{e.array!r} is not an array", line)
            if isinstance(e, A.Length):
                return replace(e, ty=A.INT)
            idx = self.int_expr(e.index, scope, mode, assigned)
            return replace(e, index=idx, ty=A.INT)
        if isinstance(e, A.BinOp):
            return replace(e, left=self.int_expr(e.left, scope, mode, assigned),
                           right=self.int_expr(e.right, scope, mode, assigned), ty=A.INT)
        if isinstance(e, A.Neg):
            return replace(e, operand=self.int_expr(e.operand, scope, mode, assigned), ty=A.INT)
        if isinstance(e, A.Cmp):
            return replace(e, left=self.int_expr(e.left, scope, mode, assigned),
                           right=self.int_expr(e.right, scope, mode, assigned), ty=A.BOOL)
        if isinstance(e, A.BoolOp):
            return replace(e, left=self.bool_expr(e.left, scope, mode, assigned),
                           right=self.bool_expr(e.right, scope, mode, assigned), ty=A.BOOL)
        if isinstance(e, A.Not):
            return replace(e, operand=self.bool_expr(e.operand, scope, mode, assigned), ty=A.BOOL)
        if isinstance(e, A.Forall):
            if mode == "body":
                self.fail(QuantifierOutsideSpec, "forall is only allowed in requires/ensures", line)
            lo = self.int_expr(e.lo, scope, mode, assigned)
            hi = self.int_expr(e.hi, scope, mode, assigned)
            if e.var in scope or e.var in self.var_types:
                self.fail(TypeMismatch, f"quantified variable {e.var!r} shadows a declaration", line)
            body = self.bool_expr(e.body, {**scope, e.var: A.INT}, mode, assigned)
            return replace(e, lo=lo, hi=hi, body=body, ty=A.BOOL)
        raise TypeMismatch(f"unknown expression {e!r}", line)

    def int_expr(self, e, scope, mode, assigned):
        e = self.expr(e, scope, mode, assigned)
        if e.ty != A.INT:
            self.fail(TypeMismatch, "expected an int expression", getattr(e, "line", None))
        return e

    def bool_expr(self, e, scope, mode, assigned):
        e = self.expr(e, scope, mode, assigned)
        if e.ty != A.BOOL:
            self.fail(TypeMismatch, "expected a boolean expression", getattr(e, "line", None))
        return e

    def lookup(self, name, scope, line):
        if name not in scope:
            self.fail(UndeclaredVariable, f"{name!r} is not declared", line)
        return scope[name]

    # --- statements ---------------------------------------------------------

    def block(self, stmts, scope, assigned):
        """Check a block; returns (new statements, definitely-assigned set after)."""
        scope = dict(scope)
        out = []
        for s in stmts:
            s, assigned = self.stmt(s, scope, assigned)
            out.append(s)
        return tuple(out), assigned

    def stmt(self, s, scope, assigned):
        if isinstance(s, A.VarDecl):
            init = None
            if s.init is not None:
                init = self.int_expr(s.init, scope, "body", assigned)
            scope[s.name] = s.type
            self.var_types[s.name] = s.type
            if init is not None:
                assigned = assigned | {s.name}
            return replace(s, init=init), assigned
        if isinstance(s, A.Assign):
            t = self.lookup(s.name, scope, s.line)
            if isinstance(t, A.ArrayType):
                self.fail(TypeMismatch, f"cannot assign whole array {s.name!r}", s.line)
            e = self.int_expr(s.expr, scope, "body", assigned)
            return replace(s, expr=e), assigned | {s.name}
        if isinstance(s, A.ArrayAssign):
            t = self.lookup(s.name, scope, s.line)
            if not isinstance(t, A.ArrayType):
                self.fail(TypeMismatch, f"{s.name!r} is not an array", s.line)
            idx = self.int_expr(s.index, scope, "body", assigned)
            e = self.int_expr(s.expr, scope, "body", assigned)
            return replace(s, index=idx, expr=e), assigned
        if isinstance(s, A.If):
            cond = self.bool_expr(s.cond, scope, "body", assigned)
            then, a1 = self.block(s.then, scope, assigned)
            orelse, a2 = self.block(s.orelse, scope, assigned)
            return replace(s, cond=cond, then=then, orelse=orelse), a1 & a2
        if isinstance(s, A.While):
            cond = self.bool_expr(s.cond, scope, "body", assigned)
            body, _ = self.block(s.body, scope, assigned)
            return replace(s, cond=cond, body=body), assigned
        if isinstance(s, A.Return):
            return replace(s, expr=self.int_expr(s.expr, scope, "body", assigned)), assigned
        raise TypeMismatch(f"unknown statement {s!r}")

    def run(self) -> TypedProgram:
        p = self.p
        params = dict(p.params)
        requires = None
        if p.requires is not None:
            requires = self.bool_expr(p.requires, params, "requires", None)
        # top-level locals stay visible to ensures, with their final values
        scope, assigned, body = dict(params), frozenset(), []
        for s in p.body:
            s, assigned = self.stmt(s, scope, assigned)
            body.append(s)
        body = tuple(body)
        ensures = self.bool_expr(p.ensures, scope, "ensures", assigned)
        prog = replace(p, requires=requires, ensures=ensures, body=body)
        return TypedProgram(prog, {**params, **self.var_types})


def typecheck(p: A.Program) -> TypedProgram:
    """Annotate every expression with its type, rejecting ill-typed programs."""
    return _Checker(p).run()
