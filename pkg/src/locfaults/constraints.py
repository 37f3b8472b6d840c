"""Finite-domain constraint IR and its construction from DSA graphs."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Optional

from .cfg import AssignBlock, Cfg, CondNode, Coord, PostNode
from .errors import IncompleteCounterexample, UnsupportedExpr
from .frontend import ast as A
from .frontend.interp import eval_expr

DEFAULT_DOMAIN = (-100_000, 100_000)

HARD, SOFT = "hard", "soft"


# --- terms -----------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Sym:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Add:
    args: tuple

    def __str__(self):
        out = str(self.args[0])
        for a in self.args[1:]:
            if isinstance(a, Neg):
                out += f" - {_paren(a.arg)}"
            else:
                out += f" + {a}"
        return f"({out})"


@dataclass(frozen=True)
class Mul:
    left: object
    right: object

    def __str__(self):
        return f"{_paren(self.left)}*{_paren(self.right)}"


@dataclass(frozen=True)
class Neg:
    arg: object

    def __str__(self):
        return f"-{_paren(self.arg)}"


@dataclass(frozen=True)
class Elem:
    """Read of an array whose cells are `cells` at a symbolic index."""
    cells: tuple
    index: object
    array: str = ""

    def __str__(self):
        return f"{self.array or 'elem'}[{self.index}]"


def _paren(t):
    return f"({t})" if isinstance(t, (Mul, Neg)) else str(t)


# --- formulas --------------------------------------------------------------

NEGATE = {"==": "!=", "!=": "==", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}


@dataclass(frozen=True)
class Cmp:
    op: str
    left: object
    right: object

    def __str__(self):
        return f"{self.left} {self.op} {self.right}"


@dataclass(frozen=True)
class And:
    args: tuple

    def __str__(self):
        return "(" + " && ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Or:
    args: tuple

    def __str__(self):
        return "(" + " || ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Not:
    arg: object

    def __str__(self):
        return f"!({self.arg})"


@dataclass(frozen=True)
class BoolConst:
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


TRUE, FALSE = BoolConst(True), BoolConst(False)


def implies(a, b):
    return Or((Not(a), b))


def symbols(x, out=None):
    """Set of symbol names occurring in a term or formula."""
    if out is None:
        out = set()
    if isinstance(x, Sym):
        out.add(x.name)
    elif isinstance(x, (Add, And, Or)):
        for a in x.args:
            symbols(a, out)
    elif isinstance(x, (Mul, Cmp)):
        symbols(x.left, out)
        symbols(x.right, out)
    elif isinstance(x, (Neg, Not)):
        symbols(x.arg, out)
    elif isinstance(x, Elem):
        for c in x.cells:
            symbols(c, out)
        symbols(x.index, out)
    return out


def evaluate(x, env: dict):
    """Exact value of a term (int) or formula (bool) under a full assignment."""
    if isinstance(x, Const):
        return x.value
    if isinstance(x, Sym):
        return env[x.name]
    if isinstance(x, Add):
        return sum(evaluate(a, env) for a in x.args)
    if isinstance(x, Mul):
        return evaluate(x.left, env) * evaluate(x.right, env)
    if isinstance(x, Neg):
        return -evaluate(x.arg, env)
    if isinstance(x, Elem):
        i = evaluate(x.index, env)
        if not 0 <= i < len(x.cells):
            raise IndexError(i)
        return evaluate(x.cells[i], env)
    if isinstance(x, Cmp):
        a, b = evaluate(x.left, env), evaluate(x.right, env)
        return {"==": a == b, "!=": a != b, "<": a < b, "<=": a <= b,
                ">": a > b, ">=": a >= b}[x.op]
    if isinstance(x, And):
        return all(evaluate(a, env) for a in x.args)
    if isinstance(x, Or):
        return any(evaluate(a, env) for a in x.args)
    if isinstance(x, Not):
        return not evaluate(x.arg, env)
    if isinstance(x, BoolConst):
        return x.value
    raise TypeError(f"cannot evaluate {x!r}")


def holds(x, env, neg=False) -> bool:
    """Truth of a formula where any comparison reading outside an array is false.

    Negation is pushed down to the comparisons first, so `!(a[9] == 0)` is
    false as well, matching what the solver propagates.
    """
    if isinstance(x, Not):
        return holds(x.arg, env, not neg)
    if isinstance(x, (And, Or)):
        conj = isinstance(x, And) != neg
        vals = (holds(a, env, neg) for a in x.args)
        return all(vals) if conj else any(vals)
    if isinstance(x, Cmp):
        try:
            return bool(evaluate(x, env)) != neg
        except IndexError:
            return False
    if isinstance(x, BoolConst):
        return x.value != neg
    return bool(evaluate(x, env)) != neg


# --- constraints and systems ------------------------------------------------

KINDS = ("LinearEq", "LinearIneq", "Product", "ElementRead", "ElementWrite", "BoolOp", "Comparison")


@dataclass(frozen=True)
class Constraint:
    id: int
    kind: str
    formula: object
    coord: Optional[Coord]
    role: str
    text: str = ""
    origin: str = ""   # assign, store, junction, ce, cond, post, requires, flow

    @property
    def coord_str(self):
        return str(self.coord) if self.coord is not None else "-"

    def __str__(self):
        return f"{self.role} {self.coord_str} : {self.text or self.formula}"


@dataclass
class Csp:
    vars: dict = field(default_factory=dict)   # name -> (lo, hi)
    hard: list = field(default_factory=list)
    soft: list = field(default_factory=list)

    def add_var(self, name, dom=DEFAULT_DOMAIN):
        if name not in self.vars:
            self.vars[name] = tuple(dom)

    def by_id(self, cid):
        for c in self.hard + self.soft:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def with_soft(self, soft):
        return Csp(dict(self.vars), list(self.hard), list(soft))

    def dump(self) -> str:
        return "\n".join(str(c) for c in self.hard + self.soft) + "\n"


def classify(formula, origin="") -> str:
    if origin == "store":
        return "ElementWrite"
    if _has(formula, Elem) or origin == "read":
        return "ElementRead"
    if isinstance(formula, (And, Or, Not)):
        return "BoolOp"
    if isinstance(formula, Cmp):
        if _nonlinear(formula.left) or _nonlinear(formula.right):
            return "Product"
        return "LinearEq" if formula.op == "==" else "LinearIneq"
    return "Comparison"


def _has(x, cls):
    if isinstance(x, cls):
        return True
    if isinstance(x, (Add, And, Or)):
        return any(_has(a, cls) for a in x.args)
    if isinstance(x, (Mul, Cmp)):
        return _has(x.left, cls) or _has(x.right, cls)
    if isinstance(x, (Neg, Not)):
        return _has(x.arg, cls)
    if isinstance(x, Elem):
        return _has(x.index, cls)
    return False


def _nonlinear(t):
    if isinstance(t, Mul):
        return not (isinstance(t.left, Const) or isinstance(t.right, Const)) \
            or _nonlinear(t.left) or _nonlinear(t.right)
    if isinstance(t, Add):
        return any(_nonlinear(a) for a in t.args)
    if isinstance(t, Neg):
        return _nonlinear(t.arg)
    return False


def cell(array_version: str, i: int) -> str:
    return f"{array_version}[{i}]"


# --- translation -----------------------------------------------------------

class Translator:
    """Builds constraints from a DSA graph.

    mode "path": array indices are replaced by their concrete values in
    `concrete` (the propagated environment) when available, and array versions
    that differ in one cell share the other cells' symbols.
    mode "symbolic": array reads at non-constant indices stay symbolic.
    mode "bmc": like symbolic, and every array version gets its own cells.
    """

    def __init__(self, g: Cfg, mode: str = "path", concrete: Optional[dict] = None,
                 domain=DEFAULT_DOMAIN):
        self.g = g
        self.mode = mode
        self.concrete = concrete or {}
        self.domain = domain
        self.csp = Csp()
        self.ids = itertools.count()
        prog = getattr(g.program, "program", g.program)
        self.prog = prog
        self.lengths = {}
        self.cells = {}
        for name, ty in prog.params:
            if isinstance(ty, A.ArrayType):
                v = g.input_names.get(name, f"{name}_0")
                self.lengths[name] = ty.length
                self.cells[v] = [cell(v, i) for i in range(ty.length)]
        self.result_term = None

    # terms and formulas

    def base_name(self, version):
        return version.rsplit("_", 1)[0]

    def array_cells(self, version):
        if version not in self.cells:
            n = self.lengths[self.base_name(version)]
            self.cells[version] = [cell(version, i) for i in range(n)]
        return self.cells[version]

    def sym(self, name):
        self.csp.add_var(name, self.domain)
        return Sym(name)

    def term(self, e, bound=None):
        bound = bound or {}
        if isinstance(e, A.IntLit):
            return Const(e.value)
        if isinstance(e, A.Var):
            if e.name in bound:
                return Const(bound[e.name])
            return self.sym(e.name)
        if isinstance(e, A.Result):
            if self.result_term is None:
                raise UnsupportedExpr("\\result outside the postcondition")
            return self.result_term
        if isinstance(e, A.Length):
            return Const(self.lengths[self.base_name(e.array)])
        if isinstance(e, A.BinOp):
            l, r = self.term(e.left, bound), self.term(e.right, bound)
            if e.op == "+":
                return Add((l, r))
            if e.op == "-":
                return Add((l, Neg(r)))
            if e.op == "*":
                return Mul(l, r)
        if isinstance(e, A.Neg):
            return Neg(self.term(e.operand, bound))
        if isinstance(e, A.Index):
            cells = self.array_cells(e.array)
            idx = self.const_index(e.index, bound)
            if idx is not None:
                if not 0 <= idx < len(cells):
                    raise UnsupportedExpr(f"index {idx} out of bounds for {e.array}")
                return self.sym(cells[idx])
            return Elem(tuple(self.sym(c) for c in cells), self.term(e.index, bound), e.array)
        raise UnsupportedExpr(f"unsupported expression {e!r}")

    def const_index(self, e, bound):
        """Concrete index value if it is a constant or, in path mode, propagated."""
        try:
            return eval_expr(e, dict(bound))
        except Exception:
            pass
        if self.mode == "path":
            env = dict(self.concrete)
            env.update(bound)
            try:
                return eval_expr(e, env)
            except Exception:
                return None
        return None

    def formula(self, e, bound=None):
        bound = bound or {}
        if isinstance(e, A.BoolLit):
            return BoolConst(e.value)
        if isinstance(e, A.Cmp):
            return Cmp(e.op, self.term(e.left, bound), self.term(e.right, bound))
        if isinstance(e, A.BoolOp):
            l, r = self.formula(e.left, bound), self.formula(e.right, bound)
            if e.op == "&&":
                return And((l, r))
            if e.op == "||":
                return Or((l, r))
            return implies(l, r)
        if isinstance(e, A.Not):
            return Not(self.formula(e.operand, bound))
        if isinstance(e, A.Forall):
            lo = eval_expr(_const_lengths(e.lo, self), {})
            hi = eval_expr(_const_lengths(e.hi, self), {})
            parts = [self.formula(e.body, {**bound, e.var: v}) for v in range(lo, hi)]
            return And(tuple(parts)) if parts else TRUE
        raise UnsupportedExpr(f"unsupported condition {e!r}")

    # constraints

    def make(self, formula, coord, role, origin, text=None):
        kind = classify(formula, origin)
        return Constraint(next(self.ids), kind, formula, coord, role, text or str(formula), origin)

    def translate_assignment(self, a, role=None):
        """Constraint for one DSA assignment; None when it only aliases cells."""
        role = role or (HARD if a.junction else SOFT)
        origin = "junction" if a.junction else "assign"
        if self.base_name(a.target) in self.lengths:
            return self._array_assignment(a, role, origin)
        rhs = self.term(a.expr)
        f = Cmp("==", self.sym(a.target), rhs)
        if origin == "assign" and _reads_array(a.expr):
            origin = "read"
        return self.make(f, a.coord, role, origin, text=f"{a.target} = {rhs}")

    def _array_assignment(self, a, role, origin):
        if a.index is None:
            # whole-array copy at a junction
            src = a.expr.name
            if self.mode != "bmc":
                self.cells[a.target] = list(self.array_cells(src))
                return None
            new, old = self.array_cells(a.target), self.array_cells(src)
            f = And(tuple(Cmp("==", self.sym(n), self.sym(o)) for n, o in zip(new, old)))
            return self.make(f, a.coord, role, origin, text=f"{a.target} = {src}")
        old = self.array_cells(a.base)
        value = self.term(a.expr)
        idx = self.const_index(a.index, {})
        if idx is not None and self.mode != "bmc":
            if not 0 <= idx < len(old):
                raise UnsupportedExpr(f"store index {idx} out of bounds")
            new = list(old)
            new[idx] = cell(a.target, idx)
            self.cells[a.target] = new
            f = Cmp("==", self.sym(new[idx]), value)
            return self.make(f, a.coord, role, "store",
                             text=f"{a.target} = store({a.base}, {idx}, {value})")
        new = self.array_cells(a.target)
        it = Const(idx) if idx is not None else self.term(a.index)
        parts = [And((Cmp(">=", it, Const(0)), Cmp("<", it, Const(len(old)))))]
        for j, (n, o) in enumerate(zip(new, old)):
            parts.append(Or((And((Cmp("==", it, Const(j)), Cmp("==", self.sym(n), value))),
                             And((Cmp("!=", it, Const(j)), Cmp("==", self.sym(n), self.sym(o)))))))
        return self.make(And(tuple(parts)), a.coord, role, "store",
                         text=f"{a.target} = store({a.base}, {it}, {value})")

    def translate_block(self, b: AssignBlock):
        out = []
        for a in b.assigns:
            c = self.translate_assignment(a)
            if c is not None:
                out.append(c)
        return out

    def translate_cond(self, c: CondNode, taken: bool):
        f = self.formula(c.expr)
        if not taken:
            f = Not(f)
        return self.make(f, c.coord, HARD, "cond")

    def translate_post(self, p: PostNode, negate=False):
        self.result_term = self.term(p.result) if p.result is not None else None
        f = self.formula(p.expr)
        coord = Coord(self.prog.return_stmt.line)
        if negate:
            return [self.make(Not(f), coord, HARD, "post", text=f"!({f})")]
        return [self.make(x, coord, HARD, "post") for x in _conjuncts(f)]

    def translate_ce(self, ce: dict):
        out = []
        for name, ty in self.prog.params:
            if name not in ce:
                raise IncompleteCounterexample(f"counterexample does not bind {name!r}")
            v = self.g.input_names.get(name, f"{name}_0")
            if isinstance(ty, A.ArrayType):
                vals = list(ce[name])
                if len(vals) != ty.length:
                    raise IncompleteCounterexample(f"{name} needs {ty.length} cells, got {len(vals)}")
                for i, x in enumerate(vals):
                    f = Cmp("==", self.sym(cell(v, i)), Const(int(x)))
                    out.append(self.make(f, None, HARD, "ce"))
            else:
                f = Cmp("==", self.sym(v), Const(int(ce[name])))
                out.append(self.make(f, None, HARD, "ce"))
        return out

    def add(self, cons):
        for c in cons:
            if c is None:
                continue
            (self.csp.hard if c.role == HARD else self.csp.soft).append(c)
        return self.csp


def _conjuncts(f):
    if isinstance(f, And):
        out = []
        for a in f.args:
            out.extend(_conjuncts(a))
        return out
    return [f]


def _reads_array(e):
    return any(isinstance(x, A.Index) for x in A.walk_expr(e))


def _const_lengths(e, tr):
    """Replace `a.length` by its value so quantifier bounds evaluate without state."""
    if isinstance(e, A.Length):
        return A.IntLit(tr.lengths[tr.base_name(e.array)])
    if isinstance(e, A.BinOp):
        return replace(e, left=_const_lengths(e.left, tr), right=_const_lengths(e.right, tr))
    if isinstance(e, A.Neg):
        return replace(e, operand=_const_lengths(e.operand, tr))
    return e


# --- path systems ------------------------------------------------------------

def path_csp(g: Cfg, ce: dict, visited, env: dict, tail="post", taken=None,
             symbolic_indices=False, domain=DEFAULT_DOMAIN) -> Csp:
    """System of one explored path.

    `visited` lists node ids in execution order.  With tail="post" the system
    is CE, path assignments and the postcondition; with tail="cond" the last
    visited node must be a condition, asserted in direction `taken`, and only
    the assignments before it are included.
    """
    tr = Translator(g, "symbolic" if symbolic_indices else "path", env, domain)
    tr.add(tr.translate_ce(ce))
    body = visited[:-1] if tail == "cond" else visited
    for nid in body:
        node = g.nodes[nid]
        if isinstance(node, AssignBlock):
            tr.add(tr.translate_block(node))
    if tail == "cond":
        tr.add([tr.translate_cond(g.nodes[visited[-1]], taken)])
    else:
        tr.add(tr.translate_post(g.post_node))
    return tr.csp
