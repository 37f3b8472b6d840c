"""Finite-domain solver: interval bounds propagation plus depth-first search.

Linear comparisons get a dedicated bounds propagator; every other formula is
narrowed by forward/backward interval evaluation over its expression tree.
Soft constraints can be guarded by 0/1 indicator variables, counted by an
AtMost propagator and blocked by clauses, which is all MCS enumeration needs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

from . import constraints as C
from .errors import ResourceLimit

INF = math.inf
DEFAULT_NODE_LIMIT = 10_000_000
DEFAULT_TIME_LIMIT = 30.0
SMALL_SPACE = 50_000


@dataclass
class Sat:
    model: dict

    def __bool__(self):
        return True


@dataclass
class Unsat:
    def __bool__(self):
        return False


@dataclass
class Limits:
    nodes: int = DEFAULT_NODE_LIMIT
    seconds: float = DEFAULT_TIME_LIMIT


@dataclass
class Stats:
    nodes: int = 0
    calls: int = 0
    seconds: float = 0.0


# --- store -----------------------------------------------------------------

class Store:
    __slots__ = ("lo", "hi", "trail", "changed")

    def __init__(self, lo, hi):
        self.lo = lo
        self.hi = hi
        self.trail = []
        self.changed = []

    def fixed(self, v):
        return self.lo[v] == self.hi[v]

    def set_lo(self, v, x):
        if x > self.lo[v]:
            if x > self.hi[v]:
                return False
            self.trail.append((v, self.lo[v], self.hi[v]))
            self.lo[v] = x
            self.changed.append(v)
        return True

    def set_hi(self, v, x):
        if x < self.hi[v]:
            if x < self.lo[v]:
                return False
            self.trail.append((v, self.lo[v], self.hi[v]))
            self.hi[v] = x
            self.changed.append(v)
        return True

    def narrow(self, v, lo, hi):
        return self.set_lo(v, lo) and self.set_hi(v, hi)

    def undo(self, mark):
        trail, lo, hi = self.trail, self.lo, self.hi
        while len(trail) > mark:
            v, l, h = trail.pop()
            lo[v] = l
            hi[v] = h


def _ceil(x):
    if x == INF or x == -INF:
        return x
    if isinstance(x, int):
        return x
    return math.ceil(x)


def _floor(x):
    if x == INF or x == -INF:
        return x
    if isinstance(x, int):
        return x
    return math.floor(x)


def _cdiv(x, d):
    """ceil(x / d) for int or infinite x and nonzero int d."""
    if x == INF or x == -INF:
        return x if d > 0 else -x
    return -(-x // d)


def _fdiv(x, d):
    """floor(x / d) for int or infinite x and nonzero int d."""
    if x == INF or x == -INF:
        return x if d > 0 else -x
    return x // d


# --- propagators -----------------------------------------------------------

class Prop:
    vars: tuple = ()

    def propagate(self, s: Store) -> bool:
        return True

    def truth(self, s: Store):
        """True if entailed by the box, False if violated everywhere, else None."""
        return None


class FalseProp(Prop):
    def propagate(self, s):
        return False

    def truth(self, s):
        return False


class TrueProp(Prop):
    def truth(self, s):
        return True


class LinearProp(Prop):
    """sum(a_i * x_i) + c  op  0, op in {==, <=, !=}."""

    def __init__(self, terms, c, op):
        self.coefs = [a for a, _ in terms]
        self.vars = tuple(v for _, v in terms)
        self.c = c
        self.op = op

    def _sums(self, s):
        lo, hi = s.lo, s.hi
        smin = smax = self.c
        for a, v in zip(self.coefs, self.vars):
            if a > 0:
                smin += a * lo[v]
                smax += a * hi[v]
            else:
                smin += a * hi[v]
                smax += a * lo[v]
        return smin, smax

    def truth(self, s):
        mn, mx = self._sums(s)
        if self.op == "<=":
            return True if mx <= 0 else False if mn > 0 else None
        if self.op == "==":
            return True if mn == mx == 0 else False if mn > 0 or mx < 0 else None
        return False if mn == mx == 0 else True if mn > 0 or mx < 0 else None

    def propagate(self, s):
        if self.op == "!=":
            return self._neq(s)
        lo, hi = s.lo, s.hi
        smin, smax = self._sums(s)
        if smin > 0:
            return False
        for a, v in zip(self.coefs, self.vars):
            # a*x <= -(smin - min(a*x))
            if a > 0:
                slack = a * lo[v] - smin
                if slack // a < hi[v] and not s.set_hi(v, slack // a):
                    return False
            else:
                slack = a * hi[v] - smin
                if -(slack // -a) > lo[v] and not s.set_lo(v, -(slack // -a)):
                    return False
        if self.op == "==":
            smin, smax = self._sums(s)
            if smax < 0:
                return False
            for a, v in zip(self.coefs, self.vars):
                # a*x >= -(smax - max(a*x))
                if a > 0:
                    need = a * hi[v] - smax
                    if -(-need // a) > lo[v] and not s.set_lo(v, -(-need // a)):
                        return False
                else:
                    need = a * lo[v] - smax
                    if need // a < hi[v] and not s.set_hi(v, need // a):
                        return False
        return True

    def _neq(self, s):
        free = [(a, v) for a, v in zip(self.coefs, self.vars) if not s.fixed(v)]
        rest = self.c + sum(a * s.lo[v] for a, v in zip(self.coefs, self.vars) if s.fixed(v))
        if not free:
            return rest != 0
        if len(free) == 1:
            a, v = free[0]
            if (-rest) % a == 0:
                bad = -rest // a
                if s.lo[v] == bad:
                    return s.set_lo(v, bad + 1)
                if s.hi[v] == bad:
                    return s.set_hi(v, bad - 1)
        return True


# expression trees for generic propagation:
#   ("c", value) ("v", var) ("lin", [(a, node)], const) ("mul", n1, n2) ("sq", n)
#   ("elem", [cell vars], index node)

class TreeCmp(Prop):
    """node op 0 with op in {==, <=, !=}, narrowed by HC4-style revision."""

    def __init__(self, node, op):
        self.node = node
        self.op = op
        vs = []
        _tree_vars(node, vs)
        self.vars = tuple(dict.fromkeys(vs))

    def truth(self, s):
        iv = _fwd(self.node, s)
        if iv is None:
            return False
        mn, mx = iv
        if self.op == "<=":
            return True if mx <= 0 else False if mn > 0 else None
        if self.op == "==":
            return True if mn == mx == 0 else False if mn > 0 or mx < 0 else None
        return False if mn == mx == 0 else True if mn > 0 or mx < 0 else None

    def propagate(self, s):
        if self.op == "!=":
            iv = _fwd(self.node, s)
            if iv is None:
                return False
            if iv[0] == iv[1] == 0:
                return False
            return True
        target = (-INF, 0) if self.op == "<=" else (0, 0)
        return _bwd(self.node, target, s)


def _tree_vars(n, out):
    tag = n[0]
    if tag == "v":
        out.append(n[1])
    elif tag == "lin":
        for _, ch in n[1]:
            _tree_vars(ch, out)
    elif tag == "mul":
        _tree_vars(n[1], out)
        _tree_vars(n[2], out)
    elif tag == "sq":
        _tree_vars(n[1], out)
    elif tag == "elem":
        out.extend(n[1])
        _tree_vars(n[2], out)


def _fwd(n, s):
    tag = n[0]
    if tag == "c":
        return (n[1], n[1])
    if tag == "v":
        return (s.lo[n[1]], s.hi[n[1]])
    if tag == "lin":
        lo = hi = n[2]
        for a, ch in n[1]:
            iv = _fwd(ch, s)
            if iv is None:
                return None
            if a > 0:
                lo += a * iv[0]
                hi += a * iv[1]
            else:
                lo += a * iv[1]
                hi += a * iv[0]
        return (lo, hi)
    if tag == "mul":
        x, y = _fwd(n[1], s), _fwd(n[2], s)
        if x is None or y is None:
            return None
        ps = (x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1])
        return (min(ps), max(ps))
    if tag == "sq":
        x = _fwd(n[1], s)
        if x is None:
            return None
        a, b = x
        if a >= 0:
            return (a * a, b * b)
        if b <= 0:
            return (b * b, a * a)
        return (0, max(a * a, b * b))
    if tag == "elem":
        cells = n[1]
        ix = _fwd(n[2], s)
        if ix is None:
            return None
        lo_i, hi_i = max(ix[0], 0), min(ix[1], len(cells) - 1)
        if lo_i > hi_i:
            return None
        return (min(s.lo[cells[i]] for i in range(lo_i, hi_i + 1)),
                max(s.hi[cells[i]] for i in range(lo_i, hi_i + 1)))
    raise ValueError(tag)


def _bwd(n, target, s):
    """Narrow the subtree `n` so that its value lies in `target`."""
    iv = _fwd(n, s)
    if iv is None:
        return False
    lo, hi = max(iv[0], target[0]), min(iv[1], target[1])
    if lo > hi:
        return False
    tag = n[0]
    if tag == "c":
        return True
    if tag == "v":
        return s.narrow(n[1], _ceil(lo), _floor(hi))
    if tag == "lin":
        kids = n[1]
        ivs = [_fwd(ch, s) for _, ch in kids]
        parts = []
        for (a, _), civ in zip(kids, ivs):
            parts.append((a * civ[0], a * civ[1]) if a > 0 else (a * civ[1], a * civ[0]))
        tot_lo = sum(p[0] for p in parts) + n[2]
        tot_hi = sum(p[1] for p in parts) + n[2]
        for k, ((a, ch), p) in enumerate(zip(kids, parts)):
            # a * child in [lo - (tot_hi - p_hi), hi - (tot_lo - p_lo)]
            r_lo = lo - (tot_hi - p[1])
            r_hi = hi - (tot_lo - p[0])
            if a > 0:
                c_lo, c_hi = _cdiv(r_lo, a), _fdiv(r_hi, a)
            else:
                c_lo, c_hi = _cdiv(r_hi, a), _fdiv(r_lo, a)
            if ch[0] == "c":
                continue
            if not _bwd(ch, (c_lo, c_hi), s):
                return False
        return True
    if tag == "mul":
        x, y = n[1], n[2]
        for a, b in ((x, y), (y, x)):
            biv = _fwd(b, s)
            if biv is None:
                return False
            if biv[0] > 0 or biv[1] < 0:
                ds = (biv[0], biv[1])
                q_lo = min(_cdiv(t, d) for t in (lo, hi) for d in ds)
                q_hi = max(_fdiv(t, d) for t in (lo, hi) for d in ds)
                if not _bwd(a, (q_lo, q_hi), s):
                    return False
            elif lo > 0 or hi < 0:
                # product excludes zero, so neither factor can be zero
                aiv = _fwd(a, s)
                if aiv is None:
                    return False
                if aiv[0] == 0 and not _bwd(a, (1, INF), s):
                    return False
                if aiv[1] == 0 and not _bwd(a, (-INF, -1), s):
                    return False
        return True
    if tag == "sq":
        if hi < 0:
            return False
        r = math.isqrt(int(hi)) if hi != INF else INF
        if not _bwd(n[1], (-r, r), s):
            return False
        if lo > 0:
            q = math.isqrt(int(lo) - 1) + 1  # smallest r with r*r >= lo
            x = _fwd(n[1], s)
            if x[0] > -q and not _bwd(n[1], (q, INF), s):
                return False
            x = _fwd(n[1], s)
            if x[1] < q and not _bwd(n[1], (-INF, -q), s):
                return False
        return True
    if tag == "elem":
        cells, ixn = n[1], n[2]
        ix = _fwd(ixn, s)
        lo_i, hi_i = max(ix[0], 0), min(ix[1], len(cells) - 1)
        ok = [i for i in range(lo_i, hi_i + 1) if s.lo[cells[i]] <= hi and s.hi[cells[i]] >= lo]
        if not ok:
            return False
        if not _bwd(ixn, (ok[0], ok[-1]), s):
            return False
        ix = _fwd(ixn, s)
        if ix[0] == ix[1]:
            return s.narrow(cells[ix[0]], _ceil(lo), _floor(hi))
        return True
    raise ValueError(tag)


class AndProp(Prop):
    def __init__(self, kids):
        self.kids = kids
        self.vars = tuple(dict.fromkeys(v for k in kids for v in k.vars))

    def propagate(self, s):
        return all(k.propagate(s) for k in self.kids)

    def truth(self, s):
        res = True
        for k in self.kids:
            t = k.truth(s)
            if t is False:
                return False
            if t is None:
                res = None
        return res


class OrProp(Prop):
    def __init__(self, kids):
        self.kids = kids
        self.vars = tuple(dict.fromkeys(v for k in kids for v in k.vars))

    def propagate(self, s):
        open_ = None
        for k in self.kids:
            t = k.truth(s)
            if t is True:
                return True
            if t is None:
                if open_ is not None:
                    return True
                open_ = k
        if open_ is None:
            return False
        return open_.propagate(s)

    def truth(self, s):
        res = False
        for k in self.kids:
            t = k.truth(s)
            if t is True:
                return True
            if t is None:
                res = None
        return res


class Guarded(Prop):
    """Indicator y: y = 1 enforces `inner`; `inner` impossible forces y = 0."""

    def __init__(self, y, inner):
        self.y = y
        self.inner = inner
        self.vars = (y,) + tuple(v for v in inner.vars if v != y)

    def propagate(self, s):
        if s.lo[self.y] == 1:
            return self.inner.propagate(s)
        if s.hi[self.y] == 0:
            return True
        if self.inner.truth(s) is False:
            return s.set_hi(self.y, 0)
        return True

    def truth(self, s):
        if s.hi[self.y] == 0:
            return True
        t = self.inner.truth(s)
        if s.lo[self.y] == 1:
            return t
        # the model point sets an open indicator to 1
        return True if t is True else None


class AtMostFalse(Prop):
    """At most k of the indicator variables are 0."""

    def __init__(self, ys, k):
        self.vars = tuple(ys)
        self.k = k

    def propagate(self, s):
        zeros = sum(1 for y in self.vars if s.hi[y] == 0)
        if zeros > self.k:
            return False
        if zeros == self.k:
            for y in self.vars:
                if s.lo[y] == 0 and s.hi[y] == 1:
                    s.set_lo(y, 1)
        return True

    def truth(self, s):
        zeros = sum(1 for y in self.vars if s.hi[y] == 0)
        return zeros <= self.k


class Clause(Prop):
    """At least one of the indicator variables is 1."""

    def __init__(self, ys):
        self.vars = tuple(ys)

    def propagate(self, s):
        open_ = None
        for y in self.vars:
            if s.lo[y] == 1:
                return True
            if s.hi[y] == 1:
                if open_ is not None:
                    return True
                open_ = y
        if open_ is None:
            return False
        return s.set_lo(open_, 1)

    def truth(self, s):
        return any(s.hi[y] == 1 for y in self.vars)


# --- compilation ------------------------------------------------------------

class _Compiler:
    def __init__(self, index):
        self.index = index

    def var(self, name):
        return self.index[name]

    def linear(self, t, coef=1, acc=None):
        """Flatten a linear term into ({var: coef}, const); None if nonlinear."""
        if acc is None:
            acc = [{}, 0]
        if isinstance(t, C.Const):
            acc[1] += coef * t.value
        elif isinstance(t, C.Sym):
            v = self.var(t.name)
            acc[0][v] = acc[0].get(v, 0) + coef
        elif isinstance(t, C.Add):
            for a in t.args:
                if self.linear(a, coef, acc) is None:
                    return None
        elif isinstance(t, C.Neg):
            if self.linear(t.arg, -coef, acc) is None:
                return None
        elif isinstance(t, C.Mul):
            if isinstance(t.left, C.Const):
                return self.linear(t.right, coef * t.left.value, acc)
            if isinstance(t.right, C.Const):
                return self.linear(t.left, coef * t.right.value, acc)
            return None
        else:
            return None
        return acc

    def tree(self, t):
        if isinstance(t, C.Const):
            return ("c", t.value)
        if isinstance(t, C.Sym):
            return ("v", self.var(t.name))
        if isinstance(t, C.Add):
            return ("lin", [(1, self.tree(a)) for a in t.args], 0)
        if isinstance(t, C.Neg):
            return ("lin", [(-1, self.tree(t.arg))], 0)
        if isinstance(t, C.Mul):
            if t.left == t.right:
                return ("sq", self.tree(t.left))
            return ("mul", self.tree(t.left), self.tree(t.right))
        if isinstance(t, C.Elem):
            return ("elem", [self.var(c.name) for c in t.cells], self.tree(t.index))
        raise TypeError(f"not a term: {t!r}")

    def cmp(self, op, l, r):
        # normalize to (l - r) op' 0 with op' in {==, <=, !=}
        if op in (">", ">="):
            l, r = r, l
            op = "<" if op == ">" else "<="
        shift = 1 if op == "<" else 0
        op = "<=" if op == "<" else op
        diff = C.Add((l, C.Neg(r)))
        lin = self.linear(diff)
        if lin is not None:
            terms = [(a, v) for v, a in lin[0].items() if a != 0]
            c = lin[1] + shift
            if not terms:
                ok = {"==": c == 0, "<=": c <= 0, "!=": c != 0}[op]
                return TrueProp() if ok else FalseProp()
            return LinearProp(terms, c, op)
        node = self.tree(diff)
        if shift:
            node = ("lin", [(1, node)], shift)
        return TreeCmp(node, op)

    def formula(self, f, neg=False):
        if isinstance(f, C.BoolConst):
            return TrueProp() if f.value != neg else FalseProp()
        if isinstance(f, C.Not):
            return self.formula(f.arg, not neg)
        if isinstance(f, C.Cmp):
            op = C.NEGATE[f.op] if neg else f.op
            return self.cmp(op, f.left, f.right)
        if isinstance(f, (C.And, C.Or)):
            kids = [self.formula(a, neg) for a in f.args]
            conj = isinstance(f, C.And) != neg
            if conj:
                kids = [k for k in kids if not isinstance(k, TrueProp)]
                if any(isinstance(k, FalseProp) for k in kids):
                    return FalseProp()
                return kids[0] if len(kids) == 1 else AndProp(kids) if kids else TrueProp()
            kids = [k for k in kids if not isinstance(k, FalseProp)]
            if any(isinstance(k, TrueProp) for k in kids):
                return TrueProp()
            return kids[0] if len(kids) == 1 else OrProp(kids) if kids else FalseProp()
        raise TypeError(f"not a formula: {f!r}")


# --- solver ----------------------------------------------------------------

class Solver:
    """One problem instance; `solve` may be called repeatedly with extra propagators."""

    def __init__(self, var_domains: dict, limits: Optional[Limits] = None, stats: Optional[Stats] = None):
        self.names = list(var_domains)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.lo0 = [var_domains[n][0] for n in self.names]
        self.hi0 = [var_domains[n][1] for n in self.names]
        self.indicator = [False] * len(self.names)
        self.props = []
        self.formulas = []   # (formula, guard var or None) for model verification
        self.extra_checks = []
        self.limits = limits or Limits()
        self.stats = stats if stats is not None else Stats()
        self.priority = []
        self._compiler = _Compiler(self.index)

    def new_var(self, name, lo, hi, indicator=False):
        self.index[name] = len(self.names)
        self.names.append(name)
        self.lo0.append(lo)
        self.hi0.append(hi)
        self.indicator.append(indicator)
        return self.index[name]

    def add_formula(self, f, guard: Optional[int] = None):
        p = self._compiler.formula(f)
        if guard is not None:
            p = Guarded(guard, p)
        self.props.append(p)
        self.formulas.append((f, guard))
        return p

    def add_prop(self, p):
        self.props.append(p)
        return p

    def solve(self, extra=()) -> object:
        t0 = time.monotonic()
        self.stats.calls += 1
        try:
            return self._search(list(self.props) + list(extra), t0)
        finally:
            self.stats.seconds += time.monotonic() - t0

    # propagation

    def _watchers(self, props):
        w = [[] for _ in self.names]
        for i, p in enumerate(props):
            for v in p.vars:
                w[v].append(i)
        return w

    def _propagate(self, s, props, watch, queue):
        inq = [False] * len(props)
        for i in queue:
            inq[i] = True
        q = list(queue)
        budget = 50 * len(props) + 10_000
        head = 0
        while head < len(q):
            i = q[head]
            head += 1
            inq[i] = False
            budget -= 1
            if budget < 0:
                # slow convergence: stop narrowing, search will finish the job
                return True
            s.changed = []
            if not props[i].propagate(s):
                return False
            for v in s.changed:
                for j in watch[v]:
                    if not inq[j]:
                        inq[j] = True
                        q.append(j)
            if head > 4096:
                q = q[head:]
                head = 0
        return True

    def _entailed(self, s, props):
        for p in props:
            if p.truth(s) is not True:
                return False
        return True

    def _model(self, s):
        return {n: (s.hi[i] if self.indicator[i] else s.lo[i]) for i, n in enumerate(self.names)}

    def verify(self, model, extra=()) -> bool:
        for f, g in self.formulas:
            if g is not None and model[self.names[g]] == 0:
                continue
            if not C.holds(f, model):
                return False
        vals = [model[n] for n in self.names]
        for p in extra:
            st = Store(list(vals), list(vals))
            if p.truth(st) is not True:
                return False
        return True

    def _choose(self, s):
        lo, hi = s.lo, s.hi
        for v in self.priority:
            if lo[v] != hi[v]:
                return v
        best, size = -1, None
        for v in range(len(lo)):
            d = hi[v] - lo[v]
            if d and (size is None or d < size):
                best, size = v, d
                if d == 1:
                    break
        return best

    def _search(self, props, t0):
        s = Store(list(self.lo0), list(self.hi0))
        watch = self._watchers(props)
        limits = self.limits
        if not self._propagate(s, props, watch, range(len(props))):
            return Unsat()
        # choice points: (trail mark, var, lo, hi) of the alternative still to try
        stack = []
        nodes = 0
        while True:
            nodes += 1
            self.stats.nodes += 1
            if nodes % 1024 == 0:
                if time.monotonic() - t0 > limits.seconds:
                    raise ResourceLimit(f"solver time limit of {limits.seconds}s exceeded")
            if nodes > limits.nodes:
                raise ResourceLimit(f"solver node limit of {limits.nodes} exceeded")
            failed = False
            if self._entailed(s, props):
                m = self._model(s)
                if self.verify(m, [p for p in props if isinstance(p, (AtMostFalse, Clause))]):
                    return Sat(m)
            v = self._choose(s)
            if v < 0:
                # every variable fixed: a failed verification means no model here
                failed = True
            else:
                lo, hi = s.lo[v], s.hi[v]
                if self.indicator[v]:
                    first, second = (1, 1), (0, 0)     # try enforcing first
                elif hi - lo <= 8:
                    first, second = (lo, lo), (lo + 1, hi)
                else:
                    mid = (lo + hi) // 2
                    first, second = (lo, mid), (mid + 1, hi)
                mark = len(s.trail)
                stack.append((mark, v, second))
                s.changed = []
                s.narrow(v, *first)
                if not self._propagate(s, props, watch, watch[v]):
                    failed = True
            while failed:
                if not stack:
                    return Unsat()
                mark, v, (lo, hi) = stack.pop()
                s.undo(mark)
                s.changed = []
                s.narrow(v, lo, hi)
                failed = not self._propagate(s, props, watch, watch[v])


# --- public operations ----------------------------------------------------------

def build(csp: C.Csp, enforced=None, limits=None, stats=None) -> Solver:
    """Solver over hard constraints plus the soft ones listed in `enforced` (default: all)."""
    sv = Solver(csp.vars, limits, stats)
    for c in csp.hard:
        sv.add_formula(c.formula)
    ids = None if enforced is None else set(enforced)
    for c in csp.soft:
        if ids is None or c.id in ids:
            sv.add_formula(c.formula)
    return sv


def is_sat(csp: C.Csp, enforced=None, limits=None, stats=None):
    """Sat(model) iff the hard constraints plus the enforced soft ones have a solution."""
    return build(csp, enforced, limits, stats).solve()


@dataclass
class IndicatorSystem:
    solver: Solver
    indicators: dict          # soft constraint id -> indicator var index
    blocking: list = field(default_factory=list)


def with_indicators(csp: C.Csp, limits=None, stats=None) -> IndicatorSystem:
    sv = Solver(csp.vars, limits, stats)
    for c in csp.hard:
        sv.add_formula(c.formula)
    ind = {}
    for c in csp.soft:
        y = sv.new_var(f"y#{c.id}", 0, 1, indicator=True)
        ind[c.id] = y
        sv.add_formula(c.formula, guard=y)
    # with a small joint space, labelling the variables decides every indicator
    plain = [i for i, ind_ in enumerate(sv.indicator) if not ind_]
    space = 1
    for i in plain:
        space *= sv.hi0[i] - sv.lo0[i] + 1
    if space <= SMALL_SPACE:
        sv.priority = sorted(plain, key=lambda i: sv.hi0[i] - sv.lo0[i])
    return IndicatorSystem(sv, ind)


def solve_with_atmost(system: IndicatorSystem, k: Optional[int]):
    """Solve with blocking clauses and, when k is given, at most k retracted constraints."""
    extra = list(system.blocking)
    if k is not None:
        extra.append(AtMostFalse(list(system.indicators.values()), k))
    return system.solver.solve(extra)
