"""Control-flow graphs: construction from the AST, loop unfolding and DSA renaming.

A graph is a dict of nodes keyed by integer id.  Conditional nodes carry a
then/else successor, assignment blocks a single `next`, and every path ends in
the post node (or, in unfolded graphs, in the unreachable overflow node).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import EvalError, UnfoldBudgetExceeded, UnreachableHit
from .frontend import ast as A
from .frontend.interp import eval_expr

DEFAULT_NODE_CAP = 1_000_000


# --- nodes ----------------------------------------------------------------

@dataclass(frozen=True)
class Coord:
    """Source coordinate: a line plus the (loop line, iteration) of each enclosing loop."""
    line: int
    loop_ctx: tuple = ()
    header: Optional[int] = None  # iteration of a loop condition itself

    def __str__(self):
        prefix = "".join(f"{l}:{it}." for l, it in self.loop_ctx)
        s = f"{prefix}{self.line}"
        if self.header is not None:
            s += f":{self.header}"
        return s

    def sort_key(self):
        key = []
        for l, it in self.loop_ctx:
            key += [l, it]
        key.append(self.line)
        if self.header is not None:
            key.append(self.header)
        return tuple(key)


def coord_sort_key(text: str):
    """Natural sort key for rendered coordinates: "9:1.11" -> (9, 1, 11)."""
    return tuple(int(p) for p in text.replace(".", ":").split(":"))


@dataclass
class Assignment:
    target: str
    expr: A.Expr            # assigned value (for a store, the stored value)
    line: int
    loop_ctx: tuple = ()
    index: Optional[A.Expr] = None   # set for array stores
    base: Optional[str] = None       # array version being updated by a store
    junction: bool = False           # DSA merge copy, not a source statement

    @property
    def coord(self):
        return Coord(self.line, self.loop_ctx)

    def __str__(self):
        from .frontend.pretty import expr_str
        if self.index is not None:
            rhs = f"store({self.base}, {expr_str(self.index)}, {expr_str(self.expr)})"
        else:
            rhs = expr_str(self.expr)
        return f"{self.target} = {rhs}"


@dataclass
class CondNode:
    id: int
    expr: A.Expr
    line: int
    loop_ctx: tuple = ()
    then: Optional[int] = None
    orelse: Optional[int] = None
    loop_header: bool = False
    guard: bool = False      # unfolding overflow test, never deviated
    mark: Optional[int] = None
    loops: tuple = ()        # enclosing loop lines (raw graphs)

    @property
    def coord(self):
        if self.loop_header:
            # a loop condition renders as outer loops, then "line:iteration"
            outer = self.loop_ctx[:-1] if self.loop_ctx else ()
            it = self.loop_ctx[-1][1] if self.loop_ctx else None
            return Coord(self.line, outer, it)
        return Coord(self.line, self.loop_ctx)

    def successors(self):
        return (self.then, self.orelse)


@dataclass
class AssignBlock:
    id: int
    assigns: list
    loop_ctx: tuple = ()
    next: Optional[int] = None
    loops: tuple = ()
    junction: bool = False   # inserted by DSA on a conditional arc

    def successors(self):
        return (self.next,)


@dataclass
class PostNode:
    id: int
    expr: A.Expr                 # ensures clause
    result: Optional[A.Expr]     # returned expression, substituted for \result

    def successors(self):
        return ()


@dataclass
class UnreachableNode:
    id: int

    def successors(self):
        return ()


@dataclass
class Cfg:
    nodes: dict
    entry: int
    post: int
    program: object               # TypedProgram
    unfolded: bool = False
    dsa: bool = False
    bound: Optional[int] = None
    input_names: dict = field(default_factory=dict)   # param -> DSA name
    exit_merges: set = field(default_factory=set)

    @property
    def conds(self):
        return [n for n in self.nodes.values() if isinstance(n, CondNode)]

    @property
    def blocks(self):
        return [n for n in self.nodes.values() if isinstance(n, AssignBlock)]

    @property
    def post_node(self) -> PostNode:
        return self.nodes[self.post]

    def arcs(self):
        for n in self.nodes.values():
            if isinstance(n, CondNode):
                yield n.id, n.then, "Then"
                yield n.id, n.orelse, "Else"
            elif isinstance(n, AssignBlock):
                yield n.id, n.next, "Seq"

    def predecessors(self):
        preds = {nid: [] for nid in self.nodes}
        for src, dst, _ in self.arcs():
            preds[dst].append(src)
        return preds

    def topo_order(self):
        """Reverse postorder from the entry (only valid on acyclic graphs)."""
        order, seen = [], set()
        stack = [(self.entry, iter(self.nodes[self.entry].successors()))]
        seen.add(self.entry)
        while stack:
            nid, it = stack[-1]
            for s in it:
                if s is not None and s not in seen:
                    seen.add(s)
                    stack.append((s, iter(self.nodes[s].successors())))
                    break
            else:
                stack.pop()
                order.append(nid)
        order.reverse()
        return order


# --- construction ----------------------------------------------------------

class _Builder:
    def __init__(self, tp):
        self.tp = tp
        self.nodes = {}
        self.ids = itertools.count()

    def new(self, cls, **kw):
        nid = next(self.ids)
        node = cls(id=nid, **kw)
        self.nodes[nid] = node
        return node

    def seq(self, stmts, succ, loops):
        """Build `stmts` flowing into `succ`; returns the entry id."""
        pending = []
        for s in reversed(stmts):
            if isinstance(s, (A.If, A.While)):
                succ = self.flush(pending, succ, loops)
                pending = []
                succ = self.control(s, succ, loops)
            elif isinstance(s, A.VarDecl):
                if s.init is not None:
                    pending.append(Assignment(s.name, s.init, s.line))
            elif isinstance(s, A.Assign):
                pending.append(Assignment(s.name, s.expr, s.line))
            elif isinstance(s, A.ArrayAssign):
                pending.append(Assignment(s.name, s.expr, s.line, index=s.index, base=s.name))
        return self.flush(pending, succ, loops)

    def flush(self, pending, succ, loops, force=False):
        if not pending and not force:
            return succ
        block = self.new(AssignBlock, assigns=list(reversed(pending)), next=succ, loops=loops)
        return block.id

    def branch(self, stmts, succ, loops):
        entry = self.seq(stmts, succ, loops)
        if entry == succ:
            # empty branch: keep a block so DSA copies have somewhere to live
            entry = self.flush([], succ, loops, force=True)
        return entry

    def control(self, s, succ, loops):
        if isinstance(s, A.If):
            c = self.new(CondNode, expr=s.cond, line=s.line, loops=loops)
            c.then = self.branch(s.then, succ, loops)
            c.orelse = self.branch(s.orelse, succ, loops)
            return c.id
        c = self.new(CondNode, expr=s.cond, line=s.line, loops=loops, loop_header=True)
        inner = loops + (s.line,)
        c.then = self.seq(s.body, c.id, inner)
        c.orelse = succ
        return c.id


def build_cfg(tp) -> Cfg:
    """Graph of the typed program; loops appear as back-arcs to their header."""
    prog = getattr(tp, "program", tp)
    b = _Builder(tp)
    ret = prog.return_stmt
    post = b.new(PostNode, expr=prog.ensures, result=ret.expr)
    entry = b.seq(prog.body[:-1], post.id, ())
    return Cfg(b.nodes, entry, post.id, tp)


# --- unfolding -------------------------------------------------------------

def unfold(g: Cfg, b: int, per_loop: Optional[dict] = None, node_cap: int = DEFAULT_NODE_CAP) -> Cfg:
    """Replace each loop by `b` nested copies of its condition and body.

    `per_loop` maps a loop's source line to its own bound.  After the last copy
    a guard condition sends any further iteration to an unreachable node.
    """
    if b < 1:
        raise ValueError("unfolding bound must be at least 1")
    per_loop = per_loop or {}
    nodes = {}
    memo = {}
    work = []
    ids = itertools.count()
    unreachable = UnreachableNode(next(ids))
    nodes[unreachable.id] = unreachable
    exit_merges = set()

    def get(key):
        """Id of the copy of (orig node, loop context), scheduling it if new."""
        nid = memo.get(key)
        if nid is None:
            nid = next(ids)
            if nid > node_cap:
                raise UnfoldBudgetExceeded(f"unfolded graph exceeds {node_cap} nodes")
            memo[key] = nid
            work.append(key)
        return nid

    def target(orig, ctx):
        """Context at which `orig` is reached from a node with context `ctx`."""
        node = g.nodes[orig]
        if isinstance(node, CondNode) and node.loop_header:
            for pos, (line, it) in enumerate(ctx):
                if line == node.line:
                    return orig, ctx[:pos] + ((line, it + 1),)   # back-arc
            return orig, ctx + ((node.line, 1),)                  # loop entry
        return orig, ctx

    entry = get(target(g.entry, ()))
    while work:
        o, c = work.pop()
        nid = memo[(o, c)]
        node = g.nodes[o]
        if isinstance(node, PostNode):
            nodes[nid] = replace(node, id=nid)
        elif isinstance(node, AssignBlock):
            assigns = [replace(a, loop_ctx=c) for a in node.assigns]
            nodes[nid] = AssignBlock(nid, assigns, c, get(target(node.next, c)))
        elif node.loop_header:
            it = c[-1][1]
            ex = get(target(node.orelse, c[:-1]))
            exit_merges.add(ex)
            if it > per_loop.get(node.line, b):
                nodes[nid] = CondNode(nid, node.expr, node.line, c, unreachable.id, ex,
                                      loop_header=True, guard=True)
            else:
                nodes[nid] = CondNode(nid, node.expr, node.line, c, get(target(node.then, c)), ex,
                                      loop_header=True)
        else:
            nodes[nid] = CondNode(nid, node.expr, node.line, c,
                                  get(target(node.then, c)), get(target(node.orelse, c)))

    post = memo[(g.post, ())]
    return Cfg(nodes, entry, post, g.program, unfolded=True, bound=b, exit_merges=exit_merges)


# --- dynamic single assignment ---------------------------------------------

def _rename(e, ver: dict):
    """Rewrite variable and array names in `e` to their current versions."""
    if isinstance(e, A.Var):
        return replace(e, name=ver.get(e.name, e.name))
    if isinstance(e, A.Index):
        return replace(e, array=ver.get(e.array, e.array), index=_rename(e.index, ver))
    if isinstance(e, A.Length):
        return replace(e, array=ver.get(e.array, e.array))
    if isinstance(e, (A.BinOp, A.Cmp, A.BoolOp)):
        return replace(e, left=_rename(e.left, ver), right=_rename(e.right, ver))
    if isinstance(e, (A.Neg, A.Not)):
        return replace(e, operand=_rename(e.operand, ver))
    if isinstance(e, A.Forall):
        inner = {k: v for k, v in ver.items() if k != e.var}
        return replace(e, lo=_rename(e.lo, ver), hi=_rename(e.hi, ver), body=_rename(e.body, inner))
    return e


def vname(var, n):
    return f"{var}_{n}"


@dataclass
class _State:
    ver: dict      # source name -> version number
    undef: frozenset  # names whose current version was never assigned

    def names(self):
        return {v: vname(v, n) for v, n in self.ver.items()}


def to_dsa(g: Cfg) -> Cfg:
    """Rename an acyclic graph so every version is assigned once along any path.

    Joins after an `if` take the highest incoming version and copy lower ones on
    the other arcs; joins after a loop exit take a fresh version on every arc.
    """
    prog = getattr(g.program, "program", g.program)
    nodes = {nid: _clone(n) for nid, n in g.nodes.items()}
    preds = g.predecessors()
    order = g.topo_order()
    next_id = max(nodes) + 1

    declared_uninit = {s.name for s in A.walk_stmts(prog.body)
                       if isinstance(s, A.VarDecl) and s.init is None}
    params = [n for n, _ in prog.params]
    out_state = {}

    def join(nid) -> _State:
        nonlocal next_id
        ps = [p for p in preds[nid] if p in out_state]
        if not ps:
            return _State({p: 0 for p in params}, frozenset())
        if len(ps) == 1:
            return out_state[ps[0]]
        states = [out_state[p] for p in ps]
        all_vars = set().union(*(s.ver for s in states))
        fresh = nid in g.exit_merges
        joined, undef = {}, set()
        copies = {p: [] for p in ps}
        for v in sorted(all_vars):
            present = [s for s in states if v in s.ver]
            top = max(s.ver[v] for s in present)
            if len(present) < len(states) or any(v in s.undef for s in present):
                # not assigned on every incoming path, so never read afterwards
                joined[v] = top
                undef.add(v)
                continue
            if all(s.ver[v] == top for s in states):
                joined[v] = top
                continue
            j = top + 1 if fresh else top
            joined[v] = j
            for p, s in zip(ps, states):
                if s.ver[v] != j:
                    copies[p].append((v, s.ver[v], j))
        for p in ps:
            if copies[p]:
                place_copies(p, nid, copies[p])
        return _State(joined, frozenset(undef))

    def place_copies(p, nid, cps):
        nonlocal next_id
        ctx = _ctx_of(nodes[nid]) if not isinstance(nodes[p], AssignBlock) else nodes[p].loop_ctx
        line = _line_of(nodes[nid], prog)
        assigns = [Assignment(vname(v, j), A.Var(vname(v, i)), line, ctx, junction=True)
                   for v, i, j in cps]
        pn = nodes[p]
        if isinstance(pn, AssignBlock) and pn.next == nid:
            pn.assigns.extend(assigns)
            return
        jb = AssignBlock(next_id, assigns, ctx, nid, junction=True)
        nodes[next_id] = jb
        next_id += 1
        if pn.then == nid:
            pn.then = jb.id
        if pn.orelse == nid:
            pn.orelse = jb.id

    for nid in order:
        node = nodes[nid]
        st = join(nid)
        if isinstance(node, CondNode):
            node.expr = _rename(node.expr, st.names())
            out_state[nid] = st
        elif isinstance(node, AssignBlock):
            ver, undef = dict(st.ver), set(st.undef)
            new_assigns = []
            for a in node.assigns:
                names = {v: vname(v, n) for v, n in ver.items()}
                expr = _rename(a.expr, names)
                index = _rename(a.index, names) if a.index is not None else None
                base = names.get(a.base) if a.base is not None else None
                if a.target not in ver:
                    n = 1 if a.target in declared_uninit else 0
                else:
                    n = ver[a.target] + 1
                ver[a.target] = n
                undef.discard(a.target)
                new_assigns.append(replace(a, target=vname(a.target, n), expr=expr,
                                           index=index, base=base))
            node.assigns = new_assigns
            out_state[nid] = _State(ver, frozenset(undef))
        elif isinstance(node, PostNode):
            names = st.names()
            node.expr = _rename(node.expr, names)
            node.result = _rename(node.result, names) if node.result is not None else None
            out_state[nid] = st

    out = Cfg(nodes, g.entry, g.post, g.program, unfolded=g.unfolded, dsa=True, bound=g.bound,
              exit_merges=set(g.exit_merges))
    out.input_names = {p: vname(p, 0) for p in params}
    return out


def _clone(n):
    if isinstance(n, AssignBlock):
        return replace(n, assigns=list(n.assigns))
    return replace(n)


def _ctx_of(n):
    return getattr(n, "loop_ctx", ())


def _line_of(n, prog):
    if isinstance(n, CondNode):
        return n.line
    if isinstance(n, AssignBlock) and n.assigns:
        return n.assigns[0].line
    return prog.return_stmt.line


def prepare(tp, b: int = 1, per_loop: Optional[dict] = None, node_cap: int = DEFAULT_NODE_CAP) -> Cfg:
    """build_cfg, unfold and to_dsa in one call."""
    return to_dsa(unfold(build_cfg(tp), b, per_loop, node_cap))


# --- concrete execution on a DSA graph -------------------------------------

def initial_env(g: Cfg, inputs: dict) -> dict:
    prog = getattr(g.program, "program", g.program)
    env = {}
    for name, ty in prog.params:
        v = inputs[name]
        env[g.input_names.get(name, vname(name, 0))] = list(v) if isinstance(ty, A.ArrayType) else v
    return env


def exec_block(block: AssignBlock, env: dict):
    for a in block.assigns:
        if a.junction and _undefined_source(a, env):
            continue
        if a.index is not None:
            arr = list(env[a.base])
            i = eval_expr(a.index, env)
            if not 0 <= i < len(arr):
                raise EvalError(f"index {i} out of bounds at line {a.line}")
            arr[i] = eval_expr(a.expr, env)
            env[a.target] = arr
        else:
            env[a.target] = eval_expr(a.expr, env)


def _undefined_source(a, env):
    return isinstance(a.expr, A.Var) and a.expr.name not in env


def post_verdict(g: Cfg, env: dict):
    """(return value, ensures verdict) at the post node."""
    p = g.post_node
    result = eval_expr(p.result, env)
    return result, bool(eval_expr(p.expr, env, result))


def execute(g: Cfg, inputs: dict, deviated=frozenset()):
    """Run the graph concretely, flipping the branch of every node in `deviated`.

    Returns (visited node ids, final env, result, verdict).
    """
    env = initial_env(g, inputs)
    nid = g.entry
    visited = []
    while True:
        node = g.nodes[nid]
        visited.append(nid)
        if isinstance(node, PostNode):
            result, verdict = post_verdict(g, env)
            return visited, env, result, verdict
        if isinstance(node, UnreachableNode):
            raise UnreachableHit("path exceeds the unfolding bound")
        if isinstance(node, AssignBlock):
            exec_block(node, env)
            nid = node.next
            continue
        taken = bool(eval_expr(node.expr, env))
        if nid in deviated:
            taken = not taken
        nid = node.then if taken else node.orelse


# --- debug output ----------------------------------------------------------

def to_dot(g: Cfg) -> str:
    from .frontend.pretty import expr_str
    lines = ["digraph cfg {", "  node [fontname=monospace];"]
    for nid, n in sorted(g.nodes.items()):
        if isinstance(n, CondNode):
            shape = "diamond" if not n.guard else "octagon"
            label = f"{n.coord}: {expr_str(n.expr)}"
        elif isinstance(n, AssignBlock):
            shape = "box"
            label = "\\n".join(str(a) for a in n.assigns) or "(empty)"
        elif isinstance(n, PostNode):
            shape = "ellipse"
            label = "POST: " + expr_str(n.expr)
        else:
            shape = "ellipse"
            label = "UNREACHABLE"
        label = label.replace('"', '\\"')
        lines.append(f'  n{nid} [shape={shape}, label="{label}"];')
    for src, dst, kind in g.arcs():
        if dst is not None:
            lines.append(f'  n{src} -> n{dst} [label="{kind}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
