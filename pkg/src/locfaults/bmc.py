"""Counterexample search over the whole unfolded graph.

Every node gets a 0/1 reach variable and every branch arc an edge variable.
Block constraints are guarded by the block's reach variable, conditions by
their outgoing edge, and the overflow node is forced unreachable, so a model
is one complete bounded execution that violates the postcondition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import solver as S
from .cfg import AssignBlock, Cfg, CondNode, PostNode, UnreachableNode, _rename
from .constraints import Add, Cmp, Const, Mul, Not, Or, Sym, Translator, cell
from .errors import EvalError
from .frontend import ast as A
from .frontend.interp import requires_holds, run as interpret

INPUT_DOMAIN = (-100, 100)


@dataclass
class Counterexample:
    bindings: dict

    def __str__(self):
        return "{" + ", ".join(f"{k}={v}" for k, v in self.bindings.items()) + "}"


def _lin(*pairs, c=0):
    """sum(coef * var) + c as a term."""
    parts = [Sym(v) if a == 1 else Mul(Const(a), Sym(v)) for a, v in pairs]
    if c:
        parts.append(Const(c))
    return parts[0] if len(parts) == 1 else Add(tuple(parts))


def encode(g: Cfg, domain=INPUT_DOMAIN, requires=True):
    """Solver, reach-variable names and input symbol names for `g`."""
    tr = Translator(g, "bmc")
    prog = tr.prog
    formulas = []          # (formula, guard name or None)
    reach = {nid: f"reach#{nid}" for nid in g.nodes}
    incoming = {nid: [] for nid in g.nodes}
    edge_vars = []
    order = g.topo_order()

    inputs = []
    for name, ty in prog.params:
        v = g.input_names.get(name, f"{name}_0")
        if isinstance(ty, A.ArrayType):
            inputs.extend(tr.sym(c).name for c in tr.array_cells(v))
        else:
            inputs.append(tr.sym(v).name)

    for nid in order:
        node = g.nodes[nid]
        if isinstance(node, AssignBlock):
            for c in tr.translate_block(node):
                formulas.append((c.formula, reach[nid]))
            incoming[node.next].append(reach[nid])
        elif isinstance(node, CondNode):
            f = tr.formula(node.expr)
            et, ef = f"edge#{nid}.t", f"edge#{nid}.f"
            edge_vars += [et, ef]
            formulas.append((Cmp("==", _lin((1, et), (1, ef), (-1, reach[nid])), Const(0)), None))
            formulas.append((f, et))
            formulas.append((Not(f), ef))
            incoming[node.then].append(et)
            incoming[node.orelse].append(ef)
        elif isinstance(node, PostNode):
            for c in tr.translate_post(node, negate=True):
                formulas.append((c.formula, None))

    for nid in g.nodes:
        r = reach[nid]
        if nid == g.entry or nid == g.post:
            formulas.append((Cmp("==", Sym(r), Const(1)), None))
        elif isinstance(g.nodes[nid], UnreachableNode) or not incoming[nid]:
            formulas.append((Cmp("==", Sym(r), Const(0)), None))
        if nid != g.entry and incoming[nid]:
            pairs = [(1, e) for e in incoming[nid]] + [(-1, r)]
            formulas.append((Cmp("==", _lin(*pairs), Const(0)), None))

    if requires and prog.requires is not None:
        formulas.append((tr.formula(_rename(prog.requires, g.input_names)), None))

    doms = dict(tr.csp.vars)
    for v in inputs:
        doms[v] = domain
    for name in list(reach.values()) + edge_vars:
        doms[name] = (0, 1)
    sv = S.Solver(doms)
    for f, guard in formulas:
        sv.add_formula(f, None if guard is None else sv.index[guard])
    # decide control flow first, in topological order
    sv.priority = [sv.index[reach[n]] for n in order if reach[n] in sv.index]
    for n in order:
        if isinstance(g.nodes[n], CondNode):
            sv.priority.append(sv.index[f"edge#{n}.t"])
    return sv, inputs


def _bindings(g: Cfg, model: dict) -> dict:
    prog = getattr(g.program, "program", g.program)
    out = {}
    for name, ty in prog.params:
        v = g.input_names.get(name, f"{name}_0")
        if isinstance(ty, A.ArrayType):
            out[name] = [model.get(cell(v, i), 0) for i in range(ty.length)]
        else:
            out[name] = model.get(v, 0)
    return out


def replay_violates(g: Cfg, bindings: dict, max_steps=1_000_000) -> bool:
    """True when the AST interpreter confirms a postcondition violation within the bound."""
    prog = getattr(g.program, "program", g.program)
    try:
        ex = interpret(g.program, bindings, max_steps=max_steps)
    except EvalError:
        return False
    if ex.verdict:
        return False
    if g.bound is not None and any(n > g.bound for n in ex.loop_iterations.values()):
        return False
    return prog.requires is None or requires_holds(g.program, bindings)


def find_counterexample(g: Cfg, domain=INPUT_DOMAIN, limits: Optional[S.Limits] = None,
                        attempts: int = 50) -> Optional[Counterexample]:
    sv, inputs = encode(g, domain)
    if limits is not None:
        sv.limits = limits
    extra = []
    for _ in range(attempts):
        res = sv.solve(extra)
        if not res:
            return None
        b = _bindings(g, res.model)
        if replay_violates(g, b):
            return Counterexample(b)
        # encoding and interpreter disagree on this input: exclude it and retry
        extra.append(sv._compiler.formula(Or(tuple(Cmp("!=", Sym(v), Const(res.model[v])) for v in inputs))))
    return None
