"""Deviation search over an unfolded DSA graph.

Starting from the concrete run of a failing input, the search flips up to
`b_mcd` branch decisions.  A set of flips that makes the run satisfy the
postcondition, and contains no smaller such set, is a minimal correction
deviation (MCD).  For each MCD the suspicious assignments are the MCSs of the
path prefix that reaches the last flipped condition.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from . import mcs as M
from .cfg import AssignBlock, Cfg, PostNode, UnreachableNode, exec_block, execute, initial_env
from .constraints import path_csp
from .errors import EvalError, FeasibleSystem, HardCoreInfeasible, NotACounterexample, UnreachableHit
from .frontend.interp import eval_expr
from .solver import Limits, Stats


@dataclass(frozen=True)
class Deviation:
    conds: tuple     # node ids, in path order
    coords: tuple    # rendered coordinates, same order

    def __len__(self):
        return len(self.conds)

    def __str__(self):
        return "{" + ",".join(self.coords) + "}"


@dataclass
class PathTrace:
    visited: list
    env: dict
    result: Optional[int]
    verdict: bool


@dataclass
class McdResult:
    deviation: Deviation
    mcss: list
    note: str = ""


@dataclass
class Pruned:
    deviation: Deviation
    reason: str     # non-correcting, non-minimal, marked, unreachable, runtime-error
    detail: str = ""
    step: int = 0


@dataclass
class LocalizationReport:
    program: str
    ce: dict
    b: Optional[int]
    b_mcd: int
    b_mcs: int
    marking: bool
    ce_path_mcss: list = field(default_factory=list)
    ce_path_note: str = ""
    mcds: list = field(default_factory=list)
    pruned: list = field(default_factory=list)
    pretreatment: float = 0.0
    localization: float = 0.0
    explored: int = 0
    paths: int = 0
    solver: Stats = field(default_factory=Stats)
    step_seconds: list = field(default_factory=list)   # cumulative, after step 0..b_mcd
    _seen: set = field(default_factory=set, repr=False)

    def prune(self, dev: Deviation, reason: str, detail: str = "", step: int = 0):
        # the same prefix can be cut again at a later step; keep the first record
        if (dev, reason) not in self._seen:
            self._seen.add((dev, reason))
            self.pruned.append(Pruned(dev, reason, detail, step))


def deviation_of(g: Cfg, conds) -> Deviation:
    return Deviation(tuple(conds), tuple(str(g.nodes[c].coord) for c in conds))


def propagate(g: Cfg, ce: dict, deviated=frozenset()) -> PathTrace:
    """Concrete run of `ce` with the branches of `deviated` flipped."""
    return PathTrace(*execute(g, ce, frozenset(deviated)))


class _Link:
    """Persistent singly linked list of visited node ids."""
    __slots__ = ("nid", "prev")

    def __init__(self, nid, prev):
        self.nid = nid
        self.prev = prev

    def to_list(self):
        out, cur = [], self
        while cur is not None:
            out.append(cur.nid)
            cur = cur.prev
        out.reverse()
        return out


def deviation_csp(g: Cfg, ce: dict, conds, symbolic_indices: bool = False):
    """System whose MCSs explain deviation `conds`: the prefix up to its last condition."""
    trace = propagate(g, ce, conds)
    at = trace.visited.index(conds[-1])
    node = g.nodes[conds[-1]]
    taken = trace.visited[at + 1] == node.then
    return path_csp(g, ce, trace.visited[:at + 1], trace.env, "cond", taken=taken,
                    symbolic_indices=symbolic_indices)


def _mcs_or_note(csp, b_mcs, limits, stats):
    try:
        return M.mcs_enumerate(csp, b_mcs, limits, stats), ""
    except HardCoreInfeasible:
        return [], "hard constraints infeasible"
    except FeasibleSystem:
        return [], "system feasible"


def locate(g: Cfg, ce: dict, b_mcd: int = 3, b_mcs: int = 4, marking: bool = True,
           compute_mcs: bool = True, symbolic_indices: bool = False,
           limits: Optional[Limits] = None, program: str = "") -> LocalizationReport:
    """Run the whole search and return its report."""
    t0 = time.monotonic()
    stats = Stats()
    rep = LocalizationReport(program, dict(ce), g.bound, b_mcd, b_mcs, marking, solver=stats)
    try:
        base = propagate(g, ce)
    except (EvalError, UnreachableHit) as e:
        raise NotACounterexample(f"the input cannot be propagated: {e}") from None
    if base.verdict:
        raise NotACounterexample("the input satisfies the postcondition")
    rep.paths = 1
    if compute_mcs:
        csp0 = path_csp(g, ce, base.visited, base.env, "post", symbolic_indices=symbolic_indices)
        rep.ce_path_mcss, rep.ce_path_note = _mcs_or_note(csp0, b_mcs, limits, stats)
    rep.step_seconds.append(time.monotonic() - t0)

    for n in g.conds:
        n.mark = None
    found = []   # frozensets of MCDs so far

    for k in range(1, b_mcd + 1):
        for dev_ids, prefix, taken_dir, trace in _search(g, ce, k, marking, rep):
            rep.explored += 1
            dset = frozenset(dev_ids)
            dev = deviation_of(g, dev_ids)
            if trace is None:
                continue
            if not trace.verdict:
                rep.prune(dev, "non-correcting", step=k)
                continue
            if any(f < dset for f in found):
                rep.prune(dev, "non-minimal", step=k)
                continue
            found.append(dset)
            last = g.nodes[dev_ids[-1]]
            last.mark = k if last.mark is None else min(last.mark, k)
            res = McdResult(dev, [])
            if compute_mcs:
                csp = path_csp(g, ce, prefix, trace.env, "cond", taken=taken_dir,
                               symbolic_indices=symbolic_indices)
                res.mcss, res.note = _mcs_or_note(csp, b_mcs, limits, stats)
            rep.paths += 1
            rep.mcds.append(res)
        rep.step_seconds.append(time.monotonic() - t0)
    rep.localization = time.monotonic() - t0
    return rep


def _search(g: Cfg, ce: dict, k: int, marking: bool, rep: LocalizationReport):
    """Depth-first generation of every deviation of exactly `k` conditions.

    Yields (deviated ids, visited prefix up to the last deviated condition,
    deviated direction of that condition, trace or None on failure).  At each
    condition the deviating child is explored before the continuing one.
    """
    env0 = initial_env(g, ce)
    # frame: (node id, env, link, deviated ids, link at last deviation, its direction)
    stack = [(g.entry, env0, None, (), None, None)]
    while stack:
        nid, env, link, devs, last_link, last_dir = stack.pop()
        try:
            while True:
                node = g.nodes[nid]
                link = _Link(nid, link)
                if isinstance(node, PostNode):
                    if len(devs) == k:
                        result = eval_expr(node.result, env)
                        verdict = bool(eval_expr(node.expr, env, result))
                        yield devs, last_link.to_list(), last_dir, PathTrace(link.to_list(), env, result, verdict)
                    break
                if isinstance(node, UnreachableNode):
                    if devs:
                        rep.prune(deviation_of(g, devs), "unreachable", step=k)
                    break
                if isinstance(node, AssignBlock):
                    exec_block(node, env)
                    nid = node.next
                    continue
                taken = bool(eval_expr(node.expr, env))
                if node.guard or len(devs) == k:
                    nid = node.then if taken else node.orelse
                    continue
                # branch point: push "next" first so "devie" is explored first
                stack.append((node.then if taken else node.orelse, dict(env), link, devs,
                              last_link, last_dir))
                new_devs = devs + (nid,)
                # a marked node may only be deviated within its mark's cardinality
                if marking and node.mark is not None and node.mark < len(new_devs):
                    rep.prune(deviation_of(g, new_devs), "marked",
                              f"mark({node.coord})={node.mark} < {len(new_devs)}", step=k)
                    break
                devs, last_link, last_dir = new_devs, link, not taken
                nid = node.orelse if taken else node.then
        except EvalError as e:
            if devs:
                rep.prune(deviation_of(g, devs), "runtime-error", str(e), step=k)
