import pytest
from hypothesis import given, settings, strategies as st

from locfaults import cfg, corpus
from locfaults.cfg import AssignBlock, CondNode, UnreachableNode
from locfaults.errors import UnfoldBudgetExceeded, UnreachableHit
from locfaults.frontend import load, run

from conftest import prepared


def _assigns(g):
    return [str(a) for b in g.blocks for a in b.assigns]


def test_absminus_graph_before_dsa():
    g = cfg.build_cfg(load(corpus.get("AbsMinus").source))
    assert len(g.conds) == 2
    assert len(g.blocks) == 5


def test_absminus_dsa_versions():
    _, g, _ = prepared("AbsMinus")
    text = _assigns(g)
    for expected in ("k_0 = 0", "k_1 = (k_0 + 2)", "result_1 = (i_0 - j_0)", "result_1 = (j_0 - i_0)"):
        assert expected in text


def test_straight_line_program():
    tp = load("function f(x: int) -> int\n ensures \\result == 1\n{\n x = 1;\n return x;\n}")
    g = cfg.prepare(tp, 3)
    assert g.conds == []
    assert _assigns(g) == ["x_1 = 1"]


def test_minimum_loop_has_back_arc_before_unfolding():
    g = cfg.build_cfg(load(corpus.get("Minimum").source))
    assert len(g.conds) == 2
    order = {nid: i for i, nid in enumerate(sorted(g.nodes))}
    assert any(dst is not None and order[dst] <= order[src] for src, dst, _ in g.arcs())


def test_minimum_unfolded_three_times_with_exit_junctions():
    _, g, _ = prepared("Minimum")
    headers = [n for n in g.conds if n.loop_header and not n.guard]
    assert sorted(str(n.coord) for n in headers) == ["9:1", "9:2", "9:3"]
    junctions = [str(a) for b in g.blocks for a in b.assigns if a.junction]
    for pair in (("min_4 = min_0", "i_4 = i_0"), ("min_4 = min_1", "i_4 = i_1"),
                 ("min_4 = min_2", "i_4 = i_2")):
        assert all(p in junctions for p in pair)
    assert any(isinstance(n, UnreachableNode) for n in g.nodes.values())


def test_loop_free_graph_is_unchanged_by_unfolding():
    g = cfg.build_cfg(load(corpus.get("AbsMinus").source))
    u = cfg.unfold(g, 5)
    assert len(u.conds) == len(g.conds) and len(u.blocks) == len(g.blocks)
    assert sorted(_assigns(u)) == sorted(_assigns(g))
    overflow = {nid for nid, n in u.nodes.items() if isinstance(n, UnreachableNode)}
    assert not any(dst in overflow for _, dst, _ in u.arcs())


def test_unfold_cap():
    g = cfg.build_cfg(load(corpus.get("BubbleSort").source))
    with pytest.raises(UnfoldBudgetExceeded):
        cfg.unfold(g, 50, node_cap=500)


def test_overflow_raises_on_propagation():
    tp, g, _ = prepared("Sum", 6)
    with pytest.raises(UnreachableHit):
        cfg.execute(g, {"n": 20})


def _dsa_violations(g):
    """Versioned names defined twice along some path (dynamic programming on the DAG)."""
    preds = g.predecessors()
    before, bad = {}, []
    for nid in g.topo_order():
        acc = set()
        for p in preds[nid]:
            if p in before:
                acc |= before[p]
                n = g.nodes[p]
                if isinstance(n, AssignBlock):
                    acc |= {a.target for a in n.assigns}
        before[nid] = acc
        n = g.nodes[nid]
        if isinstance(n, AssignBlock):
            targets = [a.target for a in n.assigns]
            bad += [t for t in targets if t in acc]
            bad += [t for t in set(targets) if targets.count(t) > 1]
    return bad


@pytest.mark.parametrize("entry", corpus.entries(), ids=lambda e: e.name)
def test_dsa_single_assignment(entry):
    for b in sorted({1, 2, entry.b}):
        text, _ = entry.instantiate(b)
        g = cfg.prepare(load(text), b)
        assert _dsa_violations(g) == []


@pytest.mark.parametrize("entry", corpus.entries(), ids=lambda e: e.name)
def test_every_condition_has_two_successors(entry):
    text, _ = entry.instantiate()
    g = cfg.prepare(load(text), entry.b)
    for n in g.conds:
        assert n.then is not None and n.orelse is not None


def _count_paths(g):
    memo = {}
    for nid in reversed(g.topo_order()):
        n = g.nodes[nid]
        if isinstance(n, UnreachableNode):
            memo[nid] = 0
        elif isinstance(n, CondNode):
            memo[nid] = memo[n.then] + memo[n.orelse]
        elif isinstance(n, AssignBlock):
            memo[nid] = memo[n.next]
        else:
            memo[nid] = 1
    return memo[g.entry]


@pytest.mark.parametrize("name", ["Minimum", "Sum", "SquareRoot"])
def test_unfolding_is_monotone_in_paths(name):
    tp = load(corpus.get(name).source)
    counts = [_count_paths(cfg.prepare(tp, b)) for b in range(1, 6)]
    assert counts == sorted(counts) and counts[0] < counts[-1]


def test_dot_dump():
    _, g, _ = prepared("AbsMinus")
    dot = cfg.to_dot(g)
    assert dot.startswith("digraph") and "k_1 = (k_0 + 2)" in dot


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=4, max_size=4))
def test_minimum_unfolded_matches_interpreter(tab):
    tp, g, _ = prepared("Minimum", 3)
    _, _, result, verdict = cfg.execute(g, {"tab": tab})
    ex = run(tp, {"tab": tab})
    assert (result, verdict) == (ex.result, ex.verdict)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 8))
def test_sum_unfolded_matches_interpreter(n):
    tp, g, _ = prepared("Sum", 8)
    _, _, result, verdict = cfg.execute(g, {"n": n})
    ex = run(tp, {"n": n})
    assert (result, verdict) == (ex.result, ex.verdict)
