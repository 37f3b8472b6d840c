import itertools

import pytest

from locfaults import corpus, engine
from locfaults.errors import NotACounterexample

import marking_graph
from conftest import prepared


def _mcds(rep):
    return {str(m.deviation): [str(x) for x in m.mcss] for m in rep.mcds}


def test_propagate_absminus():
    _, g, ce = prepared("AbsMinus")
    base = engine.propagate(g, ce)
    assert (base.result, base.verdict) == (-1, False)
    by_line = {n.line: n.id for n in g.conds}
    assert engine.propagate(g, ce, [by_line[11]]).verdict
    assert not engine.propagate(g, ce, [by_line[8]]).verdict


def test_absminus_report():
    _, g, ce = prepared("AbsMinus")
    rep = engine.locate(g, ce, b_mcd=2, b_mcs=3)
    assert [str(m) for m in rep.ce_path_mcss] == ["{15}"]
    assert _mcds(rep) == {"{11}": ["{7}", "{9}"]}
    reasons = {(str(p.deviation), p.reason) for p in rep.pruned}
    assert ("{8}", "non-correcting") in reasons


def test_zero_budget_only_analyses_the_input_path():
    _, g, ce = prepared("AbsMinus")
    rep = engine.locate(g, ce, b_mcd=0)
    assert rep.mcds == [] and rep.explored == 0
    assert [str(m) for m in rep.ce_path_mcss] == ["{15}"]


def test_passing_input_is_rejected():
    _, g, _ = prepared("AbsMinus")
    with pytest.raises(NotACounterexample):
        engine.locate(g, {"i": 3, "j": 1})


def test_shared_condition_search_order_and_marking():
    g = marking_graph.build()
    rep = engine.locate(g, {"x": 0}, b_mcd=6, compute_mcs=False)
    assert sorted(m.deviation.conds for m in rep.mcds) == sorted([marking_graph.D1, marking_graph.D2])
    marked = [p for p in rep.pruned if p.reason == "marked"]
    assert [(p.deviation.conds, p.detail) for p in marked] == [(marking_graph.D3, "mark(7)=5 < 6")]


def test_shared_condition_without_marking_reports_the_abandoned_deviation():
    rep = engine.locate(marking_graph.build(), {"x": 0}, b_mcd=6, marking=False, compute_mcs=False)
    assert marking_graph.D3 in {m.deviation.conds for m in rep.mcds}


def _correct(g, ce, ids):
    try:
        return engine.propagate(g, ce, ids).verdict
    except Exception:
        return False


@pytest.mark.parametrize("name", ["AbsMinus", "Minimum", "TritypeKO2", "TritypeKO4", "TriPerimetreKO3"])
def test_reported_mcds_correct_and_minimal(name):
    _, g, ce = prepared(name)
    rep = engine.locate(g, ce, b_mcd=3, compute_mcs=False)
    for m in rep.mcds:
        ids = m.deviation.conds
        assert _correct(g, ce, ids)
        for r in range(len(ids)):
            for sub in itertools.combinations(ids, r):
                assert not _correct(g, ce, sub)


@pytest.mark.parametrize("name", ["TritypeKO2", "TritypeKO4", "TritypeKO6"])
def test_marked_prunes_exceed_a_mark(name):
    _, g, ce = prepared(name)
    rep = engine.locate(g, ce, b_mcd=3, compute_mcs=False)
    marks = {n.id: n.mark for n in g.conds}
    for p in rep.pruned:
        if p.reason == "marked":
            assert any(marks[c] is not None and marks[c] < len(p.deviation) for c in p.deviation.conds)


@pytest.mark.parametrize("name", ["TritypeKO2", "TritypeKO5", "Minimum"])
def test_budget_reports_are_prefixes(name):
    _, g, ce = prepared(name)
    reps = [engine.locate(g, ce, b_mcd=k, compute_mcs=False) for k in (1, 2, 3)]
    devs = [[str(m.deviation) for m in r.mcds] for r in reps]
    assert devs[1][:len(devs[0])] == devs[0]
    assert devs[2][:len(devs[1])] == devs[1]
    for r in reps:
        sizes = [len(m.deviation) for m in r.mcds]
        assert sizes == sorted(sizes)


def test_pruned_entries_are_unique():
    _, g, ce = prepared("TritypeKO2")
    rep = engine.locate(g, ce, b_mcd=3, compute_mcs=False)
    keys = [(p.deviation, p.reason) for p in rep.pruned]
    assert len(keys) == len(set(keys))


def test_step_timings_are_cumulative():
    _, g, ce = prepared("Minimum")
    rep = engine.locate(g, ce, b_mcd=2)
    assert len(rep.step_seconds) == 3
    assert rep.step_seconds == sorted(rep.step_seconds)
    assert rep.step_seconds[-1] <= rep.localization
