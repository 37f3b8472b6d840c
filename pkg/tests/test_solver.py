import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from locfaults import constraints as C
from locfaults import engine
from locfaults import solver as S
from locfaults.constraints import path_csp
from locfaults.errors import ResourceLimit

import randcsp
from conftest import prepared

x, y, z = C.Sym("x"), C.Sym("y"), C.Sym("z")


def _csp(doms, hard=(), soft=()):
    csp = C.Csp(vars=dict(doms))
    csp.hard = [C.Constraint(i, "Comparison", f, None, "hard") for i, f in enumerate(hard)]
    csp.soft = [C.Constraint(100 + i, "Comparison", f, C.Coord(i + 1), "soft")
                for i, f in enumerate(soft)]
    return csp


def test_unique_solution():
    csp = _csp({"x": (0, 10), "y": (0, 10)},
               [C.Cmp("==", C.Add((x, y)), C.Const(2)), C.Cmp("==", C.Add((x, C.Neg(y))), C.Const(0))])
    res = S.is_sat(csp)
    assert res and res.model == {"x": 1, "y": 1}


def test_empty_interval_is_unsat():
    csp = _csp({"x": (-5, 5)}, [C.Cmp(">=", x, C.Const(1)), C.Cmp("<=", x, C.Const(0))])
    assert not S.is_sat(csp)


def _absminus_csp():
    _, g, ce = prepared("AbsMinus")
    tr = engine.propagate(g, ce)
    return path_csp(g, ce, tr.visited, tr.env)


def test_absminus_ce_path_is_infeasible_and_one_retraction_fixes_it():
    csp = _absminus_csp()
    assert not S.is_sat(csp)
    system = S.with_indicators(csp)
    res = S.solve_with_atmost(system, 1)
    off = [cid for cid, v in system.indicators.items() if res.model[system.solver.names[v]] == 0]
    assert [csp.by_id(c).coord_str for c in off] == ["15"]


def test_atmost_zero_on_satisfiable_soft_set():
    csp = _csp({"x": (0, 3)}, soft=[C.Cmp(">=", x, C.Const(1)), C.Cmp("<=", x, C.Const(2))])
    system = S.with_indicators(csp)
    res = S.solve_with_atmost(system, 0)
    assert res and all(res.model[system.solver.names[v]] == 1 for v in system.indicators.values())


def test_unsat_hard_core_stays_unsat():
    csp = _csp({"x": (0, 3)}, [C.Cmp(">", x, C.Const(5))], [C.Cmp("==", x, C.Const(1))])
    assert not S.solve_with_atmost(S.with_indicators(csp), 1)


def test_node_limit_is_reported_distinctly():
    doms = {f"v{i}": (0, 50) for i in range(6)}
    total = C.Add(tuple(C.Mul(C.Sym(v), C.Sym(v)) for v in doms))
    csp = _csp(doms, [C.Cmp("==", total, C.Const(7919))])
    with pytest.raises(ResourceLimit):
        S.is_sat(csp, limits=S.Limits(nodes=50))


def _brute(csp):
    names = list(csp.vars)
    ranges = [range(lo, hi + 1) for lo, hi in csp.vars.values()]
    forms = [c.formula for c in csp.hard + csp.soft]
    return any(all(C.holds(f, dict(zip(names, vals))) for f in forms)
               for vals in itertools.product(*ranges))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**9))
def test_agrees_with_exhaustive_enumeration(seed):
    r = random.Random(seed)
    vs = [f"v{i}" for i in range(r.randint(1, 6))]
    doms = {v: tuple(sorted((r.randint(-5, 5), r.randint(-5, 5)))) for v in vs}
    csp = _csp(doms, [randcsp.formula(r, vs) for _ in range(r.randint(1, 8))])
    res = S.is_sat(csp)
    assert bool(res) == _brute(csp)
    if res:
        assert all(C.holds(c.formula, res.model) for c in csp.hard)


@settings(max_examples=200, deadline=None)
@given(st.tuples(st.integers(-5, 5), st.integers(-5, 5)).map(sorted),
       st.tuples(st.integers(-5, 5), st.integers(-5, 5)).map(sorted),
       st.integers(-25, 25))
def test_product_never_loses_solutions(dx, dy, target):
    csp = _csp({"x": tuple(dx), "y": tuple(dy)}, [C.Cmp("==", C.Mul(x, y), C.Const(target))])
    assert bool(S.is_sat(csp)) == _brute(csp)
