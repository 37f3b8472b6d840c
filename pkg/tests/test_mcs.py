import pytest
from hypothesis import assume, given, settings, strategies as st

from locfaults import constraints as C
from locfaults import engine
from locfaults import mcs as M
from locfaults.constraints import path_csp
from locfaults.errors import FeasibleSystem, HardCoreInfeasible, OracleTooLarge

import randcsp
from conftest import prepared
from test_solver import _csp

x = C.Sym("x")


def _sets(mcss):
    return {tuple(m.coords) for m in mcss}


def _infeasible(seed):
    csp = randcsp.csp(seed)
    try:
        M.check_preconditions(csp)
    except (FeasibleSystem, HardCoreInfeasible):
        return None
    return csp


def test_two_exclusive_singletons():
    csp = _csp({"x": (0, 5)}, soft=[C.Cmp("==", x, C.Const(1)), C.Cmp("==", x, C.Const(2))])
    assert _sets(M.mcs_enumerate(csp, 2)) == {("1",), ("2",)}
    assert _sets(M.mcs_oracle(csp, 2)) == {("1",), ("2",)}


def test_feasible_system_is_rejected():
    csp = _csp({"x": (0, 5)}, [C.Cmp("==", x, C.Const(1))], [C.Cmp("==", x, C.Const(1))])
    with pytest.raises(FeasibleSystem):
        M.mcs_enumerate(csp, 1)
    with pytest.raises(FeasibleSystem):
        M.mcs_oracle(csp, 1)


def test_infeasible_hard_part():
    csp = _csp({"x": (0, 5)}, [C.Cmp(">", x, C.Const(9))], [C.Cmp("==", x, C.Const(1))])
    with pytest.raises(HardCoreInfeasible):
        M.mcs_enumerate(csp, 1)


def test_oracle_size_cap():
    soft = [C.Cmp("==", x, C.Const(i % 3)) for i in range(M.ORACLE_CAP + 1)]
    with pytest.raises(OracleTooLarge):
        M.mcs_oracle(_csp({"x": (0, 5)}, soft=soft), 2)


def _path(name):
    _, g, ce = prepared(name)
    tr = engine.propagate(g, ce)
    return path_csp(g, ce, tr.visited, tr.env)


def test_absminus_ce_path():
    assert _sets(M.mcs_enumerate(_path("AbsMinus"), 1)) == {("15",)}


def test_order_is_cardinality_then_coordinates():
    mcss = M.mcs_enumerate(_path("TritypeKO2"), 3)
    keys = [(len(m), [M._key(c) for c in m.coords]) for m in mcss]
    assert keys == sorted(keys)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_correction_and_minimality(seed):
    csp = _infeasible(seed)
    assume(csp is not None)
    for m in M.mcs_enumerate(csp, len(csp.soft)):
        assert M.is_correction(csp, m.constraints)
        assert M.is_minimal(csp, m.constraints)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_larger_budget_returns_a_superset(seed, k):
    csp = _infeasible(seed)
    assume(csp is not None)
    small, big = M.mcs_enumerate(csp, k), M.mcs_enumerate(csp, k + 1)
    assert all(len(m) <= k for m in small)
    assert set(small) <= set(big)
