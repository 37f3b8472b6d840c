"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""

import contextlib
import itertools
import math
import random
import time

import pytest

from locfaults import cfg, corpus, engine
from locfaults import mcs as M
from locfaults.cli.bench import bench_entry
from locfaults.errors import EvalError, FeasibleSystem, HardCoreInfeasible, UnreachableHit
from locfaults.frontend import ArrayType, load, run

import marking_graph
import randcsp
from conftest import prepared

# pinned tolerances
ABSMINUS_SECONDS = 5
MINIMUM_SECONDS = 10
SQUAREROOT_SECONDS = 60
ORACLE_CASES = 500
ORACLE_SECONDS = 120
RANDOM_INPUTS = 1000
SQUAREROOT_L_RATIO = 50
SUM_GROWTH_EXPONENT = 4.0   # L(b) may grow at most like b**4 across the sweep


@pytest.fixture
def verdict(capsys):
    """Print exactly one PASS/FAIL line for the criterion, then re-raise failures."""
    @contextlib.contextmanager
    def check(label):
        info = {}
        try:
            yield info
        except BaseException as e:
            with capsys.disabled():
                print(f"\n[acceptance] {label}: FAIL ({info.get('detail') or type(e).__name__})")
            raise
        with capsys.disabled():
            print(f"\n[acceptance] {label}: PASS ({info.get('detail', '')})")
    return check


def _strs(xs):
    return [str(x) for x in xs]


def test_1_absminus(verdict):
    with verdict("1 AbsMinus") as info:
        _, g, _ = prepared("AbsMinus")
        t = time.monotonic()
        rep = engine.locate(g, {"i": 0, "j": 1}, b_mcd=2, b_mcs=3)
        dt = time.monotonic() - t
        info["detail"] = f"{dt:.2f}s"
        assert _strs(rep.ce_path_mcss) == ["{15}"]
        assert ("{8}", "non-correcting") in {(str(p.deviation), p.reason) for p in rep.pruned}
        assert {str(m.deviation): _strs(m.mcss) for m in rep.mcds} == {"{11}": ["{7}", "{9}"]}
        assert "{8,11}" not in _strs(m.deviation for m in rep.mcds)
        assert dt < ABSMINUS_SECONDS


def test_2_minimum(verdict):
    with verdict("2 Minimum") as info:
        _, g, _ = prepared("Minimum", 3)
        t = time.monotonic()
        rep = engine.locate(g, {"tab": [3, 2, 1, 0]}, b_mcd=1)
        dt = time.monotonic() - t
        info["detail"] = f"{dt:.2f}s"
        assert _strs(rep.ce_path_mcss) == ["{9:2.11}"]
        mcds = {str(m.deviation): set(_strs(m.mcss)) for m in rep.mcds}
        assert mcds == {"{9:3}": {"{8}", "{9:1.13}", "{9:2.13}"}}
        assert dt < MINIMUM_SECONDS


def test_3_squareroot(verdict):
    with verdict("3 SquareRoot") as info:
        _, g, _ = prepared("SquareRoot", 50)
        t = time.monotonic()
        rep = engine.locate(g, {}, b_mcd=1)
        dt = time.monotonic() - t
        ce_expected = {"{5}", "{6}", "{13}"} | {f"{{9:{k}.11}}" for k in range(1, 8)}
        mcd_expected = ({"{5}", "{6}", "{7}"} | {f"{{9:{k}.10}}" for k in range(1, 7)}
                        | {f"{{9:{k}.11}}" for k in range(1, 7)})
        mcds = {str(m.deviation): set(_strs(m.mcss)) for m in rep.mcds}
        got = mcds.get("{9:7}", set())
        info["detail"] = (f"{dt:.2f}s; MCD {{9:7}} missing {sorted(mcd_expected - got)}, "
                          f"extra {sorted(got - mcd_expected)}")
        assert set(_strs(rep.ce_path_mcss)) == ce_expected
        assert list(mcds) == ["{9:7}"]
        assert got == mcd_expected
        assert dt < SQUAREROOT_SECONDS


def test_4_marking_scenario(verdict):
    with verdict("4 shared-condition marking") as info:
        rep = engine.locate(marking_graph.build(), {"x": 0}, b_mcd=6, compute_mcs=False)
        found = sorted(m.deviation.conds for m in rep.mcds)
        marked = [(p.deviation.conds, p.detail) for p in rep.pruned if p.reason == "marked"]
        info["detail"] = f"MCDs {found}, marked {marked}"
        assert found == sorted([marking_graph.D1, marking_graph.D2])
        assert marked == [(marking_graph.D3, "mark(7)=5 < 6")]


def _with_ce():
    return [e for e in corpus.entries() if e.ce is not None]


def test_5_marking_equivalence(verdict):
    with verdict("5 marking equivalence") as info:
        differ, explored = [], {}
        for e in _with_ce():
            tp, g, ce = prepared(e.name)
            runs = {}
            for marking in (True, False):
                rep = engine.locate(g, ce, b_mcd=3, b_mcs=e.bmcs or 4, marking=marking,
                                    compute_mcs=False)
                runs[marking] = rep
            on = {m.deviation for m in runs[True].mcds}
            off = {m.deviation for m in runs[False].mcds}
            if on != off:
                differ.append(f"{e.name} lost {sorted(str(d) for d in off - on)}")
            explored[e.name] = (runs[True].explored, runs[False].explored)
        ko2 = explored["TritypeKO2"]
        info["detail"] = f"TritypeKO2 explored {ko2[0]} vs {ko2[1]}; differing: {differ or 'none'}"
        assert ko2[0] < ko2[1]
        assert differ == []


def test_6_mcs_oracle(verdict):
    with verdict("6 MCS oracle equivalence") as info:
        t = time.monotonic()
        cases, seed, mismatches = 0, 0, []
        while cases < ORACLE_CASES:
            csp = randcsp.csp(seed)
            seed += 1
            try:
                expected = M.mcs_oracle(csp, len(csp.soft))
            except (FeasibleSystem, HardCoreInfeasible):
                continue
            got = M.mcs_enumerate(csp, len(csp.soft))
            if {m.constraints for m in got} != {m.constraints for m in expected}:
                mismatches.append(seed - 1)
            cases += 1
        dt = time.monotonic() - t
        info["detail"] = f"{cases} infeasible systems from {seed} seeds, {len(mismatches)} mismatches, {dt:.1f}s"
        assert mismatches == []
        assert dt < ORACLE_SECONDS


def test_7_minimality_and_correction(verdict):
    with verdict("7 minimality/correction") as info:
        violations, n_mcs, n_mcd = [], 0, 0
        for e in _with_ce():
            tp, g, ce = prepared(e.name)
            b_mcs = e.bmcs or 4
            rep = engine.locate(g, ce, b_mcd=3, b_mcs=b_mcs)
            base = engine.propagate(g, ce)
            systems = [(engine.path_csp(g, ce, base.visited, base.env), rep.ce_path_mcss, "CE")]
            for m in rep.mcds:
                systems.append((engine.deviation_csp(g, ce, m.deviation.conds), m.mcss, str(m.deviation)))
                n_mcd += 1
                if not _corrects(g, ce, m.deviation.conds):
                    violations.append(f"{e.name} MCD {m.deviation} does not correct")
                for r in range(len(m.deviation)):
                    for sub in itertools.combinations(m.deviation.conds, r):
                        if _corrects(g, ce, sub):
                            violations.append(f"{e.name} MCD {m.deviation} not minimal")
            for csp, mcss, where in systems:
                for x in mcss:
                    n_mcs += 1
                    if not M.is_correction(csp, x.constraints):
                        violations.append(f"{e.name} {where} MCS {x} does not correct")
                    if not M.is_minimal(csp, x.constraints):
                        violations.append(f"{e.name} {where} MCS {x} not minimal")
        info["detail"] = f"{n_mcs} MCSs, {n_mcd} MCDs, {len(violations)} violations"
        assert violations == []


def _corrects(g, ce, ids):
    try:
        return engine.propagate(g, ce, ids).verdict
    except (EvalError, UnreachableHit):
        return False


def _random_input(r, params):
    out = {}
    for name, ty in params:
        if isinstance(ty, ArrayType):
            out[name] = [r.randint(-10, 10) for _ in range(ty.length)]
        else:
            out[name] = r.randint(-10, 10)
    return out


def _outcome(thunk):
    try:
        return thunk()
    except EvalError:
        return "error"


def test_8_unfolding_semantics(verdict):
    with verdict("8 unfolding semantics") as info:
        r = random.Random(2024)
        mismatches, skipped = [], 0
        for e in corpus.entries():
            text, _ = e.instantiate()
            tp = load(text)
            g = cfg.prepare(tp, e.b)
            done = attempts = 0
            while done < RANDOM_INPUTS and attempts < 20 * RANDOM_INPUTS:
                attempts += 1
                inputs = _random_input(r, tp.program.params)
                try:
                    ex = run(tp, inputs)
                except EvalError:
                    ex = None
                if ex is not None and any(n > e.b for n in ex.loop_iterations.values()):
                    skipped += 1
                    continue
                expected = "error" if ex is None else (ex.result, ex.verdict)
                got = _outcome(lambda: tuple(cfg.execute(g, inputs)[2:]))
                if got != expected:
                    mismatches.append((e.name, inputs, expected, got))
                done += 1
            assert done == RANDOM_INPUTS, f"{e.name}: only {done} inputs within b={e.b}"
        info["detail"] = f"{len(corpus.entries())} programs x {RANDOM_INPUTS} inputs, {len(mismatches)} mismatches"
        assert mismatches == []


def test_9_scaling(verdict):
    with verdict("9 scaling") as info:
        rows = {}
        for name in ("Sum", "SquareRoot"):
            e = corpus.get(name)
            rows[name] = [bench_entry(e, b) for b in e.schedule]
        errors = [f"{r.program} b={r.b}: {r.error}" for rs in rows.values() for r in rs if r.error]
        assert errors == [], errors
        sq = [r.L[3] for r in rows["SquareRoot"]]
        ratio = max(sq) / min(sq)
        sums = rows["Sum"]
        lo, hi = sums[0], sums[-1]
        exponent = math.log(hi.L[3] / lo.L[3]) / math.log(hi.b / lo.b)
        info["detail"] = (f"SquareRoot L max/min {ratio:.2f}; Sum L grows like b^{exponent:.2f} "
                          f"({lo.L[3]:.3f}s at b={lo.b}, {hi.L[3]:.3f}s at b={hi.b})")
        assert [r.b for r in rows["Sum"]] == list(range(6, 97, 10))
        assert [r.b for r in rows["SquareRoot"]] == list(range(10, 101, 10))
        assert ratio <= SQUAREROOT_L_RATIO
        assert exponent <= SUM_GROWTH_EXPONENT
