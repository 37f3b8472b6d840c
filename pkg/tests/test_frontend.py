import pytest
from hypothesis import given, settings, strategies as st

from locfaults import corpus
from locfaults.errors import (DuplicateDeclaration, MissingEnsures, ParseError,
                              QuantifierOutsideSpec, TypeMismatch, UndeclaredVariable)
from locfaults.frontend import ast as A
from locfaults.frontend import load, parse, pretty, run, typecheck
from locfaults.frontend.ast import walk_stmts

MINIMAL = r"function f() -> int ensures \result == 0 { return 0; }"


def test_minimal_program_has_only_a_return():
    p = parse(MINIMAL)
    assert p.name == "f" and len(p.body) == 1 and isinstance(p.body[0], A.Return)


def test_absminus_shape():
    p = parse(corpus.get("AbsMinus").source)
    ifs = [s for s in walk_stmts(p.body) if isinstance(s, A.If)]
    assert len(ifs) == 2
    assert "\\result" in pretty(p)


def test_minimum_has_loop_with_one_if():
    p = parse(corpus.get("Minimum").source)
    loops = [s for s in p.body if isinstance(s, A.While)]
    assert len(loops) == 1
    assert [type(s) for s in loops[0].body if isinstance(s, A.If)] == [A.If]


def test_syntax_error_reports_line():
    with pytest.raises(ParseError) as err:
        parse("function f() -> int\n ensures \\result == 0\n{ return 0 }")
    assert err.value.line == 3


def test_missing_ensures():
    with pytest.raises(MissingEnsures):
        parse("function f() -> int { return 0; }")


def test_duplicate_declaration():
    src = r"""function f(x: int) -> int ensures \result == 0 {
      var x: int = 1;
      return 0;
    }"""
    with pytest.raises(DuplicateDeclaration):
        load(src)


def test_int_condition_is_a_type_error():
    src = r"""function f(k: int) -> int ensures \result == 0 {
      if (k) {
        k = 1;
      }
      return 0;
    }"""
    with pytest.raises(TypeMismatch):
        load(src)


def test_undeclared_variable():
    src = r"""function f() -> int ensures \result == 0 {
      y = 1;
      return 0;
    }"""
    with pytest.raises(UndeclaredVariable):
        load(src)


def test_forall_in_body_is_rejected():
    src = r"""function f(tab: int[2]) -> int ensures \result == 0 {
      var n: int = 0;
      if (forall k in [0, 2) : tab[k] > 0) {
        n = 1;
      }
      return n;
    }"""
    with pytest.raises(QuantifierOutsideSpec):
        load(src)


def test_forall_in_ensures_typechecks():
    load(corpus.get("Minimum").source)


@pytest.mark.parametrize("entry", corpus.entries(), ids=lambda e: e.name)
def test_roundtrip_through_pretty(entry):
    p = parse(entry.source)
    assert parse(pretty(p)) == p


@pytest.mark.parametrize("entry", corpus.entries(), ids=lambda e: e.name)
def test_statement_lines_exist_and_increase(entry):
    src_lines = entry.source.splitlines()
    lines = [s.line for s in walk_stmts(typecheck(parse(entry.source)).body)]
    assert lines == sorted(lines)
    assert all(1 <= n <= len(src_lines) and src_lines[n - 1].strip() for n in lines)


def test_interpreter_absminus():
    tp = load(corpus.get("AbsMinus").source)
    ex = run(tp, {"i": 0, "j": 1})
    assert (ex.result, ex.verdict) == (-1, False)
    assert run(tp, {"i": 3, "j": 1}).verdict


@settings(max_examples=200, deadline=None)
@given(st.integers(-50, 50), st.integers(-50, 50))
def test_corrected_absminus_always_meets_its_contract(i, j):
    tp = load(corpus.get("AbsMinusCorrect").source)
    assert run(tp, {"i": i, "j": j}).verdict
