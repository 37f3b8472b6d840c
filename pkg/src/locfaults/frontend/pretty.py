"""Pretty printer that keeps every statement on its original source line."""

from __future__ import annotations

from . import ast as A


def expr_str(e) -> str:
    if isinstance(e, A.IntLit):
        return str(e.value) if e.value >= 0 else f"(-{-e.value})"
    if isinstance(e, A.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, A.Var):
        return e.name
    if isinstance(e, A.Result):
        return "\\result"
    if isinstance(e, A.Index):
        return f"{e.array}[{expr_str(e.index)}]"
    if isinstance(e, A.Length):
        return f"{e.array}.length"
    if isinstance(e, (A.BinOp, A.Cmp, A.BoolOp)):
        return f"({expr_str(e.left)} {e.op} {expr_str(e.right)})"
    if isinstance(e, A.Neg):
        return f"-{expr_str(e.operand)}"
    if isinstance(e, A.Not):
        return f"!{expr_str(e.operand)}"
    if isinstance(e, A.Forall):
        return f"(forall {e.var} in [{expr_str(e.lo)}, {expr_str(e.hi)}) : {expr_str(e.body)})"
    raise TypeError(f"not an expression: {e!r}")


def _strip(s: str) -> str:
    # drop one redundant outer pair for readability of conditions
    if s.startswith("(") and s.endswith(")"):
        depth = 0
        for i, ch in enumerate(s):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0 and i < len(s) - 1:
                return s
        return s[1:-1]
    return s


class _Out:
    def __init__(self):
        self.lines = [""]

    def at(self, line: int, text: str):
        while len(self.lines) < line:
            self.lines.append("")
        cur = self.lines[-1]
        self.lines[-1] = (cur + " " + text) if cur else text

    def append(self, text: str):
        self.lines[-1] += text


def pretty(program) -> str:
    """Render a Program; parsing the output yields an equal AST."""
    p = getattr(program, "program", program)
    out = _Out()
    params = ", ".join(f"{n}: {t}" for n, t in p.params)
    header = f"function {p.name}({params}) -> int"
    if p.requires is not None:
        header += f" requires {_strip(expr_str(p.requires))}"
    header += f" ensures {_strip(expr_str(p.ensures))} {{"
    out.at(1, header)
    _block(out, p.body, 1)
    out.append(" }")
    return "\n".join(out.lines) + "\n"


def _block(out: _Out, stmts, depth):
    pad = "  " * depth
    for s in stmts:
        line = s.line
        if len(out.lines) < line:
            lead = pad
        else:
            lead = ""
        if isinstance(s, A.VarDecl):
            init = f" = {_strip(expr_str(s.init))}" if s.init is not None else ""
            out.at(line, f"{lead}var {s.name}: {s.type}{init};")
        elif isinstance(s, A.Assign):
            out.at(line, f"{lead}{s.name} = {_strip(expr_str(s.expr))};")
        elif isinstance(s, A.ArrayAssign):
            out.at(line, f"{lead}{s.name}[{_strip(expr_str(s.index))}] = {_strip(expr_str(s.expr))};")
        elif isinstance(s, A.Return):
            out.at(line, f"{lead}return {_strip(expr_str(s.expr))};")
        elif isinstance(s, A.While):
            out.at(line, f"{lead}while ({_strip(expr_str(s.cond))}) {{")
            _block(out, s.body, depth + 1)
            out.append(" }")
        elif isinstance(s, A.If):
            out.at(line, f"{lead}if ({_strip(expr_str(s.cond))}) {{")
            _block(out, s.then, depth + 1)
            out.append(" }")
            if s.orelse:
                out.append(" else {")
                _block(out, s.orelse, depth + 1)
                out.append(" }")
