"""Direct AST interpreter, used as the reference semantics."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import EvalError
from . import ast as A


def eval_expr(e, env: dict, result=None):
    if isinstance(e, A.IntLit):
        return e.value
    if isinstance(e, A.BoolLit):
        return e.value
    if isinstance(e, A.Var):
        try:
            return env[e.name]
        except KeyError:
            raise EvalError(f"unbound variable {e.name!r}") from None
    if isinstance(e, A.Result):
        if result is None:
            raise EvalError("\\result has no value here")
        return result
    if isinstance(e, A.Index):
        arr = env[e.array]
        i = eval_expr(e.index, env, result)
        if not 0 <= i < len(arr):
            raise EvalError(f"index {i} out of bounds for {e.array}[{len(arr)}]")
        return arr[i]
    if isinstance(e, A.Length):
        return len(env[e.array])
    if isinstance(e, A.BinOp):
        a, b = eval_expr(e.left, env, result), eval_expr(e.right, env, result)
        return a + b if e.op == "+" else a - b if e.op == "-" else a * b
    if isinstance(e, A.Neg):
        return -eval_expr(e.operand, env, result)
    if isinstance(e, A.Cmp):
        return compare(e.op, eval_expr(e.left, env, result), eval_expr(e.right, env, result))
    if isinstance(e, A.BoolOp):
        a = eval_expr(e.left, env, result)
        if e.op == "&&":
            return a and eval_expr(e.right, env, result)
        if e.op == "||":
            return a or eval_expr(e.right, env, result)
        return (not a) or eval_expr(e.right, env, result)
    if isinstance(e, A.Not):
        return not eval_expr(e.operand, env, result)
    if isinstance(e, A.Forall):
        lo, hi = eval_expr(e.lo, env, result), eval_expr(e.hi, env, result)
        inner = dict(env)
        for v in range(lo, hi):
            inner[e.var] = v
            if not eval_expr(e.body, inner, result):
                return False
        return True
    raise EvalError(f"cannot evaluate {e!r}")


def compare(op, a, b):
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b


@dataclass
class Execution:
    result: int
    env: dict
    inputs: dict
    loop_iterations: dict = field(default_factory=dict)  # loop line -> max iterations of one entry
    verdict: bool = True  # ensures holds on the final state


def initial_env(program: A.Program, inputs: dict) -> dict:
    env = {}
    for name, ty in program.params:
        if name not in inputs:
            raise EvalError(f"missing input {name!r}")
        v = inputs[name]
        if isinstance(ty, A.ArrayType):
            v = list(v)
            if len(v) != ty.length:
                raise EvalError(f"{name} must have {ty.length} cells, got {len(v)}")
        env[name] = v
    return env


def run(program, inputs: dict, max_steps: int = 1_000_000) -> Execution:
    """Execute `program` on `inputs` and evaluate its postcondition."""
    program = getattr(program, "program", program)
    env = initial_env(program, inputs)
    inputs_env = {k: (list(v) if isinstance(v, list) else v) for k, v in env.items()}
    iters: dict = {}
    steps = [0]

    def tick():
        steps[0] += 1
        if steps[0] > max_steps:
            raise EvalError(f"step limit {max_steps} exceeded")

    def exec_block(stmts):
        for s in stmts:
            tick()
            if isinstance(s, A.VarDecl):
                if s.init is not None:
                    env[s.name] = eval_expr(s.init, env)
            elif isinstance(s, A.Assign):
                env[s.name] = eval_expr(s.expr, env)
            elif isinstance(s, A.ArrayAssign):
                arr = env[s.name]
                i = eval_expr(s.index, env)
                if not 0 <= i < len(arr):
                    raise EvalError(f"index {i} out of bounds for {s.name}[{len(arr)}]")
                arr[i] = eval_expr(s.expr, env)
            elif isinstance(s, A.If):
                exec_block(s.then if eval_expr(s.cond, env) else s.orelse)
            elif isinstance(s, A.While):
                n = 0
                while eval_expr(s.cond, env):
                    n += 1
                    tick()
                    exec_block(s.body)
                iters[s.line] = max(iters.get(s.line, 0), n)
            elif isinstance(s, A.Return):
                return eval_expr(s.expr, env)
        return None

    result = exec_block(program.body)
    # ensures sees final values, so a sorted-array postcondition reads the sorted array
    verdict = bool(eval_expr(program.ensures, env, result))
    return Execution(result, env, inputs_env, iters, verdict)


def requires_holds(program, inputs: dict) -> bool:
    program = getattr(program, "program", program)
    if program.requires is None:
        return True
    return bool(eval_expr(program.requires, initial_env(program, inputs)))
