"""Mini-language frontend: parsing, typing, interpretation, printing."""

from .ast import ArrayType, Program
from .interp import Execution, requires_holds, run
from .parser import parse
from .pretty import pretty
from .typecheck import TypedProgram, typecheck


def load(source: str) -> TypedProgram:
    """Parse and typecheck in one step."""
    return typecheck(parse(source))


__all__ = ["ArrayType", "Execution", "Program", "TypedProgram", "load", "parse",
           "pretty", "requires_holds", "run", "typecheck"]
