"""Exception hierarchy shared by every stage of the pipeline."""


class LocFaultsError(Exception):
    """Base class for all errors raised by the toolkit."""


# --- frontend -------------------------------------------------------------

class FrontendError(LocFaultsError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "") + ": "
        super().__init__(where + message)
        self.message = message


class ParseError(FrontendError):
    """Syntactically invalid source."""


class DuplicateDeclaration(FrontendError):
    pass


class MissingEnsures(FrontendError):
    pass


class TypeMismatch(FrontendError):
    pass


class UndeclaredVariable(FrontendError):
    pass


class QuantifierOutsideSpec(FrontendError):
    pass


class UninitializedVariable(FrontendError):
    pass


class EvalError(LocFaultsError):
    """Runtime failure of concrete execution (bad index, step cap)."""


# --- cfg / constraints ----------------------------------------------------

class UnfoldBudgetExceeded(LocFaultsError):
    pass


class UnsupportedExpr(LocFaultsError):
    pass


class IncompleteCounterexample(LocFaultsError):
    pass


# --- solver / mcs ---------------------------------------------------------

class ResourceLimit(LocFaultsError):
    """A solver call exceeded its node or time budget."""


class HardCoreInfeasible(LocFaultsError):
    """The hard constraints alone have no solution, so no MCS exists."""


class FeasibleSystem(LocFaultsError):
    """MCS enumeration was asked about a system that is already satisfiable."""


class OracleTooLarge(LocFaultsError):
    pass


# --- engine ---------------------------------------------------------------

class NotACounterexample(LocFaultsError):
    """The supplied input does not violate the postcondition."""


class UnreachableHit(LocFaultsError):
    """Propagation crossed the loop-overflow node of an unfolded graph."""
