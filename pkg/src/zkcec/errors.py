"""Exception hierarchy shared by every layer of the package."""


class ZkcecError(Exception):
    """Base class for all errors raised by zkcec."""


class DomainError(ZkcecError, ValueError):
    pass


class WidthError(ZkcecError, ValueError):
    pass


class ScaleError(ZkcecError, ValueError):
    pass


class ParseError(ZkcecError, ValueError):
    """Netlist or DIMACS syntax problem; carries a 1-based line/column."""

    def __init__(self, kind, message, line=None, column=None):
        self.kind = kind
        self.line = line
        self.column = column
        where = f"line {line}" if line is not None else ""
        if column is not None:
            where += f", col {column}"
        super().__init__(f"{kind}: {message}" + (f" ({where})" if where else ""))


class StructureError(ZkcecError, ValueError):
    pass


class SolverTimeout(ZkcecError):
    pass


class TraceError(ZkcecError, ValueError):
    pass


class WitnessError(ZkcecError):
    pass


class CollisionError(ZkcecError):
    pass


class TapeExhausted(ZkcecError):
    pass


class TransportError(ZkcecError):
    pass


class NotEquivalent(ZkcecError):
    """The honest prover found a distinguishing input and refuses to run."""

    def __init__(self, counterexample=None):
        self.counterexample = counterexample
        super().__init__("circuits are not equivalent"
                         + (f": {counterexample}" if counterexample else ""))


class NotRefutable(ZkcecError):
    """Blueprint conjunction is satisfiable; there is nothing to prove."""


class ProtocolAbort(ZkcecError):
    """A functionality or sub-protocol check failed. `phase` tags where."""

    def __init__(self, phase, reason=""):
        self.phase = phase
        self.reason = reason
        super().__init__(f"abort in {phase}" + (f": {reason}" if reason else ""))
