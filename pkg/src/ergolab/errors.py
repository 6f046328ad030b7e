"""Exception hierarchy shared by the library and the CLI."""


class ErgolabError(Exception):
    """Base class for every error raised by ergolab."""


class StructuralError(ErgolabError, ValueError):
    """A set or system value is malformed (bad interval order, index out of range...)."""


class SpaceMismatchError(ErgolabError, ValueError):
    """Operands live on different spaces."""


class PreconditionError(ErgolabError):
    """An operation was called outside its documented domain."""


class CapabilityError(ErgolabError):
    """The requested construction is not available for this system class."""


class BudgetError(ErgolabError):
    """An exact value could not be certified within the iteration budget."""


class ParseError(ErgolabError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class SemanticError(ErgolabError):
    """Parsed input violates a model invariant (weights, bijectivity, ranges)."""
