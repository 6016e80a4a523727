"""Exception hierarchy shared across the engine."""


class QuerySynthError(Exception):
    """Base class for all engine errors."""


class ParseError(QuerySynthError):
    """Syntax violation in a .search source file."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}" if line else message)


class SemanticError(QuerySynthError):
    """Well-formed syntax with an invalid meaning (undeclared name, arity, totality)."""


class EvalError(QuerySynthError):
    """Runtime failure in concrete or symbolic interpretation (loop bound, bad index)."""


class UnboundVariable(QuerySynthError):
    """Formula evaluated under an assignment missing one of its variables."""


class CapacityError(QuerySynthError):
    """A configured enumeration or scan cap was exceeded."""


class PathExplosion(QuerySynthError):
    """Symbolic execution exceeded the configured path cap."""


class EmptyKnowledge(QuerySynthError):
    """An observation filtered the candidate set to nothing (inconsistent oracle)."""


class NoWorthwhileQuery(QuerySynthError):
    """select_query called when no valid query can gain information."""


class RoundLimitExceeded(QuerySynthError):
    """Safety cap on session rounds hit; indicates an engine bug."""


class InvalidOutcome(QuerySynthError):
    """An oracle produced a label that is not declared by the spec."""


class ReplayExhausted(QuerySynthError):
    """A replay oracle was asked for more answers than it was given."""


class OracleTimeout(QuerySynthError):
    """An external oracle did not answer within the configured limit."""


class CorpusError(QuerySynthError):
    """A corpus entry failed to load or validate; message names the entry."""


class DimensionError(QuerySynthError):
    """An operation requiring a specific query dimensionality was given another."""
