"""Exception hierarchy shared by every desdec module."""


class DesdecError(Exception):
    """Base class for all errors raised by desdec."""


class AutomatonError(DesdecError, ValueError):
    """An automaton or alphabet system is not well formed."""


class AlphabetError(DesdecError, ValueError):
    """Event sets do not fit together (not a subset, not a cover, ...)."""


class NondeterministicError(DesdecError, ValueError):
    """An operation that needs a deterministic automaton received one that is not."""


class ResourceLimitError(DesdecError, RuntimeError):
    """A state-space construction exceeded its configured limit."""


class InternalConsistencyError(DesdecError, AssertionError):
    """Two decision procedures that are expected to agree did not.

    Between a relation and its independent validator this is a bug. Between
    DC1-DC4 and the oracle it flags an input where the conditions are not
    an exact characterization (see ``decompose_two(strict=False)``).
    """


class ParseError(DesdecError, ValueError):
    def __init__(self, message, line=None, source=None):
        self.message = message
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class ArityError(DesdecError, ValueError):
    """Lists that must have one entry per agent have the wrong length."""
