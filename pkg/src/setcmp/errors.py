"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: InputError -> 2, CapacityError -> 3,
InvariantError -> 4.
"""


class SetcmpError(Exception):
    """Base class for all package errors."""


class InputError(SetcmpError):
    """Caller passed an argument outside an operation's contract."""


class CapacityError(SetcmpError):
    """A requested feature space or enumeration exceeds the desk-scale guard."""


class InvariantError(SetcmpError):
    """An internal invariant was violated; indicates a bug, not bad input."""
