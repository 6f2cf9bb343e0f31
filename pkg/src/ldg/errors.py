"""Error hierarchy shared by every module."""

from __future__ import annotations


class LdgError(Exception):
    """Base class. ``exit_code`` is what the CLI returns for it."""

    exit_code = 2


class InputError(LdgError):
    pass


class UnknownNode(InputError):
    pass


class UnknownEdge(InputError):
    pass


class NodeNotReserved(InputError):
    pass


class NonBasicLabel(InputError):
    pass


class InactiveEndpoint(InputError):
    pass


class UnknownName(InputError):
    pass


class PendingSubstitution(InputError):
    pass


class UnboundVariable(InputError):
    pass


class MalformedSubstitution(InputError):
    pass


class InexpressibleLabel(InputError):
    pass


class NotATree(InputError):
    pass


class UnknownRule(InputError):
    pass


class MissingInvariant(InputError):
    pass


class InexpressibleApp(InputError):
    pass


class DomainMismatch(InputError):
    pass


class AlphabetMismatch(InputError):
    pass


class StepBoundExceeded(LdgError):
    exit_code = 3


class BudgetExceeded(LdgError):
    exit_code = 3


class ActionError(InputError):
    """An action of a sequence failed; ``index`` is its position."""

    def __init__(self, index: int, cause: LdgError):
        super().__init__(f"action {index}: {cause}")
        self.index = index
        self.cause = cause


class SyntaxError(InputError):  # noqa: A001 - mirrors the interface name
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column
