"""Exception hierarchy shared by every module."""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class DomainError(ToolkitError, ValueError):
    """An argument lies outside an operation's stated domain."""


class ResourceError(ToolkitError, RuntimeError):
    """A computation would exceed a configured budget; the message names it."""


class NumericalIntegrityError(ToolkitError, ArithmeticError):
    """A quantity that must be numerically real/exact failed its check."""
