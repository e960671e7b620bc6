"""Exception types raised across the package."""


class EdgempError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(EdgempError, ValueError):
    """A constructor or operation received an out-of-domain parameter."""


class InvalidProtocolError(EdgempError):
    """A protocol does not match the graph it is run on, or a rule returned a malformed state."""


class MemoryBudgetError(EdgempError):
    """An update rule produced a state larger than the protocol's bit budget."""


class UnsupportedModeError(EdgempError):
    """The requested state representation is not supported by the operation."""


class CapExceededError(EdgempError):
    """A brute-force oracle was asked to enumerate beyond its configured size cap."""
