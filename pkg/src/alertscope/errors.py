"""Exception types shared across the package."""


class AlertscopeError(Exception):
    """Base class; carries a short machine-readable code for the API layer."""

    code = "error"


class InvalidResourceError(AlertscopeError):
    code = "invalid-resource"


class EmptySelectionError(AlertscopeError):
    code = "empty-selection"


class OrderingError(AlertscopeError):
    code = "unsorted-input"


class RangeError(AlertscopeError):
    code = "invalid-range"


class ConfigError(AlertscopeError):
    code = "invalid-config"


class SpecError(AlertscopeError):
    code = "invalid-spec"


class HandleError(AlertscopeError):
    code = "unknown-handle"


class ParseError(AlertscopeError):
    code = "parse-failure"


class UnknownNodeError(AlertscopeError):
    code = "unknown-node"
