"""Exception and warning types shared across the package."""


class PopRankError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(PopRankError):
    """Invalid or conflicting object-type or relationship-type declaration."""


class RecordError(PopRankError):
    """Source record that cannot be merged: unknown type, bad attribute,
    or a missing key value."""


class GraphError(PopRankError):
    """Structurally invalid graph, link set, or page/object reference."""


class ConfigError(PopRankError):
    """Invalid numeric configuration or parameter assignment."""


class FormatError(PopRankError):
    """Malformed corpus or report file; message carries file and line."""


class NonConvergenceWarning(UserWarning):
    """Power iteration hit max_iter with the residual still above tol."""
