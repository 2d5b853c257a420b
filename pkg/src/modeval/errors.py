"""Exception types shared across the toolkit."""


class MetricsError(Exception):
    """Base class for all toolkit errors."""


class UsageError(MetricsError):
    """The caller asked for something the API cannot do (bad id, bad parameter)."""


class SchemaError(MetricsError):
    """Input structure does not match the declared schema (missing column, bad label set)."""


class DataError(MetricsError):
    """Input values are unusable (non-numeric, non-finite, mismatched lengths)."""


class EmptyInputError(DataError):
    """No data rows were found."""


class DefinednessError(DataError):
    """The requested procedure is undefined on this input (degenerate data)."""
