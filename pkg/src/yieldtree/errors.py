"""Exception hierarchy shared across the package.

The three branches map onto the CLI exit codes: UsageError -> 1,
DataError -> 2, AnalysisError -> 3.
"""


class YieldTreeError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(YieldTreeError):
    """Caller violated a precondition or supplied an invalid configuration."""


class DataError(YieldTreeError):
    """Input data failed validation (parse errors, orphans, incomplete rows)."""


class SchemaError(DataError):
    """A declared column is absent from the file being loaded."""


class ParseError(DataError):
    """A cell could not be parsed as its declared kind."""


class AnalysisError(YieldTreeError):
    """An analysis step could not produce a result from valid data."""


class NoValleyError(AnalysisError):
    """The histogram has no interior valley to place a threshold in."""


class EmptyDatasetError(AnalysisError):
    """All rows were removed before an operation that needs at least one."""
