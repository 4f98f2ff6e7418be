"""Exception types shared across the toolkit."""


class RecbenchError(Exception):
    """Base class for every error raised deliberately by this package."""


class ParseError(RecbenchError):
    """A data file could not be parsed.

    Carries the offending ``path`` and 1-based ``line`` so callers can point
    at the exact input row.
    """

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        location = ""
        if path is not None:
            location += f"{path}:"
        if line is not None:
            location += f"{line}:"
        super().__init__(f"{location} {message}" if location else message)
        self.path = path
        self.line = line


class EmptyDatasetError(RecbenchError):
    """An input file contained no usable records."""


class ProtocolError(RecbenchError):
    """The holdout protocol cannot be applied to the given dataset."""


class ConfigurationError(RecbenchError):
    """Invalid configuration; the message enumerates every detected problem."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ColdStartError(RecbenchError):
    """A recommendation was requested for a user unknown to the model."""


class UndefinedMetricError(RecbenchError):
    """A metric has no defined value for the given input."""
