"""Exception hierarchy shared by every module."""


class GaussFitError(Exception):
    """Base class for all library errors."""


class DataError(GaussFitError, ValueError):
    """Observations cannot support a fit (malformed or degenerate input)."""


class InvalidDataset(DataError):
    pass


class NonIncreasingX(InvalidDataset):
    pass


class TooFewPoints(DataError):
    pass


class NonPositivePeak(DataError):
    pass


class ParseError(DataError):
    """A dataset file could not be parsed.

    ``row`` is 1-based and counts the header line, ``column`` is 1-based.
    """

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = ""
        if row is not None:
            where = f"row {row}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class FitFailure(GaussFitError, ArithmeticError):
    """The numerical procedure broke down on otherwise valid input."""


class SingularSystem(FitFailure):
    pass


class InvalidCurvature(FitFailure):
    """Log-domain curvature is non-negative, so no bell curve exists."""
