"""
Typed errors for the SRIF toolkit
=================================

Every failure a caller can act on is a subclass of SrifError. The CLI maps
``exit_code`` straight to the process exit status.
"""


class SrifError(Exception):
    """Base class for all toolkit errors"""
    exit_code = 5


class DimensionTooSmall(SrifError):
    exit_code = 3


class DimensionMismatch(SrifError):
    exit_code = 3


class EdgeMismatch(SrifError):
    """Histograms built over different bin edges"""


class DegenerateReference(SrifError):
    """Reference feature is ~0 so a ratio against it is undefined"""


class DegenerateScores(SrifError):
    exit_code = 4


class InsufficientData(SrifError):
    exit_code = 4


class WeightNormalization(SrifError):
    pass


class DecodeError(SrifError):
    exit_code = 2


class ConfigError(SrifError):
    exit_code = 2


class TableFormatError(SrifError):
    exit_code = 2


class ParseError(SrifError):
    exit_code = 2

    def __init__(self, message: str, line_number: int = 0):
        super().__init__(f"line {line_number}: {message}" if line_number else message)
        self.line_number = line_number
