"""Exception hierarchy; each error carries the CLI exit code it maps to"""

from typing import Optional

USAGE_EXIT = 2
DATA_EXIT = 3
NUMERIC_EXIT = 4


class PhaseIdentError(Exception):
    """Base class for every error raised by py-phase-ident"""

    exit_code = DATA_EXIT


# Usage errors


class ParameterError(PhaseIdentError, ValueError):
    exit_code = USAGE_EXIT


class ConfigError(PhaseIdentError, ValueError):
    exit_code = USAGE_EXIT


# Data errors


class ParseError(PhaseIdentError, ValueError):
    """Malformed input row; ``line`` is the 1-based line in the source file"""

    def __init__(self, message: str, line: Optional[int] = None, path=None):
        self.line = line
        self.path = path
        location = ""
        if path is not None:
            location += f"{path}"
        if line is not None:
            location += f":{line}" if location else f"line {line}"
        super().__init__(f"{location}: {message}" if location else message)


class TopologyError(PhaseIdentError, KeyError):
    def __str__(self) -> str:
        # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class DegenerateSeriesError(PhaseIdentError, ValueError):
    pass


class EmptyDatasetError(PhaseIdentError, ValueError):
    pass


class AlignmentError(PhaseIdentError, ValueError):
    pass


# Numeric errors


class SizeError(PhaseIdentError, ValueError):
    exit_code = NUMERIC_EXIT


class MaskError(PhaseIdentError, ValueError):
    exit_code = NUMERIC_EXIT


class EmptyFeatureError(PhaseIdentError, ValueError):
    exit_code = NUMERIC_EXIT


class NumericError(PhaseIdentError, ArithmeticError):
    exit_code = NUMERIC_EXIT


class MatrixError(PhaseIdentError, ValueError):
    exit_code = NUMERIC_EXIT
