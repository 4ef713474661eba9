"""Exception hierarchy shared by the library and the command line.

Every failure raised by this package derives from :class:`TrainTrackError`
which itself is a :class:`ValueError`, so callers that only care about
"bad input" can keep catching ``ValueError``.  Each class carries a short
machine readable ``code`` and an optional ``details`` mapping which the CLI
serialises into its structured error object.
"""

from __future__ import annotations

from typing import Any, Dict, Optional

__all__ = [
    "TrainTrackError",
    "NonComposablePathError",
    "NonClosedLoopError",
    "TrivialPathError",
    "IrregularMapError",
    "NotTrainTrackError",
    "NotExpandingError",
    "InvariantLoopError",
    "MaxPowerExceededError",
    "UnboundedCancellationError",
    "ImageTooLongError",
    "NotHyperbolicError",
    "DecompositionError",
    "SubdivisionError",
    "ConvergenceError",
    "DslSyntaxError",
    "UndeclaredLetterError",
    "SimplexError",
    "WedgeError",
    "PairFileError",
]


class TrainTrackError(ValueError):
    code = "error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = dict(details or {})

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.code, "message": self.message, "details": self.details}


class NonComposablePathError(TrainTrackError):
    code = "non_composable"


class NonClosedLoopError(TrainTrackError):
    code = "non_closed"


class TrivialPathError(TrainTrackError):
    code = "trivial_path"


class IrregularMapError(TrainTrackError):
    code = "irregular_map"


class NotTrainTrackError(TrainTrackError):
    code = "not_train_track"


class NotExpandingError(TrainTrackError):
    code = "not_expanding"


class InvariantLoopError(TrainTrackError):
    code = "invariant_loop"


class MaxPowerExceededError(TrainTrackError):
    code = "max_power_exceeded"


class UnboundedCancellationError(TrainTrackError):
    code = "unbounded_cancellation"


class ImageTooLongError(TrainTrackError):
    code = "image_too_long"


class NotHyperbolicError(TrainTrackError):
    code = "not_hyperbolic"


class DecompositionError(TrainTrackError):
    code = "decomposition"


class SubdivisionError(TrainTrackError):
    code = "subdivision"


class ConvergenceError(TrainTrackError):
    code = "no_convergence"


class DslSyntaxError(TrainTrackError):
    """Syntax error in a map file, located by 1-based line and column."""

    code = "syntax"

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} (line {line}, column {column})", {"line": line, "column": column})
        self.line = line
        self.column = column


class UndeclaredLetterError(DslSyntaxError):
    code = "undeclared_letter"

    def __init__(self, letter: str, line: int, column: int) -> None:
        super().__init__(f"undeclared letter {letter!r}", line, column)
        self.letter = letter
        self.details["letter"] = letter


class SimplexError(TrainTrackError):
    code = "simplex"


class WedgeError(TrainTrackError):
    code = "wedge"


class PairFileError(TrainTrackError):
    code = "pair_file"
