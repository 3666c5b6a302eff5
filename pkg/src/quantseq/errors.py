"""Exception types shared across the package."""


class ShapeError(ValueError):
    """An array or parameter vector has the wrong length or dimensions."""


class ParameterError(ValueError):
    """A scalar argument is outside its valid domain (non-finite, out of range)."""


class DegenerateInputError(ValueError):
    """Input admits no valid result (e.g. an all-zero vector cannot be normalized)."""


class CircuitSpecError(ValueError):
    """A circuit program violates its structural contract (wire reuse, slot gaps)."""


class UnsupportedRuleError(ValueError):
    """The two-point shift rule does not apply to the requested parameter slot."""


class CapacityError(ValueError):
    """Problem size exceeds what the requested method can hold in memory."""


class StratificationError(ValueError):
    """A class is missing or too small for the requested stratified split."""


class UndefinedMetricError(ValueError):
    """The metric is undefined for this input (e.g. ROC-AUC with one class)."""


class DegenerateTestError(ValueError):
    """The statistical test is degenerate for this input (zero variance)."""


class FormatError(ValueError):
    """A file does not conform to its declared on-disk format."""


class StateError(RuntimeError):
    """An operation was called against a stale or mismatched cached state."""


class LabelError(ValueError):
    """A classification label is outside {0, 1}."""


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int, message: str = ""):
        self.epoch = epoch
        super().__init__(message or f"non-finite loss at epoch {epoch}")
