"""Exception types raised across the package."""


class CubeFormatError(ValueError):
    """Dataset header is missing, unparseable, or declares an unsupported layout."""


class IntegrityError(ValueError):
    """Payload disagrees with its header or violates a data invariant."""


class DegenerateInputError(ValueError):
    """Input carries no usable signal (e.g. a zero-variance cube)."""


class SplitError(ValueError):
    """A train/test split cannot satisfy its per-class constraints."""


class PairingError(ValueError):
    """Patch pairing is impossible (fewer than two classes present)."""


class TrainingError(ValueError):
    """Classifier training received unusable data (e.g. a single class)."""


class RenderError(ValueError):
    """A class label has no palette entry."""


class SingularDenominatorError(RuntimeError):
    """The trace-ratio denominator collapsed; increase gamma or alpha."""


class ConvergenceError(RuntimeError):
    """Iteration budget exhausted before reaching tolerance."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual
