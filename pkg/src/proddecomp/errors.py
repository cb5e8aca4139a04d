"""Exception types shared across the package."""


class ProddecompError(Exception):
    """Base class for package-specific errors."""


class DimensionMismatch(ProddecompError):
    """Operands disagree about dimensions or factor structure."""


class DegenerateInput(ProddecompError):
    """Structurally valid input that is numerically degenerate (zero vector, non-PSD, ...)."""


class HypothesisViolation(ProddecompError):
    """A decomposition fails one of the uniqueness hypotheses (collinearity, independence, factorability)."""


class OperatorMismatch(ProddecompError):
    """Two inputs that must describe the same operator or global vector do not."""


class NotExtractable(ProddecompError):
    """No weighted product decomposition could be recovered under the stated hypotheses."""


class FileError(ProddecompError):
    """A data file is missing, malformed, or violates its schema."""
