"""Exception types shared across the pipeline."""


class OracleViolation(AssertionError):
    """A computed quantity contradicts a structural identity that must hold."""


class PrecisionError(RuntimeError):
    """The requested check lies outside the certified truncation window."""
