"""Exception hierarchy shared by every pedcc module."""


class PedccError(Exception):
    """Base class for all pedcc errors."""


class InvalidShape(PedccError, ValueError):
    """Requested (k, n) or array shape is outside an operation's domain."""


class DimensionMismatch(PedccError, ValueError):
    pass


class NearSingular(PedccError, ArithmeticError):
    """A Gram-Schmidt pivot collapsed below the singularity threshold."""

    def __init__(self, column, norm):
        super().__init__(f"pivot norm {norm:.3e} at column {column}")
        self.column = column
        self.norm = norm


class SamplingFailed(PedccError, RuntimeError):
    pass


class DegenerateState(PedccError, RuntimeError):
    """Two charges coincided and jittering could not separate them."""


class IllConditioned(PedccError, ArithmeticError):
    pass


class ZeroVector(PedccError, ValueError):
    pass


class ZeroFeature(ZeroVector):
    pass


class NonFinite(PedccError, FloatingPointError):
    """Loss or gradient stopped being finite during training."""
