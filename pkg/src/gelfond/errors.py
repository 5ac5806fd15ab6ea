"""Exception hierarchy shared by every module of the package."""


class GelfondError(Exception):
    """Base class for all errors raised by this package."""


class DependentInput(GelfondError):
    """Lattice basis vectors are linearly dependent over Q."""


class Singular(GelfondError):
    """A square matrix has zero determinant."""


class Reducible(GelfondError):
    """The defining polynomial factors over Q."""


class PrecisionExhausted(GelfondError):
    """A ball enclosure is too wide to decide a question at the current precision."""


class ShapeError(GelfondError):
    """A linear system does not have the required shape (0 < rows < cols)."""


class NotIntegral(GelfondError):
    """An element expected to have integer power-basis coordinates does not."""


class Divisibility(GelfondError):
    """2m does not divide q^2."""


class DegreeTooSmall(GelfondError):
    """The field degree is below the minimum the construction requires."""


class ParamError(GelfondError):
    """Auxiliary parameters are out of range."""


class HypothesisViolation(GelfondError):
    """An instance violates one of the setup hypotheses (alpha != 0, 1; beta irrational; ...)."""


class OrderSearchExceeded(GelfondError):
    """No nonvanishing derivative sum was found below the search cap."""


class PoleProximity(GelfondError):
    """An evaluation ball touches one of the poles 1..m of S(z)."""


class WidthNotReached(GelfondError):
    """Adaptive quadrature hit its subdivision limit before reaching the target width."""


class NoThreshold(GelfondError):
    """c15 < 1, so the contradiction inequality holds for every r (threshold is r* = 1)."""

    def __init__(self, message, r_star=1):
        super().__init__(message)
        self.r_star = r_star
