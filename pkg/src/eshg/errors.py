"""Exception hierarchy shared by all evaluation modules."""


class EshgError(Exception):
    """Base class for all library errors."""


class DomainError(EshgError):
    """An input lies outside the domain of definition (e.g. |q| >= 1)."""


class TruncationError(EshgError):
    """A truncated product or sum hit its factor/term cap before the
    tail criterion was satisfied."""


class PoleError(EshgError):
    """Evaluation was requested too close to a structural pole, or a
    denominator factor vanished."""


class BalancingError(EshgError):
    """A multiplicative balancing condition on the parameters is violated."""


class ContourError(EshgError):
    """The unit-torus contour does not separate the required pole
    sequences for the given parameters."""


class HypothesisError(EshgError):
    """The exponent vector (or other data) fails the hypotheses of the
    requested limit regime."""


class ConvergenceError(EshgError):
    """A numerical estimate failed its self-consistency check
    (quadrature refinement, Richardson extrapolation, fit residual)."""


class MembershipError(EshgError):
    """A point lies outside the polytope on which a piecewise function
    is defined."""
