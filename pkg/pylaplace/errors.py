"""
Exceptions and warning categories raised across ``pylaplace``.

Every error derives from :class:`LaplaceError`, itself a ``ValueError``, so callers that only care
about "bad input or unsolvable problem" can catch ``ValueError``.
"""


class LaplaceError(ValueError):
    """Base class of every pylaplace error."""


# == Expression language


class ExpressionSyntaxError(LaplaceError):
    """
    Malformed expression text.

    Attributes
    ----------
        offset : int
            Byte offset in the source text where parsing stopped.
        expected : str
            Description of the token the parser expected at ``offset``.
    """

    def __init__(self, offset, expected, text=""):
        self.offset = offset
        self.expected = expected
        self.text = text
        super().__init__(f"expected {expected} at offset {offset}")


class UnknownIdentifier(LaplaceError):
    """Identifier other than ``x``, ``pi``, ``e`` or a supported function."""

    def __init__(self, name, offset):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier '{name}' at offset {offset}")


class DomainError(LaplaceError):
    """
    Elementary function called outside its real domain.

    Attributes
    ----------
        node : str
            Rendered text of the failing subexpression.
        argument : float
            First offending argument value.
    """

    def __init__(self, node, argument):
        self.node = node
        self.argument = argument
        super().__init__(f"{node} is undefined at argument {argument!r}")


# == Critical point search and classification


class BoundaryMaximum(LaplaceError):
    """The maximum of h sits on (or escapes to) an endpoint of the interval."""


class NoCriticalPoint(LaplaceError):
    """h' has no sign change near the best sample."""


class AmbiguousMaximum(LaplaceError):
    """A second, separated grid sample matches the maximum value within tolerance."""


class OddLeadingDerivative(LaplaceError):
    """The first non-negligible derivative at the critical point has odd order."""


class PositiveLeadingDerivative(LaplaceError):
    """The leading even derivative is positive: the critical point is a minimum."""


class AllDerivativesVanish(LaplaceError):
    """Every derivative up to the requested order is negligible."""


# == Asymptotics


class ZeroAmplitude(LaplaceError):
    """phi vanishes at the maximizer, so the leading term carries no information."""


class NonPositiveArgument(LaplaceError):
    """log_gamma called with an argument <= 0."""


class UnrepresentableValue(LaplaceError):
    """A log-scaled value falls outside the floating point exponent range."""


# == Quadrature and proof mirror


class DivergentIntegral(LaplaceError):
    """Panel estimates grow without bound towards an infinite endpoint."""


class WindowExceedsInterval(LaplaceError):
    """
    The window [xi0 - eps, xi0 + eps] is not contained in (a, b).

    Attributes
    ----------
        min_n : float
            Smallest n for which the window fits.
    """

    def __init__(self, epsilon, n, min_n):
        self.epsilon = epsilon
        self.n = n
        self.min_n = min_n
        super().__init__(
            f"window half-width {epsilon:.6g} at n={n} reaches an endpoint; "
            f"the window fits from n={min_n:.17g}"
        )


# == Warnings


class NonConvergenceWarning(UserWarning):
    """Adaptive quadrature exhausted its evaluation budget."""


class NaNIntegrandWarning(UserWarning):
    """The integrand returned NaN at isolated points; those samples were taken as 0."""


class HypothesisWarning(UserWarning):
    """A sample-based hypothesis check failed (advisory)."""
