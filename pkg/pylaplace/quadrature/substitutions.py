import numpy as np


class Substitution:
    """
    A parent class for monotone changes of variable ``x = x(u)`` mapping a finite parameter range
    onto a (possibly infinite) interval of the real line.

    Attributes
    ----------
        lower, upper : float
            Parameter range of ``u``. Its endpoints may map to infinite ``x`` and are then excluded.
        a, b : float
            Image interval of ``x`` (``-inf``/``inf`` allowed).
    """

    lower = 0.0
    upper = 1.0

    def __init__(self, a, b):
        """
        :param a: Left end of the image interval.
        :type a: float
        :param b: Right end of the image interval.
        :type b: float
        :raises ValueError: If ``a >= b``.
        """
        if not a < b:
            raise ValueError(f"Interval must satisfy a < b, got [{a}, {b}]")
        self.a = float(a)
        self.b = float(b)

    def __str__(self):
        return f"{self.__class__.__name__}: [{self.lower}, {self.upper}] -> [{self.a}, {self.b}]"

    def to_x(self, u):
        """
        Map parameter values to the image interval.

        :param u: Parameter value(s).
        :type u: float or numpy.ndarray
        :rtype: float or numpy.ndarray
        """
        raise NotImplementedError("Subclasses should implement this method.")

    def jacobian(self, u):
        """
        ``dx/du`` at the given parameter values.

        :param u: Parameter value(s).
        :type u: float or numpy.ndarray
        :rtype: float or numpy.ndarray
        """
        raise NotImplementedError("Subclasses should implement this method.")

    def grid(self, count):
        """
        ``count`` parameter values evenly spaced over the range, endpoints mapping to infinity
        excluded.

        :param count: Number of samples.
        :type count: int
        :return: Sample points ``x`` and the parameter values ``u`` they come from.
        :rtype: tuple of numpy.ndarray
        """
        keep_lower = np.isfinite(self.a)
        keep_upper = np.isfinite(self.b)
        extra = (not keep_lower) + (not keep_upper)
        u = np.linspace(self.lower, self.upper, count + extra)
        if not keep_lower:
            u = u[1:]
        if not keep_upper:
            u = u[:-1]
        with np.errstate(divide="ignore"):
            return self.to_x(u), u


class Affine(Substitution):
    """``x = a + u (b - a)`` for finite intervals."""

    def to_x(self, u):
        return self.a + u * (self.b - self.a)

    def jacobian(self, u):
        return np.full_like(np.asarray(u, dtype=float), self.b - self.a)


class RightHalfLine(Substitution):
    """``x = a + u / (1 - u)`` mapping [0, 1) onto [a, inf)."""

    def to_x(self, u):
        return self.a + u / (1 - u)

    def jacobian(self, u):
        return 1 / (1 - u) ** 2


class LeftHalfLine(Substitution):
    """``x = b - (1 - u) / u`` mapping (0, 1] onto (-inf, b]."""

    def to_x(self, u):
        return self.b - (1 - u) / u

    def jacobian(self, u):
        return 1 / u**2


class RealLine(Substitution):
    """``x = origin + (u - 1/2) / (u (1 - u))`` mapping (0, 1) onto the whole real line."""

    def __init__(self, a, b, origin=0.0):
        super().__init__(a, b)
        self.origin = float(origin)

    def to_x(self, u):
        return self.origin + (u - 0.5) / (u * (1 - u))

    def jacobian(self, u):
        return (u * u - u + 0.5) / (u * (1 - u)) ** 2


class DoubleExponentialTail(Substitution):
    """
    Double exponential map of ``t`` in [0, cutoff] onto the tail beyond a finite ``start``:

    .. math::
        x = start \\pm L \\left(e^{\\frac{\\pi}{2}\\sinh t} - 1\\right)

    The transformed integrand decays double exponentially in ``t`` for any integrand with
    exponential decay, so truncating at ``cutoff`` (``x`` of order 1e18 for cutoff 4) leaves a
    negligible remainder.
    """

    def __init__(self, start, direction=1, scale=1.0, cutoff=4.0):
        """
        :param start: Finite point where the tail begins.
        :type start: float
        :param direction: ``+1`` for [start, inf), ``-1`` for (-inf, start].
        :type direction: int
        :param scale: Characteristic length ``L`` of the integrand near ``start``.
        :type scale: float
        :param cutoff: Upper end of the ``t`` range.
        :type cutoff: float
        """
        if direction > 0:
            super().__init__(start, np.inf)
        else:
            super().__init__(-np.inf, start)
        if scale <= 0:
            raise ValueError("Tail scale must be positive")
        self.start = float(start)
        self.direction = 1 if direction > 0 else -1
        self.scale = float(scale)
        self.upper = float(cutoff)

    def to_x(self, t):
        return self.start + self.direction * self.scale * np.expm1(0.5 * np.pi * np.sinh(t))

    def jacobian(self, t):
        return self.scale * 0.5 * np.pi * np.cosh(t) * np.exp(0.5 * np.pi * np.sinh(t))


def compactifying_substitution(a, b, origin=0.0):
    """
    Pick the monotone substitution onto [a, b] matching which endpoints are infinite.

    :param a: Left endpoint (``-inf`` allowed).
    :type a: float
    :param b: Right endpoint (``inf`` allowed).
    :type b: float
    :param origin: Point mapped from ``u = 1/2`` when both endpoints are infinite.
    :type origin: float, optional
    :rtype: Substitution
    """
    if np.isfinite(a) and np.isfinite(b):
        return Affine(a, b)
    if np.isfinite(a):
        return RightHalfLine(a, b)
    if np.isfinite(b):
        return LeftHalfLine(a, b)
    return RealLine(a, b, origin=origin)


def compactified_grid(a, b, count, origin=0.0):
    """
    Sample [a, b] through the compactifying substitution. Finite endpoints are part of the
    sample; infinite ones are not.

    :param a: Left endpoint (``-inf`` allowed).
    :type a: float
    :param b: Right endpoint (``inf`` allowed).
    :type b: float
    :param count: Number of samples.
    :type count: int
    :param origin: Center of the doubly infinite map.
    :type origin: float, optional
    :return: Increasing sample points.
    :rtype: numpy.ndarray
    """
    x, _ = compactifying_substitution(a, b, origin=origin).grid(count)
    return x
