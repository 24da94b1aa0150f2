from dataclasses import dataclass
import math
import numpy as np
from pandas import DataFrame

from pylaplace.errors import NonPositiveArgument, UnrepresentableValue, ZeroAmplitude
from pylaplace.exprlang import as_expr

# Natural log range of finite doubles, subnormals included
_LOG_MAX = math.log(np.finfo(float).max)
_LOG_MIN = math.log(np.nextafter(0.0, 1.0))

# 13-term Lanczos sum scaled by exp(-g), coefficients highest degree first
_LANCZOS_G = 6.024680040776729583740234375
_LANCZOS_NUM = np.array(
    [
        0.006061842346248906525783753964555936883222,
        0.5098416655656676188125178644804694509993,
        19.51992788247617482847860966235652136208,
        449.9445569063168119446858607650988409623,
        6955.999602515376140356310115515198987526,
        75999.29304014542649875303443598909137092,
        601859.6171681098786670226533699352302507,
        3481712.15498064590882071018964774556468,
        14605578.08768506808414169982791359218571,
        43338889.32467613834773723740590533316085,
        86363131.28813859145546927288977868422342,
        103794043.1163445451906271053616070238554,
        56906521.91347156388090791033559122686859,
    ]
)
_LANCZOS_DEN = np.array(
    [
        1.0,
        66.0,
        1925.0,
        32670.0,
        357423.0,
        2637558.0,
        13339535.0,
        45995730.0,
        105258076.0,
        150917976.0,
        120543840.0,
        39916800.0,
        0.0,
    ]
)
# log((k-1)!) is taken from math.factorial for integer arguments up to this bound
_EXACT_FACTORIAL_LIMIT = 171


@dataclass(frozen=True)
class LogScaledValue:
    """
    A real number stored as a sign and the natural log of its magnitude.

    Attributes
    ----------
        sign : int
            -1, 0 or +1.
        log_mag : float
            ``log|value|``; ``-inf`` when ``sign`` is 0.
    """

    sign: int
    log_mag: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"Sign must be -1, 0 or 1, got {self.sign}")
        if self.sign == 0:
            object.__setattr__(self, "log_mag", -math.inf)
        elif math.isnan(self.log_mag):
            raise ValueError("log_mag must not be NaN")

    @classmethod
    def from_float(cls, value):
        """
        :param value: Finite or infinite real number.
        :type value: float
        :rtype: LogScaledValue
        """
        value = float(value)
        if math.isnan(value):
            raise ValueError("Cannot log-scale NaN")
        if value == 0:
            return cls(0, -math.inf)
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    def to_float(self):
        """
        Materialize as a plain float.

        :rtype: float
        :raises UnrepresentableValue: If the magnitude over- or underflows a double.
        """
        if self.sign == 0:
            return 0.0
        if not _LOG_MIN <= self.log_mag <= _LOG_MAX:
            raise UnrepresentableValue(
                f"exp({self.log_mag:.17g}) is outside the double precision range"
            )
        return self.sign * math.exp(self.log_mag)

    def shifted(self, log_factor):
        """
        Multiply by ``exp(log_factor)``.

        :param log_factor: Natural log of a positive factor.
        :type log_factor: float
        :rtype: LogScaledValue
        """
        return LogScaledValue(self.sign, self.log_mag + log_factor)

    def ratio_to(self, other):
        """
        ``self / other`` as a plain float, computed in log space.

        :type other: LogScaledValue
        :rtype: float
        """
        return (self / other).to_float()

    def __mul__(self, other):
        if not isinstance(other, LogScaledValue):
            return NotImplemented
        return LogScaledValue(self.sign * other.sign, self.log_mag + other.log_mag)

    def __truediv__(self, other):
        if not isinstance(other, LogScaledValue):
            return NotImplemented
        if other.sign == 0:
            raise ZeroDivisionError("division by a log-scaled zero")
        return LogScaledValue(self.sign * other.sign, self.log_mag - other.log_mag)

    def __neg__(self):
        return LogScaledValue(-self.sign, self.log_mag)

    def __float__(self):
        return self.to_float()

    def __str__(self):
        if self.sign == 0:
            return "0"
        return f"{'-' if self.sign < 0 else ''}exp({self.log_mag:.17g})"


@dataclass(frozen=True)
class Estimate:
    """
    Leading-order asymptotic value of the integral at one ``n``.

    Attributes
    ----------
        n : int
        value : LogScaledValue
            Sign equals the sign of ``phi(xi0)``.
        m : int
        xi0 : float
    """

    n: int
    value: LogScaledValue
    m: int
    xi0: float


def _lanczos_sum(x):
    if x <= 1:
        return np.polyval(_LANCZOS_NUM, x) / np.polyval(_LANCZOS_DEN, x)
    y = 1.0 / x
    return np.polyval(_LANCZOS_NUM[::-1], y) / np.polyval(_LANCZOS_DEN[::-1], y)


def log_gamma(x):
    """
    Natural log of the Gamma function for positive arguments.

    Integer arguments up to 171 are exact through ``math.factorial``; other arguments use the
    13-term Lanczos approximation scaled by ``exp(-g)``:

    .. math::
        \\log\\Gamma(x) = \\log L(x)
        + (x - \\tfrac{1}{2})\\left(\\log(x + g - \\tfrac{1}{2}) - 1\\right)

    :param x: Argument, ``> 0``.
    :type x: float
    :rtype: float
    :raises NonPositiveArgument: If ``x <= 0`` or NaN.
    """
    x = float(x)
    if not x > 0:
        raise NonPositiveArgument(f"log_gamma requires x > 0, got {x!r}")
    if math.isinf(x):
        return math.inf
    if x.is_integer() and x <= _EXACT_FACTORIAL_LIMIT:
        return math.log(math.factorial(int(x) - 1))
    return float(math.log(_lanczos_sum(x)) + (x - 0.5) * (math.log(x + _LANCZOS_G - 0.5) - 1.0))


def log_factorial(n):
    """
    ``log(n!)``, exact through ``math.factorial`` for ``n <= 170``.

    :param n: Non-negative integer.
    :type n: int
    :rtype: float
    """
    if int(n) != n or n < 0:
        raise ValueError(f"log_factorial requires a non-negative integer, got {n}")
    return log_gamma(int(n) + 1)


def gauss_power_integral(m):
    """
    ``Gamma(1/(2m)) / m``, the integral of ``exp(-z^(2m))`` over the real line.

    :param m: Degeneracy index, ``>= 1``.
    :type m: int
    :rtype: float
    """
    if int(m) != m or m < 1:
        raise ValueError(f"m must be an integer >= 1, got {m}")
    return math.exp(log_gamma(1.0 / (2 * m))) / m


def _check_n(n):
    if int(n) != n or n < 1:
        raise ValueError(f"n must be an integer >= 1, got {n}")
    return int(n)


def theorem1_log_estimate(phi0, h0, d2, n):
    """
    Non-degenerate closed form ``phi0 * exp(n h0) * sqrt(-2 pi / (n d2))`` in log-scaled form.

    :param phi0: Amplitude at the maximizer.
    :type phi0: float
    :param h0: Exponent at the maximizer.
    :type h0: float
    :param d2: Second derivative at the maximizer, ``< 0``.
    :type d2: float
    :param n: Large parameter, ``>= 1``.
    :type n: int
    :rtype: LogScaledValue
    """
    n = _check_n(n)
    if not d2 < 0:
        raise ValueError(f"Second derivative must be negative, got {d2}")
    return LogScaledValue.from_float(phi0).shifted(n * h0 + _sqrt_prefactor(d2, n))


def _sqrt_prefactor(d2, n):
    return 0.5 * math.log(-2.0 * math.pi / (n * d2))


def laplace_estimate(phi, cp, n):
    """
    Leading asymptotic term of the integral of ``phi(x) exp(n h(x))`` for a maximizer of any
    degeneracy:

    .. math::
        A_n = \\varphi(\\xi_0) e^{n h(\\xi_0)} \\frac{\\Gamma(1/2m)}{m}
              \\left(\\frac{(2m)!}{-n h^{(2m)}(\\xi_0)}\\right)^{1/2m}

    For ``m = 1`` the prefactor is checked against the one of :func:`theorem1_log_estimate`.

    :param phi: Amplitude function.
    :type phi: Expr or str
    :param cp: Classified maximizer of ``h``.
    :type cp: CriticalPoint
    :param n: Large parameter, ``>= 1``.
    :type n: int
    :rtype: Estimate
    :raises ZeroAmplitude: If ``phi(xi0) == 0``.
    :raises RuntimeError: If the two closed forms disagree at ``m = 1`` beyond 1e-13.
    """
    n = _check_n(n)
    phi0 = as_expr(phi).evaluate(cp.xi0)
    if phi0 == 0:
        raise ZeroAmplitude(f"phi vanishes at the maximizer x={cp.xi0:.17g}")
    if not math.isfinite(phi0):
        raise ValueError(f"phi is not finite at the maximizer x={cp.xi0:.17g}")

    order = 2 * cp.m
    prefactor = (
        log_gamma(1.0 / order)
        - math.log(cp.m)
        + (log_factorial(order) - math.log(n) - math.log(-cp.d2m)) / order
    )
    value = LogScaledValue.from_float(phi0).shifted(n * cp.h0 + prefactor)
    if cp.m == 1:
        reference = _sqrt_prefactor(cp.d2m, n)
        if not abs(reference - prefactor) <= 1e-13 * max(1.0, abs(reference)):
            raise RuntimeError(
                f"general and non-degenerate prefactors disagree at m = 1: "
                f"{prefactor:.17g} != {reference:.17g}"
            )
    return Estimate(n, value, cp.m, cp.xi0)


def stirling_table(n_list):
    """
    Compare ``n! e^n n^(-n-1/2)`` with ``sqrt(2 pi)`` and its ``1 + 1/(12n)`` correction.

    :param n_list: Positive integers.
    :type n_list: iterable of int
    :return: One row per ``n`` with columns ``n``, ``log_factorial``, ``stirling_ratio``,
        ``ratio_to_sqrt_2pi`` and ``correction_1_12n``.
    :rtype: pandas.DataFrame
    """
    rows = []
    for n in n_list:
        n = _check_n(n)
        log_fact = log_factorial(n)
        log_ratio = log_fact + n - (n + 0.5) * math.log(n)
        rows.append(
            {
                "n": n,
                "log_factorial": log_fact,
                "stirling_ratio": math.exp(log_ratio),
                "ratio_to_sqrt_2pi": math.exp(log_ratio - 0.5 * math.log(2 * math.pi)),
                "correction_1_12n": 1.0 + 1.0 / (12 * n),
            }
        )
    if not rows:
        raise ValueError("n_list must not be empty")
    return DataFrame(rows, columns=list(rows[0]))
