import math
import numpy as np
from pandas import DataFrame

import pylaplace.critical as critical
from pylaplace._defaults import DEFAULTS
from pylaplace.asymptotic import LogScaledValue, laplace_estimate, log_factorial
from pylaplace.exprlang import as_expr
from pylaplace.quadrature.adaptive import adaptive_quad

# option name -> (section, attribute) of its packaged default
_OPTION_DEFAULTS = {
    "grid": ("Critical", "grid"),
    "tol": ("Critical", "tol"),
    "degeneracy_tol": ("Critical", "degeneracyTol"),
    "max_order": ("Critical", "maxOrder"),
    "rel_tol": ("Quadrature", "relTol"),
    "abs_tol": ("Quadrature", "absTol"),
}
# peak widths at which mandatory breakpoints are placed on both sides of the maximizer
_BREAKPOINT_WIDTHS = (1.0, 4.0, 16.0)


class ProblemSpec:
    """
    A Laplace-type integral ``int_a^b phi(x) exp(n h(x)) dx`` without its large parameter ``n``.

    Attributes
    ----------
        phi : Expr
            Amplitude function.
        h : Expr
            Exponent function, with its unique maximum inside (a, b).
        a, b : float
            Integration bounds, ``-inf``/``inf`` allowed.
        options : dict
            Numerical options: ``grid``, ``tol``, ``degeneracy_tol``, ``max_order``, ``rel_tol``
            and ``abs_tol``. Unset entries take the packaged defaults.
    """

    def __init__(self, phi, h, a, b, **options):
        """
        Constructor of the ProblemSpec class.

        :param phi: Amplitude, as text or expression tree.
        :type phi: str or Expr
        :param h: Exponent, as text or expression tree.
        :type h: str or Expr
        :param a: Left bound.
        :type a: float
        :param b: Right bound.
        :type b: float
        :param options: Overrides of the numerical defaults.
        :raises ValueError: If ``a >= b`` or an option name is unknown.
        """
        self.phi = phi
        self.h = h
        self.interval = (a, b)
        self._options = {}
        for name, value in options.items():
            self.set_option(name, value)

    # == Getters

    @property
    def phi(self):
        """
        Amplitude function.

        :rtype: Expr
        """
        return self._phi

    @property
    def h(self):
        """
        Exponent function.

        :rtype: Expr
        """
        return self._h

    @property
    def interval(self):
        """
        Integration bounds.

        :return: ``(a, b)``.
        :rtype: tuple of float
        """
        return self._a, self._b

    @property
    def a(self):
        return self._a

    @property
    def b(self):
        return self._b

    @property
    def options(self):
        """
        Effective numerical options, overrides merged over the defaults.

        :rtype: dict
        """
        return {name: self.option(name) for name in _OPTION_DEFAULTS}

    def option(self, name):
        """
        Value of one numerical option.

        :param name: Option name.
        :type name: str
        :raises ValueError: If the option is unknown.
        """
        if name not in _OPTION_DEFAULTS:
            raise ValueError(f"Unknown option: {name}")
        if name in self._options:
            return self._options[name]
        return DEFAULTS.get(*_OPTION_DEFAULTS[name])

    # == Setters

    @phi.setter
    def phi(self, value):
        self._phi = as_expr(value)

    @h.setter
    def h(self, value):
        self._h = as_expr(value)

    @interval.setter
    def interval(self, value):
        """
        Set both bounds at once.

        :param value: ``(a, b)`` with ``a < b``.
        :type value: tuple of float
        :raises ValueError: If ``a >= b`` or a bound is NaN.
        """
        a, b = (float(bound) for bound in value)
        if not a < b:
            raise ValueError(f"Interval must satisfy a < b, got [{a}, {b}]")
        self._a, self._b = a, b

    def set_option(self, name, value):
        """
        Override one numerical option; ``None`` restores the default.

        :param name: Option name.
        :type name: str
        :param value: New value.
        :raises ValueError: If the option is unknown.
        """
        if name not in _OPTION_DEFAULTS:
            raise ValueError(f"Unknown option: {name}")
        if value is None:
            self._options.pop(name, None)
        else:
            self._options[name] = value

    # == Methods

    def critical_point(self):
        """
        Locate and classify the maximizer of ``h`` with the problem's options.

        :rtype: CriticalPoint
        """
        return critical.find_critical_point(
            self._h,
            self._a,
            self._b,
            grid=self.option("grid"),
            tol=self.option("tol"),
            max_order=self.option("max_order"),
            degeneracy_tol=self.option("degeneracy_tol"),
        )

    def __str__(self):
        return f"int_[{self._a}, {self._b}] {self._phi.render()} * exp(n * {self._h.render()}) dx"


def _check_n(n, minimum):
    if int(n) != n or n < minimum:
        raise ValueError(f"n must be an integer >= {minimum}, got {n}")
    return int(n)


def peak_width(cp, n):
    """
    Width ``(n (-d2m) / (2m)!)^(-1/(2m))`` of the peak of ``exp(n (h - h(xi0)))`` at ``xi0``.

    :param cp: Classified maximizer.
    :type cp: CriticalPoint
    :param n: Large parameter, ``>= 1``.
    :type n: int
    :rtype: float
    """
    n = _check_n(n, 1)
    order = cp.order
    return math.exp(-(math.log(n) + math.log(-cp.d2m) - log_factorial(order)) / order)


def scaled_integrand(ps, cp, n):
    """
    The vectorised integrand ``x -> phi(x) exp(n (h(x) - h(xi0)))``; ``phi`` alone for ``n = 0``.

    Samples outside the domain of ``phi`` or ``h`` evaluate to NaN.

    :param ps: Problem.
    :type ps: ProblemSpec
    :param cp: Its classified maximizer.
    :type cp: CriticalPoint
    :param n: Large parameter, ``>= 0``.
    :type n: int
    :rtype: callable
    """
    n = _check_n(n, 0)
    phi, h, h0 = ps.phi, ps.h, cp.h0

    if n == 0:

        def integrand(x):
            return phi.evaluate(x, strict=False)

    else:

        def integrand(x):
            with np.errstate(all="ignore"):
                exponent = n * (h.evaluate(x, strict=False) - h0)
                return phi.evaluate(x, strict=False) * np.exp(exponent)

    return integrand


def quadrature_hints(cp, n):
    """
    Mandatory breakpoints and tail scale for integrating the scaled integrand.

    :param cp: Classified maximizer.
    :type cp: CriticalPoint
    :param n: Large parameter, ``>= 0``.
    :type n: int
    :return: Breakpoints ``xi0`` and ``xi0 +- {1, 4, 16} * width``, and the tail scale
        ``max(width, 1)``.
    :rtype: tuple
    """
    if n == 0:
        return (cp.xi0,), 1.0
    width = peak_width(cp, n)
    offsets = [k * width for k in _BREAKPOINT_WIDTHS]
    breakpoints = sorted([cp.xi0 - d for d in offsets] + [cp.xi0] + [cp.xi0 + d for d in offsets])
    return tuple(breakpoints), max(width, 1.0)


def scaled_quad(ps, cp, n, a=None, b=None, rel_tol=None, abs_tol=None):
    """
    Adaptive quadrature of the scaled integrand over [a, b] (the problem's bounds by default).

    :rtype: QuadResult
    """
    a = ps.a if a is None else a
    b = ps.b if b is None else b
    breakpoints, scale = quadrature_hints(cp, n)
    return adaptive_quad(
        scaled_integrand(ps, cp, n),
        a,
        b,
        rel_tol=ps.option("rel_tol") if rel_tol is None else rel_tol,
        abs_tol=ps.option("abs_tol") if abs_tol is None else abs_tol,
        breakpoints=breakpoints,
        scale=scale,
    )


def integrate_scaled(ps, cp, n, rel_tol=None, abs_tol=None):
    """
    The integral ``I_n = int_a^b phi(x) exp(n h(x)) dx`` in log-scaled form.

    The quadrature runs on ``phi(x) exp(n (h(x) - h(xi0)))``, which stays bounded by ``|phi|``,
    and ``n h(xi0)`` is added back in log space.

    :param ps: Problem.
    :type ps: ProblemSpec
    :param cp: Its classified maximizer.
    :type cp: CriticalPoint
    :param n: Large parameter, ``>= 0``.
    :type n: int
    :rtype: LogScaledValue
    :raises DivergentIntegral: If the integral does not exist.
    """
    n = _check_n(n, 0)
    result = scaled_quad(ps, cp, n, rel_tol=rel_tol, abs_tol=abs_tol)
    return LogScaledValue.from_float(result.value).shifted(n * cp.h0)


def ratio_table(ps, cp, n_list):
    """
    Compare the integral with its leading asymptotic term along increasing ``n``.

    :param ps: Problem.
    :type ps: ProblemSpec
    :param cp: Its classified maximizer.
    :type cp: CriticalPoint
    :param n_list: Strictly increasing positive integers.
    :type n_list: list of int
    :return: Columns ``n``, ``log_I``, ``log_A``, ``ratio`` and ``abs_ratio_minus_one``, rows in
        input order. ``log_I`` and ``log_A`` are logs of magnitudes.
    :rtype: pandas.DataFrame

    .. rubric:: Example

    .. code-block:: python

        ps = ProblemSpec("1", "log(x)-x", 0, float("inf"))
        ratio_table(ps, ps.critical_point(), [10, 100])
        #      n      log_I   log_A     ratio  abs_ratio_minus_one
        # 0   10 -10.224...   ...    1.008365         8.365e-03
        # 1  100 ...                 1.000834         8.337e-04
    """
    n_list = [_check_n(n, 1) for n in n_list]
    if not n_list:
        raise ValueError("n_list must not be empty")
    if any(lo >= hi for lo, hi in zip(n_list[:-1], n_list[1:])):
        raise ValueError("n_list must be strictly increasing")

    rows = []
    for n in n_list:
        integral = integrate_scaled(ps, cp, n)
        estimate = laplace_estimate(ps.phi, cp, n).value
        ratio = integral.ratio_to(estimate)
        rows.append(
            {
                "n": n,
                "log_I": integral.log_mag,
                "log_A": estimate.log_mag,
                "ratio": ratio,
                "abs_ratio_minus_one": abs(ratio - 1.0),
            }
        )
    return DataFrame(rows, columns=["n", "log_I", "log_A", "ratio", "abs_ratio_minus_one"])
