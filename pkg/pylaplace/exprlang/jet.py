from dataclasses import dataclass
import math
import numpy as np

from pylaplace.errors import DomainError
from pylaplace.exprlang.nodes import Binary, Num, Unary, Var


@dataclass(frozen=True, eq=False)
class Jet:
    """
    Truncated Taylor expansion of a function around ``center``.

    Attributes
    ----------
        center : float or numpy.ndarray
            Expansion point(s).
        coeffs : numpy.ndarray
            Array of shape ``(order + 1,) + shape(center)`` with ``coeffs[j] = f^(j)(center) / j!``.
    """

    center: object
    coeffs: np.ndarray

    @property
    def order(self):
        """
        Highest order carried by the jet.

        :rtype: int
        """
        return len(self.coeffs) - 1

    def derivative(self, j):
        """
        Exact j-th derivative at the center (up to floating rounding).

        :param j: Derivative order, ``0 <= j <= order``.
        :type j: int
        :return: ``coeffs[j] * j!``.
        :rtype: float or numpy.ndarray
        :raises ValueError: If ``j`` is outside the jet.
        """
        if j < 0 or j > self.order:
            raise ValueError(f"Derivative order {j} outside jet of order {self.order}")
        value = self.coeffs[j] * math.factorial(j)
        return float(value) if np.ndim(value) == 0 else value

    def truncate(self, j):
        """
        Jet of order ``j`` sharing the first ``j + 1`` coefficients.

        :param j: New order, ``0 <= j <= order``.
        :type j: int
        :rtype: Jet
        """
        if j < 0 or j > self.order:
            raise ValueError(f"Cannot truncate a jet of order {self.order} to order {j}")
        return Jet(self.center, self.coeffs[: j + 1].copy())


# Every recurrence computes coefficient k from coefficients < k with sums taken in a fixed order
# j = 1..k, so a jet of order k truncated to j < k is bit-identical to the jet of order j.


def _convolve(a, b, k):
    total = a[0] * b[k]
    for j in range(1, k + 1):
        total = total + a[j] * b[k - j]
    return total


def _mul(a, b):
    return [_convolve(a, b, k) for k in range(len(a))]


def _div(a, b, node):
    if np.any(b[0] == 0):
        raise DomainError(node.render(), 0.0)
    c = [a[0] / b[0]]
    for k in range(1, len(a)):
        acc = a[k]
        for j in range(1, k + 1):
            acc = acc - b[j] * c[k - j]
        c.append(acc / b[0])
    return c


def _exp(a):
    e = [np.exp(a[0])]
    for k in range(1, len(a)):
        acc = 0.0
        for j in range(1, k + 1):
            acc = acc + j * a[j] * e[k - j]
        e.append(acc / k)
    return e


def _log(a, node):
    bad = a[0] <= 0
    if np.any(bad):
        raise DomainError(node.render(), float(np.broadcast_to(a[0], bad.shape)[bad].flat[0]))
    lg = [np.log(a[0])]
    for k in range(1, len(a)):
        acc = 0.0
        for j in range(1, k):
            acc = acc + j * lg[j] * a[k - j]
        lg.append((a[k] - acc / k) / a[0])
    return lg


def _sqrt(a, node):
    # sqrt is not differentiable at 0, so a zero base only admits the order-0 jet
    bad = (a[0] < 0) if len(a) == 1 else (a[0] <= 0)
    if np.any(bad):
        raise DomainError(node.render(), float(np.broadcast_to(a[0], bad.shape)[bad].flat[0]))
    s = [np.sqrt(a[0])]
    for k in range(1, len(a)):
        acc = a[k]
        for j in range(1, k):
            acc = acc - s[j] * s[k - j]
        s.append(acc / (2 * s[0]))
    return s


def _sin_cos(a):
    s = [np.sin(a[0])]
    c = [np.cos(a[0])]
    for k in range(1, len(a)):
        acc_s = 0.0
        acc_c = 0.0
        for j in range(1, k + 1):
            acc_s = acc_s + j * a[j] * c[k - j]
            acc_c = acc_c + j * a[j] * s[k - j]
        s.append(acc_s / k)
        c.append(-acc_c / k)
    return s, c


def _integer_power(a, r):
    """Binary exponentiation by truncated products, valid for any base and integer r >= 0."""
    result = [np.ones_like(a[0])] + [np.zeros_like(a[0]) for _ in a[1:]]
    base = a
    while r:
        if r & 1:
            result = _mul(result, base)
        r >>= 1
        if r:
            base = _mul(base, base)
    return result


def _real_power(a, r, node):
    integral = float(r).is_integer()
    bad = (a[0] == 0) if integral else (a[0] <= 0)
    if np.any(bad):
        raise DomainError(node.render(), float(np.broadcast_to(a[0], bad.shape)[bad].flat[0]))
    p = [np.power(a[0], r)]
    for k in range(1, len(a)):
        acc = 0.0
        for j in range(1, k + 1):
            acc = acc + ((r + 1) * j - k) * a[j] * p[k - j]
        p.append(acc / (k * a[0]))
    return p


def _propagate(node, center, order):
    zeros = [np.zeros_like(center) for _ in range(order)]
    if isinstance(node, Num):
        return [np.full_like(center, node.value)] + zeros
    if isinstance(node, Var):
        head = [center.copy()]
        if order >= 1:
            head.append(np.ones_like(center))
        return head + zeros[1:]
    if isinstance(node, Unary):
        a = _propagate(node.arg, center, order)
        if node.op == "negate":
            return [-c for c in a]
        if node.op == "exp":
            return _exp(a)
        if node.op == "log":
            return _log(a, node)
        if node.op == "sqrt":
            return _sqrt(a, node)
        s, c = _sin_cos(a)
        return s if node.op == "sin" else c
    if isinstance(node, Binary):
        a = _propagate(node.left, center, order)
        if node.op == "pow" and not node.right.depends_on_x:
            r = node.right.evaluate(0.0)
            if float(r).is_integer() and r >= 0:
                return _integer_power(a, int(r))
            return _real_power(a, r, node)
        b = _propagate(node.right, center, order)
        if node.op == "add":
            return [x + y for x, y in zip(a, b)]
        if node.op == "sub":
            return [x - y for x, y in zip(a, b)]
        if node.op == "mul":
            return _mul(a, b)
        if node.op == "div":
            return _div(a, b, node)
        # variable exponent: a^b = exp(b log a)
        return _exp(_mul(b, _log(a, node)))
    raise TypeError(f"Unsupported node type: {type(node).__name__}")


def jet_eval(f, center, order):
    """
    Propagate a truncated Taylor series of order ``order`` through the expression tree.

    Products use Cauchy convolution and elementary functions their series recurrences, so
    ``coeffs[j] * j!`` is the exact j-th derivative of ``f`` at ``center`` up to rounding.

    :param f: Expression tree.
    :type f: Expr
    :param center: Expansion point, or an array of points for a batched jet.
    :type center: float or array-like
    :param order: Truncation order, ``>= 0``.
    :type order: int
    :return: The jet of ``f`` at ``center``.
    :rtype: Jet
    :raises DomainError: If ``center`` lies outside the domain of some subexpression.
    :raises ValueError: If ``order`` is negative.

    .. rubric:: Example

    .. code-block:: python

        jet_eval(parse("log(x)-x"), 1.0, 2).coeffs  # array([-1. ,  0. , -0.5])
    """
    if order < 0:
        raise ValueError("Jet order must be >= 0")
    points = np.asarray(center, dtype=float)
    with np.errstate(all="ignore"):
        coeffs = np.array(_propagate(f, points, order), dtype=float)
    return Jet(float(points) if points.ndim == 0 else points, coeffs)


def derivative(f, x0, k):
    """
    k-th derivative of ``f`` at ``x0``, read from the jet of order ``k``.

    :param f: Expression tree.
    :type f: Expr
    :param x0: Point(s) of evaluation.
    :type x0: float or array-like
    :param k: Derivative order, ``>= 0``.
    :type k: int
    :return: ``jet_eval(f, x0, k).coeffs[k] * k!``.
    :rtype: float or numpy.ndarray
    """
    return jet_eval(f, x0, k).derivative(k)
