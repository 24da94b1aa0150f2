from dataclasses import dataclass
import numpy as np

from pylaplace.errors import DomainError

UNARY_FUNCTIONS = ("exp", "log", "sqrt", "sin", "cos")
BINARY_SYMBOLS = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


class Expr:
    """
    A parent class for the nodes of a single-variable real expression tree. Trees are immutable
    and only hold the variable ``x``; the constants ``pi`` and ``e`` are literals.

    Nodes are evaluated vectorially: ``evaluate`` accepts a float or any array-like of sample
    points and returns a float or a ``numpy.ndarray`` of the same shape.

    .. note::
        Overflow yields a signed infinity and division by zero follows IEEE rules; only calls
        outside a real domain (log of a non-positive number, sqrt of a negative one, non-integer
        power of a negative base) are errors.
    """

    def evaluate(self, x, strict=True):
        """
        Evaluate the expression at ``x``.

        :param x: Evaluation point(s).
        :type x: float or array-like
        :param strict: If True, out-of-domain calls raise ``DomainError``; otherwise the affected
            samples become NaN.
        :type strict: bool, optional
        :return: The value(s) of the expression.
        :rtype: float or numpy.ndarray
        :raises DomainError: If ``strict`` and some sample falls outside a real domain.
        """
        points = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            values = self._eval(points, strict)
        if values.ndim == 0:
            return float(values)
        return values

    def render(self):
        """
        Render the tree as fully parenthesised text which parses back to an equivalent tree.

        :return: Text representation.
        :rtype: str
        """
        raise NotImplementedError("Subclasses should implement this method.")

    @property
    def depends_on_x(self):
        """
        Whether the variable ``x`` appears in the subtree.

        :rtype: bool
        """
        raise NotImplementedError("Subclasses should implement this method.")

    def _eval(self, points, strict):
        raise NotImplementedError("Subclasses should implement this method.")

    def _reject(self, bad, argument, result, strict):
        """
        Flag out-of-domain samples: raise on the first one if strict, otherwise NaN them.
        """
        if not np.any(bad):
            return result
        if strict:
            offending = np.broadcast_to(argument, np.shape(bad))[bad]
            raise DomainError(self.render(), float(offending.flat[0]))
        result = np.array(result, dtype=float)
        result[bad] = np.nan
        return result

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class Num(Expr):
    """Numeric literal."""

    value: float

    def _eval(self, points, strict):
        return np.full(points.shape, self.value)

    def render(self):
        if not np.isfinite(self.value):
            text = "1e999"
        else:
            text = repr(float(self.value))
        return f"(-{text.lstrip('-')})" if self.value < 0 else text

    @property
    def depends_on_x(self):
        return False


@dataclass(frozen=True)
class Var(Expr):
    """The free variable ``x``."""

    def _eval(self, points, strict):
        return points.copy()

    def render(self):
        return "x"

    @property
    def depends_on_x(self):
        return True


@dataclass(frozen=True)
class Unary(Expr):
    """Negation or an elementary function call."""

    op: str
    arg: Expr

    def __post_init__(self):
        if self.op != "negate" and self.op not in UNARY_FUNCTIONS:
            raise ValueError(f"Unknown unary operator: {self.op}")

    def _eval(self, points, strict):
        a = self.arg._eval(points, strict)
        if self.op == "negate":
            return -a
        if self.op == "exp":
            return np.exp(a)
        if self.op == "log":
            return self._reject(a <= 0, a, np.log(a), strict)
        if self.op == "sqrt":
            return self._reject(a < 0, a, np.sqrt(a), strict)
        if self.op == "sin":
            return np.sin(a)
        return np.cos(a)

    def render(self):
        if self.op == "negate":
            return f"(-{self.arg.render()})"
        return f"{self.op}({self.arg.render()})"

    @property
    def depends_on_x(self):
        return self.arg.depends_on_x


@dataclass(frozen=True)
class Binary(Expr):
    """Arithmetic operation; the exponent of ``pow`` may be any subexpression."""

    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in BINARY_SYMBOLS:
            raise ValueError(f"Unknown binary operator: {self.op}")

    def _eval(self, points, strict):
        a = self.left._eval(points, strict)
        b = self.right._eval(points, strict)
        if self.op == "add":
            return a + b
        if self.op == "sub":
            return a - b
        if self.op == "mul":
            return a * b
        if self.op == "div":
            return a / b
        # real-valued semantics: negative bases only take integer exponents
        bad = (a < 0) & (b != np.floor(b))
        return self._reject(bad, a, np.power(a, b), strict)

    def render(self):
        return f"({self.left.render()} {BINARY_SYMBOLS[self.op]} {self.right.render()})"

    @property
    def depends_on_x(self):
        return self.left.depends_on_x or self.right.depends_on_x


def evaluate(f, x, strict=True):
    """
    Evaluate an expression at a point (functional form of :meth:`Expr.evaluate`).

    :param f: Expression tree.
    :type f: Expr
    :param x: Evaluation point(s).
    :type x: float or array-like
    :param strict: Raise on out-of-domain calls instead of returning NaN.
    :type strict: bool, optional
    :return: The value(s) of ``f``.
    :rtype: float or numpy.ndarray
    """
    return f.evaluate(x, strict=strict)


def render(f):
    """
    Render an expression tree as text (functional form of :meth:`Expr.render`).

    :param f: Expression tree.
    :type f: Expr
    :rtype: str
    """
    return f.render()
