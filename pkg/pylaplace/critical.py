from dataclasses import dataclass
import math
import numpy as np

from pylaplace._defaults import DEFAULTS
from pylaplace.errors import (
    AllDerivativesVanish,
    AmbiguousMaximum,
    BoundaryMaximum,
    DomainError,
    NoCriticalPoint,
    OddLeadingDerivative,
    PositiveLeadingDerivative,
)
from pylaplace.exprlang import as_expr, jet_eval
from pylaplace.quadrature.substitutions import compactified_grid

_MAX_REFINEMENTS = 4000


@dataclass(frozen=True)
class CriticalPoint:
    """
    Interior maximizer of ``h`` together with its degeneracy.

    Attributes
    ----------
        xi0 : float
            Location of the maximum.
        m : int
            Degeneracy index: the first non-negligible derivative at ``xi0`` has order ``2m``.
        d2m : float
            ``h^(2m)(xi0)``, always negative.
        h0 : float
            ``h(xi0)``.
    """

    xi0: float
    m: int
    d2m: float
    h0: float

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"Degeneracy index must be an integer >= 1, got {self.m}")
        if not self.d2m < 0:
            raise ValueError(f"Leading derivative must be negative, got {self.d2m}")
        if not math.isfinite(self.xi0) or not math.isfinite(self.h0):
            raise ValueError("Critical point and its value must be finite")

    @property
    def order(self):
        """
        Order ``2m`` of the leading derivative.

        :rtype: int
        """
        return 2 * self.m

    def to_dict(self):
        return {"xi0": self.xi0, "m": self.m, "d2m": self.d2m, "h0": self.h0}


def _slopes(h, x):
    """First and second derivative of ``h`` at ``x``, or None where ``h`` is not smooth."""
    try:
        jet = jet_eval(h, x, 2)
    except DomainError:
        return None
    g, g2 = jet.derivative(1), jet.derivative(2)
    if not (math.isfinite(g) and math.isfinite(g2)):
        return None
    return g, g2


def _evaluable_towards(h, start, target):
    """Move ``start`` towards ``target`` until ``h`` has a finite jet there."""
    point = start
    for _ in range(64):
        slopes = _slopes(h, point)
        if slopes is not None:
            return point, slopes
        point = 0.5 * (point + target)
    return target, _slopes(h, target)


def locate_maximum(h, a, b, grid=None, tol=None):
    """
    Locate the interior maximizer of ``h`` on (a, b).

    The interval is sampled through the compactifying substitution of
    :func:`~pylaplace.quadrature.substitutions.compactified_grid`; the best sample is bracketed by
    its neighbours and refined with a bisection-safeguarded Newton iteration on ``h'`` using jet
    derivatives. The iteration runs until ``h'`` vanishes or the bracket reaches floating point
    resolution, so degenerate maxima (where ``h''`` vanishes too) are located to full precision.
    When the best sample is the outermost one on an infinite side and ``h`` still rises there, the
    bracket is extended outwards with doubling steps until ``h'`` changes sign.

    :param h: Exponent function.
    :type h: Expr or str
    :param a: Left endpoint (``-inf`` allowed).
    :type a: float
    :param b: Right endpoint (``inf`` allowed).
    :type b: float
    :param grid: Number of samples, ``>= 16``. Defaults to ``Critical.grid``.
    :type grid: int, optional
    :param tol: Stationarity tolerance. Defaults to ``Critical.tol``.
    :type tol: float, optional
    :return: The maximizer ``xi0``.
    :rtype: float
    :raises BoundaryMaximum: If the best sample sits next to a finite endpoint, ``h`` keeps rising
        towards an infinite one, or the refined point leaves (a, b).
    :raises NoCriticalPoint: If ``h'`` does not change sign next to the best sample.
    :raises AmbiguousMaximum: If a separate local maximum among the samples reaches the same value.
    """
    h = as_expr(h)
    grid = DEFAULTS.get("Critical", "grid") if grid is None else grid
    tol = DEFAULTS.get("Critical", "tol") if tol is None else tol
    if not a < b:
        raise ValueError(f"Interval must satisfy a < b, got [{a}, {b}]")
    if grid < 16:
        raise ValueError("At least 16 grid samples are required")
    if not tol > 0:
        raise ValueError("Tolerance must be positive")

    x = compactified_grid(a, b, grid)
    values = np.asarray(h.evaluate(x, strict=False), dtype=float)
    values = np.where(np.isnan(values), -np.inf, values)
    if not np.any(np.isfinite(values)):
        raise NoCriticalPoint("h is not finite at any sample of the interval")

    best = int(np.argmax(values))
    last = len(x) - 1
    if (best == 0 and math.isfinite(a)) or (best == last and math.isfinite(b)):
        raise BoundaryMaximum(f"h is largest at the sample x={x[best]:.17g} next to an endpoint")

    center = _slopes(h, x[best])
    if center is None:
        raise NoCriticalPoint(f"h is not differentiable at the best sample x={x[best]:.17g}")
    if center[0] == 0:
        xi0 = float(x[best])
    elif (best == last and center[0] > 0) or (best == 0 and center[0] < 0):
        # the outermost sample of an infinite side still climbs
        xi0 = _refine(h, *_bracket_outwards(h, float(x[best]), center))
    else:
        if center[0] > 0:
            lo, slope_lo = float(x[best]), center
            hi, slope_hi = _evaluable_towards(h, float(x[best + 1]), float(x[best]))
        else:
            lo, slope_lo = _evaluable_towards(h, float(x[best - 1]), float(x[best]))
            hi, slope_hi = float(x[best]), center
        if slope_lo is None or slope_hi is None or slope_lo[0] < 0 or slope_hi[0] > 0:
            raise NoCriticalPoint(f"h' does not change sign around x={x[best]:.17g}")
        xi0 = _refine(h, lo, hi, float(x[best]), center)

    if not a < xi0 < b:
        raise BoundaryMaximum(f"refined maximizer {xi0:.17g} escapes ({a}, {b})")
    g, g2 = _slopes(h, xi0)
    if abs(g) > tol * max(1.0, abs(g2) * abs(xi0)):
        raise NoCriticalPoint(f"h'({xi0:.17g}) = {g:.3g} does not vanish within tolerance")

    _check_unique(values, best, float(h.evaluate(xi0)), tol, x)
    return xi0


def _bracket_outwards(h, start, slopes):
    """
    Step away from ``start`` in the uphill direction, doubling the distance, until ``h'`` changes
    sign.

    :return: ``(lo, hi, point, slopes)`` arguments of :func:`_refine`.
    :raises BoundaryMaximum: If ``h`` keeps rising up to the end of the floating point range.
    """
    direction = 1.0 if slopes[0] > 0 else -1.0
    point, step = start, max(1.0, abs(start))
    for _ in range(_MAX_REFINEMENTS):
        target = point + direction * step
        if not math.isfinite(target):
            break
        found = _slopes(h, target)
        if found is None:
            break
        if found[0] * direction < 0:
            if direction > 0:
                return point, target, point, slopes
            return target, point, point, slopes
        point, slopes, step = target, found, 2.0 * step
    side = "+inf" if direction > 0 else "-inf"
    raise BoundaryMaximum(f"h keeps increasing towards {side}")


def _refine(h, lo, hi, start, slopes):
    """Safeguarded Newton iteration on h' inside the bracket [lo, hi] with h'(lo) >= 0 >= h'(hi)."""
    point = start
    g, g2 = slopes
    for _ in range(_MAX_REFINEMENTS):
        if g == 0:
            break
        if g > 0:
            lo = point
        else:
            hi = point
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        step = point - g / g2 if g2 < 0 else mid
        if not lo < step < hi:
            step = mid
        if step == point:
            break
        point = step
        slopes = _slopes(h, point)
        if slopes is None:
            # stepped onto a singular point inside the bracket
            point = mid
            slopes = _slopes(h, point)
            if slopes is None:
                raise NoCriticalPoint(f"h is not differentiable at x={point:.17g}")
        g, g2 = slopes
    return point


def _check_unique(values, best, peak, tol, x):
    threshold = peak - tol * max(1.0, abs(peak))
    left = np.concatenate(([-np.inf], values[:-1]))
    right = np.concatenate((values[1:], [-np.inf]))
    local = (values >= left) & (values >= right) & (values >= threshold)
    local[max(best - 1, 0) : best + 2] = False
    if np.any(local):
        other = x[np.argmax(local)]
        raise AmbiguousMaximum(
            f"h reaches its maximum {peak:.17g} again near x={other:.17g}, "
            f"away from the maximizer near x={x[best]:.17g}"
        )


def classify_degeneracy(h, xi0, max_order=None, tol=None):
    """
    Determine the degeneracy index of a maximizer from its Taylor jet.

    A derivative of order ``j`` is negligible when ``|h^(j)(xi0)| <= tol * scale``, with ``scale``
    the largest derivative magnitude of order ``1..j+1`` (at least 1). Orders above ``j + 1`` do not
    enter, so steep high-order terms near a small ``xi0`` cannot hide the leading one.

    :param h: Exponent function.
    :type h: Expr or str
    :param xi0: Interior maximizer.
    :type xi0: float
    :param max_order: Highest derivative order inspected, even and ``>= 2``. Defaults to
        ``Critical.maxOrder``.
    :type max_order: int, optional
    :param tol: Relative negligibility threshold. Defaults to ``Critical.degeneracyTol``.
    :type tol: float, optional
    :return: The classified critical point.
    :rtype: CriticalPoint
    :raises OddLeadingDerivative: If the first non-negligible derivative has odd order.
    :raises PositiveLeadingDerivative: If the leading even derivative is positive.
    :raises AllDerivativesVanish: If every derivative up to ``max_order`` is negligible.
    """
    h = as_expr(h)
    max_order = DEFAULTS.get("Critical", "maxOrder") if max_order is None else max_order
    tol = DEFAULTS.get("Critical", "degeneracyTol") if tol is None else tol
    if int(max_order) != max_order or max_order < 2 or max_order % 2:
        raise ValueError(f"max_order must be an even integer >= 2, got {max_order}")

    jet = jet_eval(h, xi0, int(max_order))
    derivatives = [jet.derivative(j) for j in range(jet.order + 1)]
    magnitudes = [abs(d) for d in derivatives]
    for order, value in enumerate(derivatives[1:], start=1):
        scale = max([1.0] + magnitudes[1 : order + 2])
        if abs(value) <= tol * scale:
            continue
        if order % 2:
            raise OddLeadingDerivative(
                f"first non-negligible derivative at x={xi0:.17g} has odd order {order}"
            )
        if value > 0:
            raise PositiveLeadingDerivative(
                f"h^({order})({xi0:.17g}) = {value:.6g} > 0: the critical point is a minimum"
            )
        return CriticalPoint(float(xi0), order // 2, value, derivatives[0])
    raise AllDerivativesVanish(
        f"every derivative of h at x={xi0:.17g} up to order {max_order} is negligible"
    )


def find_critical_point(h, a, b, grid=None, tol=None, max_order=None, degeneracy_tol=None):
    """
    :func:`locate_maximum` followed by :func:`classify_degeneracy`.

    :rtype: CriticalPoint
    """
    xi0 = locate_maximum(h, a, b, grid=grid, tol=tol)
    return classify_degeneracy(h, xi0, max_order=max_order, tol=degeneracy_tol)
