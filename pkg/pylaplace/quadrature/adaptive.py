from dataclasses import dataclass
import heapq
import math
import warnings
import numpy as np

from pylaplace._defaults import DEFAULTS
from pylaplace.errors import DivergentIntegral, NaNIntegrandWarning, NonConvergenceWarning
from pylaplace.quadrature.substitutions import DoubleExponentialTail

# Gauss-Kronrod 7/15 abscissae (positive half, decreasing) and weights
_XGK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ]
)
_WGK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG = np.array(
    [
        0.0,
        0.129484966168869693270611432679082,
        0.0,
        0.279705391489276667901467771423780,
        0.0,
        0.381830050505118944950369775488975,
        0.0,
        0.417959183673469387755102040816327,
    ]
)
_NODES = np.concatenate((-_XGK[:-1], _XGK[::-1]))
_KRONROD = np.concatenate((_WGK[:-1], _WGK[::-1]))
_GAUSS = np.concatenate((_WG[:-1], _WG[::-1]))
_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class QuadResult:
    """
    Outcome of an adaptive integration.

    Attributes
    ----------
        value : float
            Integral estimate.
        err_est : float
            Estimated absolute error (>= 0).
        evaluations : int
            Number of integrand evaluations.
        converged : bool
            True when ``err_est <= max(abs_tol, rel_tol * |value|)``.
    """

    value: float
    err_est: float
    evaluations: int
    converged: bool


class _Segment:
    """
    One piece of the integration range in its own parameter ``u``: the identity on a finite
    interval, or a double exponential tail map.
    """

    def __init__(self, f, lower, upper, substitution=None):
        self.f = f
        self.lower = lower
        self.upper = upper
        self.substitution = substitution
        self.nan_count = 0

    def __call__(self, u):
        if self.substitution is None:
            values = self.f(u)
        else:
            values = self.f(self.substitution.to_x(u)) * self.substitution.jacobian(u)
        nans = np.isnan(values)
        if np.any(nans):
            self.nan_count += int(nans.sum())
            values = np.where(nans, 0.0, values)
        return values


def _gauss_kronrod(segment, lo, hi):
    """
    Gauss-Kronrod 7/15 rule on [lo, hi] with the QUADPACK error heuristic.

    :return: (integral, error estimate)
    :rtype: tuple of float
    """
    half = 0.5 * (hi - lo)
    center = 0.5 * (hi + lo)
    with np.errstate(all="ignore"):
        fx = segment(center + half * _NODES)
    result_k = float(np.dot(_KRONROD, fx))
    result_g = float(np.dot(_GAUSS, fx))
    if not math.isfinite(result_k):
        raise DivergentIntegral(f"non-finite panel estimate on [{lo:.17g}, {hi:.17g}]")
    mean = 0.5 * result_k
    res_abs = float(np.dot(_KRONROD, np.abs(fx))) * abs(half)
    res_asc = float(np.dot(_KRONROD, np.abs(fx - mean))) * abs(half)
    error = abs((result_k - result_g) * half)
    if res_asc != 0.0 and error != 0.0:
        error = res_asc * min(1.0, (200.0 * error / res_asc) ** 1.5)
    if res_abs > _TINY / (50.0 * _EPS):
        error = max(50.0 * _EPS * res_abs, error)
    return result_k * half, error


def _vectorize(f, vectorized):
    if vectorized:

        def call(x):
            return np.broadcast_to(np.asarray(f(x), dtype=float), np.shape(x))

    else:

        def call(x):
            return np.array([f(float(xi)) for xi in np.ravel(x)], dtype=float).reshape(np.shape(x))

    return call


def _finite_points(a, b, breakpoints, scale):
    points = {float(p) for p in breakpoints if a < p < b and math.isfinite(p)}
    points.update(p for p in (a, b) if math.isfinite(p))
    points = sorted(points)
    if not points:
        points = [0.0]
    if len(points) == 1 and math.isinf(b) and math.isfinite(a):
        # half-line without interior breakpoints: keep the finite end away from the tail map
        points.append(a + scale)
    elif len(points) == 1 and math.isinf(a) and math.isfinite(b):
        points.insert(0, b - scale)
    return points


def adaptive_quad(
    f,
    a,
    b,
    rel_tol=None,
    abs_tol=None,
    breakpoints=(),
    scale=1.0,
    max_evaluations=None,
    vectorized=True,
):
    """
    Globally adaptive Gauss-Kronrod (7/15) integration of ``f`` over [a, b].

    Finite stretches between endpoints and breakpoints are bisected directly. An infinite end is
    first mapped by the double exponential substitution of
    :class:`~pylaplace.quadrature.substitutions.DoubleExponentialTail` onto a finite ``t`` range,
    which is then bisected like any other panel. Panels are always refined worst-error first, and
    the final value is summed in interval order, so results do not depend on refinement order.

    :param f: Integrand. With ``vectorized`` it receives a ``numpy.ndarray`` of abscissae.
    :type f: callable
    :param a: Left endpoint (``-inf`` allowed).
    :type a: float
    :param b: Right endpoint (``inf`` allowed).
    :type b: float
    :param rel_tol: Relative tolerance, defaults to ``Quadrature.relTol``.
    :type rel_tol: float, optional
    :param abs_tol: Absolute tolerance, defaults to ``Quadrature.absTol``.
    :type abs_tol: float, optional
    :param breakpoints: Mandatory panel edges inside (a, b).
    :type breakpoints: iterable of float, optional
    :param scale: Characteristic width of the integrand near the outermost finite points; sets the
        length unit of the tail substitution and of the split of a half-line.
    :type scale: float, optional
    :param max_evaluations: Evaluation budget, defaults to ``Quadrature.maxEvaluations``.
    :type max_evaluations: int, optional
    :param vectorized: Whether ``f`` accepts arrays.
    :type vectorized: bool, optional
    :return: The integral estimate.
    :rtype: QuadResult
    :raises DivergentIntegral: When panel estimates are non-finite or keep growing towards an
        infinite endpoint.
    :raises ValueError: If ``a >= b`` or a tolerance is not positive.

    .. note::
        NaN integrand values are taken as 0 (a ``NaNIntegrandWarning`` is issued), and running out
        of the evaluation budget returns the best estimate with ``converged=False`` together with
        a ``NonConvergenceWarning``.
    """
    rel_tol = DEFAULTS.get("Quadrature", "relTol") if rel_tol is None else rel_tol
    abs_tol = DEFAULTS.get("Quadrature", "absTol") if abs_tol is None else abs_tol
    if max_evaluations is None:
        max_evaluations = DEFAULTS.get("Quadrature", "maxEvaluations")
    cutoff = DEFAULTS.get("Quadrature", "tailCutoff")
    if not a < b:
        raise ValueError(f"Integration interval must satisfy a < b, got [{a}, {b}]")
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("Tolerances must be positive")
    if not scale > 0 or not math.isfinite(scale):
        scale = 1.0

    call = _vectorize(f, vectorized)
    points = _finite_points(float(a), float(b), breakpoints, scale)

    segments = []
    panels = []
    if math.isinf(a):
        tail = DoubleExponentialTail(points[0], direction=-1, scale=scale, cutoff=cutoff)
        segments.append(_Segment(call, 0.0, cutoff, tail))
    for lo, hi in zip(points[:-1], points[1:]):
        segments.append(_Segment(call, lo, hi))
    if math.isinf(b):
        tail = DoubleExponentialTail(points[-1], direction=1, scale=scale, cutoff=cutoff)
        segments.append(_Segment(call, 0.0, cutoff, tail))

    # initial panels: one per finite stretch, unit t-steps on the tails
    evaluations = 0
    for index, segment in enumerate(segments):
        if segment.substitution is None:
            edges = [segment.lower, segment.upper]
        else:
            edges = list(np.linspace(0.0, cutoff, int(math.ceil(cutoff)) + 1))
        for lo, hi in zip(edges[:-1], edges[1:]):
            value, error = _gauss_kronrod(segment, lo, hi)
            evaluations += 15
            panels.append((index, lo, hi, value, error))

    heap = [(-p[4], p[0], p[1], p[2], p[3]) for p in panels]
    heapq.heapify(heap)
    frozen = []
    total = math.fsum(p[3] for p in panels)
    total_error = sum(p[4] for p in panels)
    iteration = 0

    while True:
        if total_error <= max(abs_tol, rel_tol * abs(total)):
            break
        if not heap or evaluations + 30 > max_evaluations:
            break
        neg_error, index, lo, hi, value = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            # panel at floating point resolution, keep its contribution as is
            frozen.append((-neg_error, index, lo, hi, value))
            continue
        segment = segments[index]
        left_value, left_error = _gauss_kronrod(segment, lo, mid)
        right_value, right_error = _gauss_kronrod(segment, mid, hi)
        evaluations += 30
        heapq.heappush(heap, (-left_error, index, lo, mid, left_value))
        heapq.heappush(heap, (-right_error, index, mid, hi, right_value))
        total += left_value + right_value - value
        total_error += left_error + right_error + neg_error

        iteration += 1
        if iteration % 256 == 0:
            # refresh the running sums to keep rounding drift out of the stopping test
            total = math.fsum(p[4] for p in heap + frozen)
            total_error = sum(-p[0] for p in heap) + sum(p[0] for p in frozen)

    # deterministic assembly in interval order
    final = sorted(
        [(p[1], p[2], p[3], p[4], -p[0]) for p in heap]
        + [(p[1], p[2], p[3], p[4], p[0]) for p in frozen]
    )
    value = math.fsum(p[3] for p in final)
    err_est = math.fsum(p[4] for p in final)
    converged = err_est <= max(abs_tol, rel_tol * abs(value))

    _check_tails(segments, final, cutoff, max(abs_tol, rel_tol * abs(value)))

    nan_count = sum(segment.nan_count for segment in segments)
    if nan_count:
        warnings.warn(
            f"integrand returned NaN at {nan_count} samples; they were taken as 0",
            NaNIntegrandWarning,
        )
    if not converged:
        warnings.warn(
            f"adaptive quadrature stopped after {evaluations} evaluations with error estimate "
            f"{err_est:.3g} on value {value:.17g}",
            NonConvergenceWarning,
        )
    return QuadResult(value, err_est, evaluations, converged)


def _check_tails(segments, final, cutoff, tolerance):
    """
    Raise ``DivergentIntegral`` if the outermost unit of a tail map still carries mass that grows
    with ``t``; issue a warning if it decays too slowly for the remainder beyond the cutoff,
    extrapolated geometrically from the last two units, to stay below the tolerance.
    """
    for index, segment in enumerate(segments):
        if segment.substitution is None:
            continue
        outer = abs(math.fsum(p[3] for p in final if p[0] == index and p[1] >= cutoff - 1))
        inner = abs(
            math.fsum(p[3] for p in final if p[0] == index and cutoff - 2 <= p[1] < cutoff - 1)
        )
        if outer <= tolerance:
            continue
        if outer > 0.5 * inner:
            side = "+inf" if segment.substitution.direction > 0 else "-inf"
            raise DivergentIntegral(f"integrand does not decay towards {side}")
        if outer * outer / inner <= tolerance:
            continue
        warnings.warn(
            "integrand decays slowly towards infinity; truncated tail mass exceeds the tolerance",
            NonConvergenceWarning,
        )
