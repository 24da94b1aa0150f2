"""
Finite-n instantiation of the window-splitting argument behind Laplace's method.

For a classified maximizer with degeneracy ``m`` the integral is cut at ``xi0 +- eps`` with
``eps = n^(-1/(6 m^2))``. Every estimate used by the argument (the derivative bracket on the
window, the decay of the tails, the closeness of ``p = h - h(xi0)`` to its leading Taylor term
``q``, the truncation of the rescaled Gaussian-type integral) is evaluated numerically and recorded
with a pass/fail flag in :class:`WindowDiagnostics`.
"""

from dataclasses import asdict, dataclass, field
import json
import math
from typing import NamedTuple
import numpy as np
from pandas import DataFrame

from pylaplace._defaults import DEFAULTS
from pylaplace.asymptotic import gauss_power_integral, log_factorial
from pylaplace.errors import DivergentIntegral, WindowExceedsInterval
from pylaplace.exprlang import jet_eval
from pylaplace.quadrature.adaptive import adaptive_quad
from pylaplace.quadrature.scaled import quadrature_hints, scaled_quad
from pylaplace.quadrature.substitutions import compactified_grid

# Rounding allowance of the sampled comparisons, relative to the compared magnitudes
_ROUNDING = 64 * float(np.finfo(float).eps)


def window_epsilon(n, m):
    """
    Half-width ``n^(-1/(6 m^2))`` of the central window.

    :param n: Large parameter, ``>= 1``.
    :type n: int
    :param m: Degeneracy index, ``>= 1``.
    :type m: int
    :rtype: float
    """
    if n < 1 or m < 1:
        raise ValueError(f"window_epsilon requires n >= 1 and m >= 1, got n={n}, m={m}")
    return float(n) ** (-1.0 / (6 * m * m))


def window_radius(cp, n):
    """
    Rescaled window radius ``R = eps (n (-d2m) / (2m)!)^(1/(2m))``.

    :param cp: Classified maximizer.
    :type cp: CriticalPoint
    :param n: Large parameter, ``>= 1``.
    :type n: int
    :rtype: float
    """
    order = cp.order
    log_scale = (math.log(n) + math.log(-cp.d2m) - log_factorial(order)) / order
    return window_epsilon(n, cp.m) * math.exp(log_scale)


def tail_constant(cp):
    """
    ``C = sup_{u >= 0} u exp(d2m u / (2 (2m)!)) = 2 (2m)! / (-d2m e)``.

    :rtype: float
    """
    return 2.0 * math.exp(log_factorial(cp.order)) / (-cp.d2m * math.e)


def _window(ps, cp, n):
    eps = window_epsilon(n, cp.m)
    lo, hi = cp.xi0 - eps, cp.xi0 + eps
    if ps.a < lo and hi < ps.b:
        return eps, lo, hi
    distance = min(cp.xi0 - ps.a, ps.b - cp.xi0)
    try:
        min_n = math.floor(distance ** (-6.0 * cp.m * cp.m)) + 1
    except OverflowError:
        min_n = math.inf
    raise WindowExceedsInterval(eps, n, min_n)


class SplitIntegral(NamedTuple):
    """Scaled pieces of the integral, each multiplied by ``n^(1/(2m))``."""

    left_tail: float
    center: float
    right_tail: float
    epsilon: float
    err_est: float


def split_integral(ps, cp, n):
    """
    Integrate the scaled integrand separately over the left tail, the window and the right tail.

    :param ps: Problem.
    :type ps: ProblemSpec
    :param cp: Its classified maximizer.
    :type cp: CriticalPoint
    :param n: Large parameter, ``>= 1``.
    :type n: int
    :return: The three pieces, the half-width and the summed error estimate, all scaled by
        ``n^(1/(2m))``.
    :rtype: SplitIntegral
    :raises WindowExceedsInterval: If ``[xi0 - eps, xi0 + eps]`` is not inside (a, b); the error
        carries the smallest ``n`` for which it is.
    """
    eps, lo, hi = _window(ps, cp, n)
    factor = float(n) ** (1.0 / cp.order)
    pieces = [
        scaled_quad(ps, cp, n, a=ps.a, b=lo),
        scaled_quad(ps, cp, n, a=lo, b=hi),
        scaled_quad(ps, cp, n, a=hi, b=ps.b),
    ]
    return SplitIntegral(
        factor * pieces[0].value,
        factor * pieces[1].value,
        factor * pieces[2].value,
        eps,
        factor * sum(piece.err_est for piece in pieces),
    )


class BracketCheck(NamedTuple):
    passed: bool
    worst_ratio: float
    min_ratio: float
    max_ratio: float


def check_derivative_bracket(h, cp, eps, samples=None):
    """
    Check ``1/2 <= h^(2m)(x) / h^(2m)(xi0) <= 3/2`` on the window ``|x - xi0| <= eps``.

    :param h: Exponent function.
    :type h: Expr
    :param cp: Classified maximizer.
    :type cp: CriticalPoint
    :param eps: Window half-width.
    :type eps: float
    :param samples: Number of equally spaced samples. Defaults to ``ProofMirror.bracketSamples``.
    :type samples: int, optional
    :return: Verdict, the ratio farthest from 1 and the ratio range.
    :rtype: BracketCheck
    :raises DomainError: If the window leaves the domain of ``h``.
    """
    samples = DEFAULTS.get("ProofMirror", "bracketSamples") if samples is None else samples
    x = np.linspace(cp.xi0 - eps, cp.xi0 + eps, samples)
    ratio = jet_eval(h, x, cp.order).derivative(cp.order) / cp.d2m
    worst = float(ratio[np.argmax(np.abs(ratio - 1.0))])
    passed = bool(np.all((ratio >= 0.5) & (ratio <= 1.5)))
    return BracketCheck(passed, worst, float(ratio.min()), float(ratio.max()))


class TailBoundCheck(NamedTuple):
    passed: bool
    lhs: float
    rhs: float
    constant: float
    drop: float
    drop_bound: float
    drop_passed: bool


def _tail_samples(ps, lo, hi, samples):
    left = compactified_grid(ps.a, lo, samples)
    right = compactified_grid(hi, ps.b, samples)
    return np.concatenate((left, right))


def check_tail_bound(ps, cp, n, samples=None):
    """
    Check the decay of the scaled integrand outside the window:

    .. math::
        n^{1/2m} e^{n (h(x) - h(\\xi_0))} \\le C n^{5/(6m) - 1}

    with the closed-form constant of :func:`tail_constant` (the exponent is ``-1/6`` for ``m = 1``).
    Also checks the drop ``h(xi0) - h(x) >= -d2m eps^(2m) / (2 (2m)!)`` the decay follows from.

    :param ps: Problem.
    :type ps: ProblemSpec
    :param cp: Its classified maximizer.
    :type cp: CriticalPoint
    :param n: Large parameter, ``>= 1``.
    :type n: int
    :param samples: Samples per tail. Defaults to ``ProofMirror.tailSamples``.
    :type samples: int, optional
    :rtype: TailBoundCheck
    """
    samples = DEFAULTS.get("ProofMirror", "tailSamples") if samples is None else samples
    eps, lo, hi = _window(ps, cp, n)
    x = _tail_samples(ps, lo, hi, samples)
    with np.errstate(all="ignore"):
        drop = cp.h0 - np.asarray(ps.h.evaluate(x, strict=False), dtype=float)
    drop = np.where(np.isnan(drop), np.inf, drop)

    order = cp.order
    constant = tail_constant(cp)
    lhs = float(n) ** (1.0 / order) * float(np.exp(-n * drop.min()))
    rhs = constant * float(n) ** (5.0 / (6 * cp.m) - 1.0)
    drop_bound = -cp.d2m * eps**order / (2.0 * math.exp(log_factorial(order)))
    min_drop = float(drop.min())
    return TailBoundCheck(
        bool(lhs <= rhs),
        lhs,
        rhs,
        constant,
        min_drop,
        drop_bound,
        bool(min_drop >= drop_bound - _ROUNDING * max(1.0, abs(cp.h0))),
    )


class SurrogateGap(NamedTuple):
    sup_gap: float
    pq_max: float
    displayed_bound: float
    mean_value_bound: float
    pointwise_bound: float
    pointwise_ok: bool


def surrogate_gap(ps, cp, n, samples=None):
    """
    Compare ``exp(n p)`` with ``exp(n q)`` on the window, where ``p = h - h(xi0)`` and
    ``q(x) = d2m (x - xi0)^(2m) / (2m)!``.

    Two candidate bounds on ``sup |exp(n p) - exp(n q)|`` are reported: ``|p - q|_max / n``
    (``displayed_bound``) and the mean-value bound ``n |p - q|_max``, which holds because
    ``p, q <= 0`` on the window. The pointwise bound ``|p - q| <= |d2m| eps^(2m) / (2 (2m)!)`` is
    checked at every sample.

    :param ps: Problem.
    :type ps: ProblemSpec
    :param cp: Its classified maximizer.
    :type cp: CriticalPoint
    :param n: Large parameter, ``>= 1``.
    :type n: int
    :param samples: Window samples. Defaults to ``ProofMirror.gapSamples``.
    :type samples: int, optional
    :rtype: SurrogateGap
    """
    samples = DEFAULTS.get("ProofMirror", "gapSamples") if samples is None else samples
    eps, lo, hi = _window(ps, cp, n)
    x = np.linspace(lo, hi, samples)
    order = cp.order
    factorial = math.exp(log_factorial(order))
    p = ps.h.evaluate(x) - cp.h0
    q = cp.d2m * (x - cp.xi0) ** order / factorial
    with np.errstate(all="ignore"):
        gap = np.abs(np.exp(n * p) - np.exp(n * q))
    pq_max = float(np.max(np.abs(p - q)))
    pointwise_bound = abs(cp.d2m) * eps**order / (2.0 * factorial)
    slack = _ROUNDING * max(1.0, abs(cp.h0), float(np.max(np.abs(p))))
    return SurrogateGap(
        float(gap.max()),
        pq_max,
        pq_max / n,
        n * pq_max,
        pointwise_bound,
        bool(pq_max <= pointwise_bound + slack),
    )


def truncated_tail_deficit(R, m):
    """
    ``int_{|z| > R} exp(-z^(2m)) dz``: what the rescaled window misses of the full integral.

    :param R: Truncation radius, ``>= 0``.
    :type R: float
    :param m: Degeneracy index, ``>= 1``.
    :type m: int
    :rtype: float
    """
    if not R >= 0:
        raise ValueError(f"R must be >= 0, got {R}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    order = 2 * int(m)

    def integrand(z):
        return np.exp(-(z**order))

    if R == 0:
        return 2.0 * adaptive_quad(integrand, 0.0, math.inf).value
    # width of the decay beyond R
    scale = min(1.0, 1.0 / (order * R ** (order - 1)))
    return 2.0 * adaptive_quad(integrand, float(R), math.inf, scale=scale).value


def _tail_amplitude_mass(ps, lo, hi):
    """``int |phi|`` over both tails, ``inf`` when it diverges."""

    def integrand(x):
        return np.abs(ps.phi.evaluate(x, strict=False))

    total = 0.0
    for a, b in ((ps.a, lo), (hi, ps.b)):
        try:
            total += adaptive_quad(integrand, a, b).value
        except DivergentIntegral:
            return math.inf
    return total


@dataclass
class WindowDiagnostics:
    """
    Every quantity of the window-splitting argument at one ``n``.

    Integral pieces are scaled integrals multiplied by ``n^(1/(2m))``, so they converge to the
    finite ``target`` as ``n`` grows.

    Attributes
    ----------
        n, m : int
        epsilon : float
            Window half-width.
        left_tail, center, right_tail : float
            The three pieces of the split.
        surrogate_center : float
            Window piece with ``q`` in place of ``p``.
        r : float
            Rescaled window radius ``R``.
        sup_gap : float
            Sampled ``sup |exp(n p) - exp(n q)|`` on the window.
        tail_bound : float
            ``C n^(5/(6m) - 1) int_tails |phi|`` (``inf`` when ``phi`` is not integrable there).
        deficit : float
            ``int_{|z| > R} exp(-z^(2m)) dz``.
        flags : dict
            Per-estimate verdicts.
    """

    n: int
    m: int
    epsilon: float
    left_tail: float
    center: float
    right_tail: float
    surrogate_center: float
    r: float
    sup_gap: float
    tail_bound: float
    deficit: float
    scaled_total: float
    target: float
    relative_error: float
    frozen_center: float
    amplitude_gap: float
    mean_value_bound: float
    displayed_bound: float
    displayed_bound_holds: bool
    bracket_worst_ratio: float
    tail_lhs: float
    tail_rhs: float
    flags: dict = field(default_factory=dict)

    @property
    def all_passed(self):
        """
        Whether every flagged estimate holds.

        :rtype: bool
        """
        return all(self.flags.values())

    def to_dict(self):
        """
        Plain dictionary of every field plus ``all_passed``.

        :rtype: dict
        """
        data = asdict(self)
        data["all_passed"] = self.all_passed
        return data

    def to_json(self):
        """
        JSON object with sorted keys; non-finite numbers are written as ``"inf"``, ``"-inf"`` or
        ``"nan"``.

        :rtype: str
        """
        return json.dumps(_finite_json(self.to_dict()), sort_keys=True)


def _finite_json(value):
    if isinstance(value, dict):
        return {key: _finite_json(item) for key, item in value.items()}
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def proof_trace(ps, cp, n):
    """
    Run every check of the window-splitting argument at one ``n``.

    The final comparison is between ``n^(1/(2m))`` times the scaled integral and the limit
    ``phi(xi0) Gamma(1/(2m))/m ((2m)!/(-d2m))^(1/(2m))``.

    :param ps: Problem.
    :type ps: ProblemSpec
    :param cp: Its classified maximizer.
    :type cp: CriticalPoint
    :param n: Large parameter, ``>= 1``.
    :type n: int
    :rtype: WindowDiagnostics
    :raises WindowExceedsInterval: If the window does not fit inside (a, b).
    """
    order = cp.order
    split = split_integral(ps, cp, n)
    eps = split.epsilon
    lo, hi = cp.xi0 - eps, cp.xi0 + eps
    factor = float(n) ** (1.0 / order)
    factorial = math.exp(log_factorial(order))

    total = scaled_quad(ps, cp, n)
    scaled_total = factor * total.value
    phi0 = ps.phi.evaluate(cp.xi0)
    width_factor = (factorial / -cp.d2m) ** (1.0 / order)
    target = phi0 * gauss_power_integral(cp.m) * width_factor

    bracket = check_derivative_bracket(ps.h, cp, eps)
    tails = check_tail_bound(ps, cp, n)
    gap = surrogate_gap(ps, cp, n)
    radius = window_radius(cp, n)
    deficit = truncated_tail_deficit(radius, cp.m)

    # window piece with the surrogate exponent q
    def surrogate(x):
        with np.errstate(all="ignore"):
            q = cp.d2m * (x - cp.xi0) ** order / factorial
            return ps.phi.evaluate(x, strict=False) * np.exp(n * q)

    breakpoints, _ = quadrature_hints(cp, n)
    surrogate_center = factor * adaptive_quad(surrogate, lo, hi, breakpoints=breakpoints).value
    frozen_center = phi0 * width_factor * (gauss_power_integral(cp.m) - deficit)
    tail_bound = tails.rhs * _tail_amplitude_mass(ps, lo, hi)

    pieces = split.left_tail + split.center + split.right_tail
    rel_tol = ps.option("rel_tol")
    tolerance = 8.0 * (split.err_est + factor * total.err_est + rel_tol * abs(scaled_total))
    flags = {
        "derivative_bracket": bracket.passed,
        "tail_bound": tails.passed,
        "tail_drop": tails.drop_passed,
        "tail_integral_bound": abs(split.left_tail) + abs(split.right_tail) <= tail_bound,
        "surrogate_pointwise": gap.pointwise_ok,
        "surrogate_gap": gap.sup_gap <= gap.mean_value_bound * (1.0 + _ROUNDING) + _ROUNDING,
        "additivity": abs(pieces - scaled_total) <= tolerance,
    }
    flags = {name: bool(verdict) for name, verdict in flags.items()}
    return WindowDiagnostics(
        n=int(n),
        m=cp.m,
        epsilon=eps,
        left_tail=split.left_tail,
        center=split.center,
        right_tail=split.right_tail,
        surrogate_center=surrogate_center,
        r=radius,
        sup_gap=gap.sup_gap,
        tail_bound=tail_bound,
        deficit=deficit,
        scaled_total=scaled_total,
        target=target,
        relative_error=abs(scaled_total / target - 1.0),
        frozen_center=frozen_center,
        amplitude_gap=abs(surrogate_center - frozen_center),
        mean_value_bound=gap.mean_value_bound,
        displayed_bound=gap.displayed_bound,
        displayed_bound_holds=bool(gap.sup_gap <= gap.displayed_bound),
        bracket_worst_ratio=bracket.worst_ratio,
        tail_lhs=tails.lhs,
        tail_rhs=tails.rhs,
        flags=flags,
    )


def shrinks_along_ladder(values, ns, exponent, slack):
    """
    Whether ``values`` vanish along the ``n`` ladder at least as fast as ``n^(-exponent)``, up to
    a constant ``slack`` per step.

    Entries that already underflowed to 0 count as shrinking.

    :param values: Non-negative quantities, one per rung.
    :type values: sequence of float
    :param ns: Increasing ``n`` values.
    :type ns: sequence of int
    :param exponent: Predicted decay exponent.
    :type exponent: float
    :param slack: Allowed factor per step.
    :type slack: float
    :rtype: bool
    """
    for (v0, n0), (v1, n1) in zip(zip(values, ns), zip(values[1:], ns[1:])):
        if v1 == 0:
            continue
        if v1 > v0:
            return False
        if v1 > slack * v0 * (n1 / n0) ** (-exponent):
            return False
    return True


def convergence_ladder(ps, cp, n_list, slack=None):
    """
    :func:`proof_trace` along an increasing ladder of ``n`` values, with the verdicts that give
    "infinitely close" its finite meaning: the quantity shrinks at the predicted rate.

    :param ps: Problem.
    :type ps: ProblemSpec
    :param cp: Its classified maximizer.
    :type cp: CriticalPoint
    :param n_list: Strictly increasing ``n`` values.
    :type n_list: list of int
    :param slack: Allowed factor per step. Defaults to ``ProofMirror.ladderSlack``.
    :type slack: float, optional
    :return: One row of diagnostics per rung, and the verdicts ``tails_shrink``,
        ``deficit_shrinks`` (at least tenfold per decade of ``n``) and ``sup_gap_shrinks``.
    :rtype: tuple of (pandas.DataFrame, dict)
    """
    slack = DEFAULTS.get("ProofMirror", "ladderSlack") if slack is None else slack
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise ValueError("n_list must not be empty")
    if any(lo >= hi for lo, hi in zip(n_list[:-1], n_list[1:])):
        raise ValueError("n_list must be strictly increasing")

    traces = [proof_trace(ps, cp, n) for n in n_list]
    table = DataFrame([trace.to_dict() for trace in traces]).drop(columns=["flags"])
    tails = [max(abs(t.left_tail), abs(t.right_tail)) for t in traces]
    deficits = [t.deficit for t in traces]
    verdicts = {
        "tails_shrink": shrinks_along_ladder(tails, n_list, 1.0 - 5.0 / (6 * cp.m), slack),
        "deficit_shrinks": shrinks_along_ladder(deficits, n_list, 1.0, 1.0),
        "sup_gap_shrinks": shrinks_along_ladder([t.sup_gap for t in traces], n_list, 0.0, slack),
    }
    return table, verdicts
