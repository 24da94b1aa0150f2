from dataclasses import asdict, dataclass
import json
import math
from typing import NamedTuple, Optional
import warnings
import numpy as np

from pylaplace._defaults import DEFAULTS
from pylaplace.errors import DivergentIntegral, DomainError, NonConvergenceWarning
from pylaplace.exprlang import as_expr
from pylaplace.quadrature.adaptive import adaptive_quad
from pylaplace.quadrature.scaled import quadrature_hints, scaled_integrand
from pylaplace.quadrature.substitutions import compactified_grid

_AMPLITUDE_STEPS = (1e-3, 1e-5, 1e-7)
# differences must shrink fourfold per ladder step unless at rounding level
_AMPLITUDE_SHRINK = 0.25
_AMPLITUDE_FLOOR = 1e3 * float(np.finfo(float).eps)


@dataclass(frozen=True)
class ConditionResult:
    """
    Verdict of one sample-based hypothesis check.

    Attributes
    ----------
        passed : bool
        detail : str
            Human readable reason, always set for failures.
        worst_witness : float or None
            Sample point (or probe ``n``) that violates the condition most.
    """

    passed: bool
    detail: str
    worst_witness: Optional[float] = None


class FlankDominance(NamedTuple):
    passed: bool
    worst_witness: Optional[float]
    left: ConditionResult
    right: ConditionResult


def _finite_values(h, x):
    values = np.asarray(h.evaluate(x, strict=False), dtype=float)
    return np.where(np.isnan(values), -np.inf, values)


def _flank(h, xi0, end, samples, rho_grid, r, eps):
    """
    Check ``min h on [xi0 - rho, xi0] >= max h on [end, xi0 - rho]`` (mirrored when ``end > xi0``)
    over a geometric grid of ``rho``.
    """
    side = "left" if end < xi0 else "right"
    direction = -1.0 if end < xi0 else 1.0
    span = abs(end - xi0)
    if math.isinf(span):
        outer = compactified_grid(min(end, xi0), max(end, xi0), samples)
        span = abs((outer[0] if side == "left" else outer[-1]) - xi0)
    rho_max = min(r, 0.5 * span)
    rho_min = DEFAULTS.get("Conditions", "rhoMin") * rho_max if eps is None else eps
    rhos = np.geomspace(min(rho_min, rho_max), rho_max, rho_grid)

    worst_excess, witness = 0.0, None
    for rho in rhos:
        cut = xi0 + direction * rho
        inner = _finite_values(h, np.linspace(cut, xi0, samples))
        if side == "left":
            y = compactified_grid(end, cut, samples)
        else:
            y = compactified_grid(cut, end, samples)
        outer = _finite_values(h, y)
        floor = inner.min()
        excess = outer.max() - floor
        if excess > 1e-12 * max(1.0, abs(floor)) and excess > worst_excess:
            worst_excess, witness = float(excess), float(y[np.argmax(outer)])

    if witness is None:
        return ConditionResult(True, f"h decreases away from xi0 on the {side} flank")
    return ConditionResult(
        False,
        f"h({witness:.17g}) exceeds the inner minimum of the {side} flank by {worst_excess:.6g}",
        witness,
    )


def check_flank_dominance(h, xi0, a, b, samples=None, r=None, eps=None):
    """
    Check that ``h`` never rises again away from its maximizer: for every ``rho`` of a geometric
    grid, the minimum of ``h`` on ``[xi0 - rho, xi0]`` is at least the maximum of ``h`` on
    ``[a, xi0 - rho]``, and the same on the right flank.

    :param h: Exponent function.
    :type h: Expr or str
    :param xi0: Maximizer.
    :type xi0: float
    :param a: Left bound (``-inf`` allowed).
    :type a: float
    :param b: Right bound (``inf`` allowed).
    :type b: float
    :param samples: Samples per segment, ``>= 64``. Defaults to ``Conditions.samples``.
    :type samples: int, optional
    :param r: Largest ``rho`` considered; defaults to the distance to the nearer endpoint. It is
        further capped at half the flank length.
    :type r: float, optional
    :param eps: Smallest ``rho`` of the grid. Defaults to ``Conditions.rhoMin`` times the largest
        ``rho`` of each flank.
    :type eps: float, optional
    :return: Overall verdict, the worst witness and the verdict per flank.
    :rtype: FlankDominance
    """
    h = as_expr(h)
    samples = DEFAULTS.get("Conditions", "samples") if samples is None else samples
    if samples < 64:
        raise ValueError("At least 64 samples are required")
    rho_grid = DEFAULTS.get("Conditions", "rhoGrid")
    if r is None:
        r = min(xi0 - a, b - xi0)
    if eps is not None and not eps > 0:
        raise ValueError(f"Smallest radius must be positive, got {eps}")
    left = _flank(h, xi0, a, samples, rho_grid, r, eps)
    right = _flank(h, xi0, b, samples, rho_grid, r, eps)
    witness = left.worst_witness if left.worst_witness is not None else right.worst_witness
    return FlankDominance(left.passed and right.passed, witness, left, right)


class IntegrabilityCheck(NamedTuple):
    passed: bool
    positive_n_passed: bool
    detail: str
    failing: tuple


def check_integrability(ps, n_probe=None, cp=None):
    """
    Check absolute integrability of ``phi(x) exp(n (h(x) - h(xi0)))`` for each probed ``n``.

    The literal verdict includes ``n = 0``; ``positive_n_passed`` only looks at ``n >= 1``.

    :param ps: Problem.
    :type ps: ProblemSpec
    :param n_probe: Probed values of ``n``, which must include 0. Defaults to
        ``Conditions.probes``.
    :type n_probe: iterable of int, optional
    :param cp: Classified maximizer; located from ``ps`` when omitted.
    :type cp: CriticalPoint, optional
    :rtype: IntegrabilityCheck
    """
    n_probe = DEFAULTS.get("Conditions", "probes") if n_probe is None else n_probe
    n_probe = sorted(int(n) for n in n_probe)
    if 0 not in n_probe:
        raise ValueError("Integrability probes must include n = 0")
    cp = ps.critical_point() if cp is None else cp

    failing = []
    for n in n_probe:
        integrand = scaled_integrand(ps, cp, n)
        breakpoints, scale = quadrature_hints(cp, n)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NonConvergenceWarning)
                result = adaptive_quad(
                    lambda x: np.abs(integrand(x)),
                    ps.a,
                    ps.b,
                    rel_tol=ps.option("rel_tol"),
                    abs_tol=ps.option("abs_tol"),
                    breakpoints=breakpoints,
                    scale=scale,
                )
            if not result.converged:
                failing.append(n)
        except DivergentIntegral:
            failing.append(n)

    positive_failing = [n for n in failing if n >= 1]
    if not failing:
        detail = f"integrable for every probed n in {n_probe}"
    elif not positive_failing:
        detail = (
            f"not integrable for n = 0; integrable for every probed n >= 1 in "
            f"{[n for n in n_probe if n >= 1]}"
        )
    else:
        detail = f"not integrable for n in {failing}"
    return IntegrabilityCheck(not failing, not positive_failing, detail, tuple(failing))


class AmplitudeCheck(NamedTuple):
    passed: bool
    value: float
    detail: str


def check_amplitude(phi, xi0):
    """
    Check that ``phi`` is non-zero and continuous at the maximizer, using the values at
    ``xi0 +- delta`` for ``delta`` in 1e-3, 1e-5, 1e-7.

    The differences ``|phi(xi0 +- delta) - phi(xi0)|`` must shrink along the ladder (at least
    fourfold per step) or already be at rounding level, so steep but smooth amplitudes pass and
    jumps fail whatever their size.

    :param phi: Amplitude function.
    :type phi: Expr or str
    :param xi0: Maximizer.
    :type xi0: float
    :rtype: AmplitudeCheck
    """
    phi = as_expr(phi)
    try:
        value = phi.evaluate(xi0)
        steps = [
            max(abs(phi.evaluate(xi0 - delta) - value), abs(phi.evaluate(xi0 + delta) - value))
            for delta in _AMPLITUDE_STEPS
        ]
    except DomainError as error:
        return AmplitudeCheck(False, math.nan, str(error))

    if not math.isfinite(value):
        return AmplitudeCheck(False, value, f"phi({xi0:.17g}) is not finite")
    if value == 0:
        return AmplitudeCheck(False, value, f"phi vanishes at xi0 = {xi0:.17g}")
    floor = _AMPLITUDE_FLOOR * max(1.0, abs(value))
    shrink = [
        later <= floor or later <= _AMPLITUDE_SHRINK * earlier
        for earlier, later in zip(steps[:-1], steps[1:])
    ]
    if not all(shrink):
        return AmplitudeCheck(
            False,
            value,
            f"phi(xi0 +- delta) does not approach phi(xi0) = {value:.17g}: "
            f"differences {', '.join(f'{s:.3g}' for s in steps)}",
        )
    return AmplitudeCheck(True, value, f"phi(xi0) = {value:.17g}, continuous at xi0")


@dataclass(frozen=True)
class ConditionReport:
    """
    Hypothesis checks of one problem.

    Attributes
    ----------
        c1 : ConditionResult
            Absolute integrability for the probed ``n`` (``n = 0`` included).
        c3, c4 : ConditionResult
            Left and right flank dominance.
        c5 : ConditionResult
            Non-zero amplitude, continuous at the maximizer.
        positive_n_integrable : bool
            Integrability for every probed ``n >= 1``.
    """

    c1: ConditionResult
    c3: ConditionResult
    c4: ConditionResult
    c5: ConditionResult
    positive_n_integrable: bool

    def status(self, name):
        """
        ``"pass"``, ``"warn"`` or ``"fail"`` for one condition. ``c1`` is a warning when only the
        ``n = 0`` probe fails.

        :param name: One of ``c1``, ``c3``, ``c4`` and ``c5``.
        :type name: str
        :rtype: str
        """
        if name not in ("c1", "c3", "c4", "c5"):
            raise ValueError(f"Unknown condition: {name}")
        result = getattr(self, name)
        if result.passed:
            return "pass"
        if name == "c1" and self.positive_n_integrable:
            return "warn"
        return "fail"

    @property
    def all_passed(self):
        return all(self.status(name) == "pass" for name in ("c1", "c3", "c4", "c5"))

    def to_dict(self):
        data = asdict(self)
        for name in ("c1", "c3", "c4", "c5"):
            data[name]["status"] = self.status(name)
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def check_conditions(ps, cp=None, n_probe=None):
    """
    Run every sample-based hypothesis check on a problem.

    :param ps: Problem.
    :type ps: ProblemSpec
    :param cp: Classified maximizer; located from ``ps`` when omitted.
    :type cp: CriticalPoint, optional
    :param n_probe: Integrability probes, see :func:`check_integrability`.
    :type n_probe: iterable of int, optional
    :rtype: ConditionReport
    """
    cp = ps.critical_point() if cp is None else cp
    integrability = check_integrability(ps, n_probe=n_probe, cp=cp)
    flanks = check_flank_dominance(ps.h, cp.xi0, ps.a, ps.b)
    amplitude = check_amplitude(ps.phi, cp.xi0)
    first_failing = float(integrability.failing[0]) if integrability.failing else None
    return ConditionReport(
        c1=ConditionResult(integrability.passed, integrability.detail, first_failing),
        c3=flanks.left,
        c4=flanks.right,
        c5=ConditionResult(
            amplitude.passed, amplitude.detail, None if amplitude.passed else cp.xi0
        ),
        positive_n_integrable=integrability.positive_n_passed,
    )
