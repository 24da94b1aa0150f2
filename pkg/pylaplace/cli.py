"""
Command line front end: ``pylaplace <command> [options]``.

Commands
--------
    approx         Locate the maximizer and print the leading asymptotic estimate.
    verify         Compare quadrature with the estimate along an n-list.
    prooftrace     Window-splitting diagnostics at one n, or along an n-list.
    check          Sample-based hypothesis checks.
    demo-stirling  n! e^n n^(-n-1/2) against sqrt(2 pi).

Exit codes: 0 on success, 1 on input or computation errors, 2 when ``--strict`` is set and a
hypothesis check (or a proof trace estimate) does not pass.
"""

import argparse
from dataclasses import dataclass, field
import json
import math
import sys
from typing import List, Optional
import warnings
import numpy as np

from pylaplace.asymptotic import laplace_estimate, stirling_table
from pylaplace.conditions import check_conditions
from pylaplace.errors import HypothesisWarning, UnrepresentableValue
from pylaplace.proofmirror import convergence_ladder, proof_trace
from pylaplace.quadrature.scaled import ProblemSpec, ratio_table

_VALUE_FLAGS = ("--phi", "--h", "--a", "--b", "--n", "--n-list", "--rel-tol", "--abs-tol")
_DEMO_N_LIST = [10, 100, 1000, 10000]


@dataclass
class CliConfig:
    """
    Parsed command line.

    Attributes
    ----------
        subcommand : str
        phi, h : str
            Expression texts.
        a, b : float
            Bounds, ``inf``/``-inf`` allowed.
        n : int or None
        n_list : list of int or None
        json : bool
        strict : bool
        rel_tol, abs_tol : float or None
            Quadrature tolerances, packaged defaults when None.
        max_order : int
    """

    subcommand: str
    phi: str = "1"
    h: str = ""
    a: float = -math.inf
    b: float = math.inf
    n: Optional[int] = None
    n_list: Optional[List[int]] = field(default=None)
    json: bool = False
    strict: bool = False
    rel_tol: Optional[float] = None
    abs_tol: Optional[float] = None
    max_order: int = 8

    def __post_init__(self):
        if self.n is not None and self.n < 1:
            raise ValueError(f"--n must be >= 1, got {self.n}")
        if self.n_list is not None and any(n < 1 for n in self.n_list):
            raise ValueError("--n-list values must be >= 1")
        if not self.a < self.b:
            raise ValueError(f"--a must be smaller than --b, got [{self.a}, {self.b}]")

    @property
    def ns(self):
        """
        The requested ``n`` values, ``--n-list`` first.

        :rtype: list of int
        """
        if self.n_list is not None:
            return self.n_list
        if self.n is not None:
            return [self.n]
        raise ValueError(f"{self.subcommand} requires --n or --n-list")

    def problem(self):
        """
        :rtype: ProblemSpec
        """
        if not self.h:
            raise ValueError(f"{self.subcommand} requires --h")
        return ProblemSpec(
            self.phi,
            self.h,
            self.a,
            self.b,
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            max_order=self.max_order,
        )


def extended_real(text):
    """
    Parse a bound: ``inf``, ``+inf``, ``-inf`` or a finite decimal number.

    :rtype: float
    """
    literal = text.strip().lower()
    if literal in ("inf", "+inf"):
        return math.inf
    if literal == "-inf":
        return -math.inf
    try:
        value = float(literal)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number or inf/-inf: {text!r}")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"use inf or -inf for infinite bounds, got {text!r}")
    return value


def positive_int_list(text):
    try:
        values = [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("the n-list is empty")
    return values


def even_order(text):
    value = int(text)
    if value < 2 or value % 2:
        raise argparse.ArgumentTypeError(f"--max-order must be an even integer >= 2, got {text}")
    return value


class _Parser(argparse.ArgumentParser):
    """Argument parser reporting usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"error: {self.prog}: {message}\n")


def build_parser():
    """
    :rtype: argparse.ArgumentParser
    """
    parser = _Parser(
        prog="pylaplace",
        description="Laplace-type integrals: asymptotic estimates, quadrature and diagnostics.",
    )
    commands = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--phi", default="1", help="Amplitude phi(x) (default: 1).")
    common.add_argument("--h", default="", help="Exponent h(x).")
    common.add_argument("--a", type=extended_real, default=-math.inf, help="Left bound.")
    common.add_argument("--b", type=extended_real, default=math.inf, help="Right bound.")
    counts = common.add_mutually_exclusive_group()
    counts.add_argument("--n", type=int, help="Large parameter n.")
    counts.add_argument("--n-list", type=positive_int_list, dest="n_list", help="e.g. 10,100")
    common.add_argument("--json", action="store_true", help="Emit JSON instead of text.")
    common.add_argument(
        "--strict", action="store_true", help="Exit with 2 when a hypothesis check fails."
    )
    common.add_argument("--rel-tol", type=float, dest="rel_tol", help="Quadrature rel. tol.")
    common.add_argument("--abs-tol", type=float, dest="abs_tol", help="Quadrature abs. tol.")
    common.add_argument(
        "--max-order", type=even_order, default=8, dest="max_order", help="Degeneracy search."
    )

    commands.add_parser("approx", parents=[common], help="Leading asymptotic estimate.")
    commands.add_parser("verify", parents=[common], help="Quadrature against estimate.")
    commands.add_parser("prooftrace", parents=[common], help="Window-splitting diagnostics.")
    commands.add_parser("check", parents=[common], help="Hypothesis checks.")
    commands.add_parser("demo-stirling", parents=[common], help="Stirling's formula.")
    return parser


def _attach_values(argv):
    """Glue ``--flag -value`` into ``--flag=-value`` so negative literals are not read as flags."""
    glued = []
    index = 0
    while index < len(argv):
        token = argv[index]
        if token in _VALUE_FLAGS and index + 1 < len(argv) and argv[index + 1].startswith("-"):
            glued.append(f"{token}={argv[index + 1]}")
            index += 2
            continue
        glued.append(token)
        index += 1
    return glued


# == JSON output


def _encode(value):
    if isinstance(value, dict):
        items = sorted((str(key), _encode(item)) for key, item in value.items())
        return "{" + ", ".join(f"{json.dumps(key)}: {item}" for key, item in items) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_encode(item) for item in value) + "]"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return '"nan"'
        if math.isinf(value):
            return '"inf"' if value > 0 else '"-inf"'
        return format(value, ".17g")
    return json.dumps(str(value))


def format_json(value):
    """
    Serialize with sorted keys and 17 significant digits; non-finite numbers become the strings
    ``"inf"``, ``"-inf"`` and ``"nan"``.

    :rtype: str
    """
    return _encode(value)


def _records(table):
    return table.to_dict(orient="records")


# == Commands


def _report_conditions(ps, cp):
    """Run the hypothesis checks and warn about every condition that does not pass."""
    report = check_conditions(ps, cp)
    for name in ("c1", "c3", "c4", "c5"):
        status = report.status(name)
        if status != "pass":
            detail = getattr(report, name).detail
            warnings.warn(f"{name} {status}: {detail}", HypothesisWarning)
    return report


def cmd_approx(config):
    """
    Locate the maximizer and print the leading asymptotic estimate.

    :type config: CliConfig
    :return: Exit code.
    :rtype: int
    """
    ps = config.problem()
    n = config.ns[0]
    cp = ps.critical_point()
    estimate = laplace_estimate(ps.phi, cp, n).value
    try:
        plain = estimate.to_float()
    except UnrepresentableValue:
        plain = None
    report = _report_conditions(ps, cp)
    result = dict(cp.to_dict(), n=n, sign=estimate.sign, log_estimate=estimate.log_mag)
    result["estimate"] = plain
    if config.json:
        print(format_json(result))
    else:
        for key in ("n", "xi0", "m", "d2m", "h0", "log_estimate", "estimate"):
            value = result[key]
            text = "unrepresentable" if value is None else f"{value:.17g}"
            print(f"{key:>13} = {text}")
    return 2 if config.strict and not report.all_passed else 0


def cmd_verify(config):
    """
    Print the ratio table of quadrature against estimate, after the advisory hypothesis checks.

    :rtype: int
    """
    ps = config.problem()
    cp = ps.critical_point()
    table = ratio_table(ps, cp, config.ns)
    report = _report_conditions(ps, cp)
    if config.json:
        print(format_json(_records(table)))
    else:
        print(table.to_string(index=False, float_format=lambda v: f"{v:.10g}"))
    return 2 if config.strict and not report.all_passed else 0


def cmd_prooftrace(config):
    """
    Print the window-splitting diagnostics at ``--n``, or along ``--n-list``.

    :rtype: int
    """
    ps = config.problem()
    cp = ps.critical_point()
    if config.n_list is not None:
        table, verdicts = convergence_ladder(ps, cp, config.n_list)
        if config.json:
            print(format_json({"rows": _records(table), "verdicts": verdicts}))
        else:
            print(table.to_string(index=False))
            for name, verdict in verdicts.items():
                print(f"{name}: {'pass' if verdict else 'fail'}")
        passed = all(verdicts.values())
    else:
        trace = proof_trace(ps, cp, config.ns[0])
        data = trace.to_dict()
        if config.json:
            print(format_json(data))
        else:
            flags = data.pop("flags")
            for key, value in data.items():
                print(f"{key:>21} = {value}")
            for name, verdict in flags.items():
                print(f"{name:>21} : {'pass' if verdict else 'fail'}")
        passed = trace.all_passed
    return 2 if config.strict and not passed else 0


def cmd_check(config):
    """
    Print per-condition pass/warn/fail.

    :rtype: int
    """
    ps = config.problem()
    cp = ps.critical_point()
    report = check_conditions(ps, cp)
    if config.json:
        print(format_json(report.to_dict()))
    else:
        for name in ("c1", "c3", "c4", "c5"):
            result = getattr(report, name)
            witness = result.worst_witness
            suffix = "" if witness is None else f" [witness {witness:.6g}]"
            print(f"{name}: {report.status(name)} ({result.detail}){suffix}")
    return 2 if config.strict and not report.all_passed else 0


def cmd_demo_stirling(config):
    """
    Print the Stirling table.

    :rtype: int
    """
    n_list = _DEMO_N_LIST
    if config.n_list is not None or config.n is not None:
        n_list = config.ns
    table = stirling_table(n_list)
    if config.json:
        print(format_json(_records(table)))
    else:
        print(f"sqrt(2 pi) = {math.sqrt(2 * math.pi):.10f}")
        print(table.to_string(index=False, float_format=lambda v: f"{v:.10g}"))
    return 0


_COMMANDS = {
    "approx": cmd_approx,
    "verify": cmd_verify,
    "prooftrace": cmd_prooftrace,
    "check": cmd_check,
    "demo-stirling": cmd_demo_stirling,
}


def main(argv=None):
    """
    Entry point of the ``pylaplace`` console script.

    :param argv: Arguments without the program name; ``sys.argv[1:]`` by default.
    :type argv: list of str, optional
    :return: Exit code.
    :rtype: int
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_values(argv))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            config = CliConfig(**vars(args))
            code = _COMMANDS[config.subcommand](config)
        except ValueError as error:
            print(f"error: {type(error).__name__}: {error}", file=sys.stderr)
            code = 1
    for warning in caught:
        print(f"warning: {warning.message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
