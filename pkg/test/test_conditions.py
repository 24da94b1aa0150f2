import json
import math
import pytest

from pylaplace.conditions import (
    check_amplitude,
    check_conditions,
    check_flank_dominance,
    check_integrability,
)
from pylaplace.quadrature import ProblemSpec


def test_stirling_conditions(stirling):
    report = check_conditions(stirling)
    assert [report.status(name) for name in ("c1", "c3", "c4", "c5")] == [
        "warn",
        "pass",
        "pass",
        "pass",
    ]
    # int_0^inf 1 dx diverges, every n >= 1 is fine
    assert report.c1.worst_witness == 0.0
    assert report.positive_n_integrable
    assert not report.all_passed


def test_perturbed_quartic_passes_everything(perturbed_quartic):
    report = check_conditions(perturbed_quartic)
    assert report.all_passed
    assert report.c3.worst_witness is None


def test_wiggle_violates_flank_dominance(wiggle):
    cp = wiggle.critical_point()
    flanks = check_flank_dominance(wiggle.h, cp.xi0, wiggle.a, wiggle.b)
    assert not flanks.passed
    assert not flanks.left.passed and not flanks.right.passed
    # the hump next to the maximum
    assert flanks.worst_witness == pytest.approx(-0.554, abs=0.03)

    report = check_conditions(wiggle, cp)
    assert report.status("c3") == "fail"
    assert report.status("c4") == "fail"
    assert report.status("c5") == "pass"


def test_unimodal_flanks_pass(gaussian, quartic):
    for problem in (gaussian, quartic):
        cp = problem.critical_point()
        assert check_flank_dominance(problem.h, cp.xi0, problem.a, problem.b).passed


def test_flank_samples_minimum(gaussian):
    with pytest.raises(ValueError):
        check_flank_dominance(gaussian.h, 0.0, gaussian.a, gaussian.b, samples=16)


def test_amplitude_checks():
    assert check_amplitude("1 + x", 0.0).passed
    step = check_amplitude("1 + (x-1)/sqrt((x-1)^2 + 1e-30)", 1.0)
    assert not step.passed
    assert step.value == pytest.approx(1.0)
    zero = check_amplitude("x", 0.0)
    assert not zero.passed and zero.value == 0.0
    assert not check_amplitude("log(x)", 0.0).passed


def test_step_amplitude_report():
    problem = ProblemSpec("1 + (x-1)/sqrt((x-1)^2 + 1e-30)", "-(x-1)^2", 0.0, 2.0)
    report = check_conditions(problem)
    assert report.status("c5") == "fail"
    assert report.c5.worst_witness == pytest.approx(1.0, abs=1e-12)


def test_integrability_probes(gaussian):
    check = check_integrability(ProblemSpec("exp(-x^2)", "-x^2", -math.inf, math.inf))
    assert check.passed and check.failing == ()

    check = check_integrability(gaussian, n_probe=[0, 3])
    assert not check.passed
    assert check.positive_n_passed
    assert check.failing == (0,)

    growing = ProblemSpec("exp(x^2)", "-x^2/2", -math.inf, math.inf)
    check = check_integrability(growing, n_probe=[0, 1, 3])
    assert check.failing == (0, 1)
    assert not check.positive_n_passed

    with pytest.raises(ValueError):
        check_integrability(gaussian, n_probe=[1, 2])


def test_report_json(stirling):
    data = json.loads(check_conditions(stirling).to_json())
    assert data["c1"]["status"] == "warn"
    assert data["c3"]["passed"] is True
    assert set(data) == {"c1", "c3", "c4", "c5", "positive_n_integrable"}
    with pytest.raises(ValueError):
        check_conditions(stirling).status("c2")


@pytest.mark.parametrize("phi", ["1 + 100*x", "exp(20*x)", "1 - 1e4*x^2", "cos(50*x)"])
def test_steep_smooth_amplitudes_pass(phi):
    check = check_amplitude(phi, 0.0)
    assert check.passed
    assert check.value == pytest.approx(1.0, rel=1e-12)


def test_steep_amplitude_report():
    report = check_conditions(ProblemSpec("1 + 100*x", "-x^2", -math.inf, math.inf))
    assert report.status("c5") == "pass"


def test_flank_grid_lower_end(gaussian, wiggle):
    assert check_flank_dominance(gaussian.h, 0.0, gaussian.a, gaussian.b, eps=1e-9).passed
    cp = wiggle.critical_point()
    flanks = check_flank_dominance(wiggle.h, cp.xi0, wiggle.a, wiggle.b, eps=1e-8)
    assert not flanks.passed
    assert flanks.worst_witness == pytest.approx(-0.554, abs=0.03)
    for eps in (0.0, -1e-3):
        with pytest.raises(ValueError):
            check_flank_dominance(gaussian.h, 0.0, gaussian.a, gaussian.b, eps=eps)
