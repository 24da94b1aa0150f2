import math
import pytest

from pylaplace.quadrature import ProblemSpec


@pytest.fixture
def stirling():
    """int_0^inf x^n e^(-n x) dx = n! / n^(n+1)"""
    return ProblemSpec("1", "log(x) - x", 0.0, math.inf)


@pytest.fixture
def gaussian():
    return ProblemSpec("1", "-x^2", -math.inf, math.inf)


@pytest.fixture
def quartic():
    return ProblemSpec("1", "-x^4", -math.inf, math.inf)


@pytest.fixture
def perturbed_quartic():
    return ProblemSpec("1", "-x^4 + x^6/2", -0.5, 0.5)


@pytest.fixture
def wiggle():
    """Global maximum near 0.1848, a lower hump near -0.554 on the left flank."""
    return ProblemSpec("1", "-x^2 + 0.5*sin(8*x)", -5.0, 5.0)
