import math
import numpy as np
import pytest

from pylaplace.errors import DomainError, ExpressionSyntaxError, UnknownIdentifier
from pylaplace.exprlang import Binary, Num, Unary, Var, derivative, jet_eval, parse, render


@pytest.mark.parametrize(
    "text, x, expected",
    [
        ("-x^2", 3.0, -9.0),
        ("2^3^2", 0.0, 512.0),
        ("x - 1 - 1", 5.0, 3.0),
        ("8 / 2 / 2", 0.0, 2.0),
        ("2*-x", 3.0, -6.0),
        ("-(x+1)*2", 1.0, -4.0),
        ("pi", 0.0, math.pi),
        ("e^x", 1.0, math.e),
        ("log(x) - x", 1.0, -1.0),
        ("sqrt(x)*cos(0) + sin(0)", 16.0, 4.0),
        ("1.5e1 + .5", 0.0, 15.5),
    ],
)
def test_precedence_and_values(text, x, expected):
    assert parse(text).evaluate(x) == pytest.approx(expected, rel=1e-15)


def test_tree_shape():
    assert parse("-x^2") == Unary("negate", Binary("pow", Var(), Num(2.0)))
    assert parse("(x)") == Var()


def test_render_reparses_to_equivalent_tree():
    x = np.linspace(0.1, 3.0, 17)
    for text in ["log(x)-x+sin(2*x)^2/3", "-x^4 + x^6/2", "exp(-1/x) - (-2.5)*x", "x^x"]:
        tree = parse(text)
        again = parse(render(tree))
        np.testing.assert_allclose(again.evaluate(x), tree.evaluate(x), rtol=1e-15)


def test_render_of_negative_and_infinite_literals():
    assert Num(-1.5).render() == "(-1.5)"
    assert parse(Num(math.inf).render()).evaluate(0.0) == math.inf


def test_vectorised_evaluation_keeps_shape():
    values = parse("x^2").evaluate(np.arange(6.0).reshape(2, 3))
    assert values.shape == (2, 3)
    assert values[1, 2] == 25.0


def test_syntax_errors_carry_offset_and_expectation():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse("x +")
    assert info.value.offset == 3

    with pytest.raises(ExpressionSyntaxError) as info:
        parse("(x")
    assert info.value.offset == 2
    assert info.value.expected == "')'"

    with pytest.raises(ExpressionSyntaxError) as info:
        parse("x $ 1")
    assert info.value.offset == 2

    with pytest.raises(ExpressionSyntaxError):
        parse("")


def test_offsets_are_bytes():
    # a no-break space is whitespace taking two bytes
    with pytest.raises(ExpressionSyntaxError) as info:
        parse("\u00a0x $")
    assert info.value.offset == 4
    with pytest.raises(ExpressionSyntaxError) as info:
        parse("x + é")
    assert info.value.offset == 4


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier) as info:
        parse("2 + foo(x)")
    assert info.value.name == "foo"
    assert info.value.offset == 4


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        parse("x +")
    with pytest.raises(TypeError):
        parse(3.0)


@pytest.mark.parametrize("text, x", [("log(x)", 0.0), ("sqrt(x)", -1.0), ("x^0.5", -4.0)])
def test_domain_errors(text, x):
    with pytest.raises(DomainError):
        parse(text).evaluate(x)


def test_non_strict_evaluation_maps_domain_errors_to_nan():
    values = parse("log(x)").evaluate(np.array([-1.0, 1.0]), strict=False)
    assert math.isnan(values[0])
    assert values[1] == 0.0


def test_integer_powers_of_negative_bases_and_ieee_division():
    assert parse("x^3").evaluate(-2.0) == -8.0
    assert parse("1/x").evaluate(0.0) == math.inf
    with pytest.raises(DomainError):
        parse("(-8)^(1/3)").evaluate(0.0)


def test_jet_coefficients():
    np.testing.assert_allclose(
        jet_eval(parse("log(x)-x"), 1.0, 2).coeffs, [-1.0, 0.0, -0.5], atol=1e-15
    )


@pytest.mark.parametrize(
    "text, x0, k, expected",
    [
        ("sin(x)", 0.0, 3, -1.0),
        ("exp(2*x)", 0.0, 5, 32.0),
        ("x^6", 1.0, 6, 720.0),
        ("sqrt(x)", 4.0, 2, -1.0 / 32.0),
        ("1/x", 2.0, 3, -0.375),
        ("x^x", 1.0, 1, 1.0),
        ("log(x)-x", 2.0, 4, -6.0 / 16.0),
        ("x^(-1.5)", 1.0, 2, 3.75),
    ],
)
def test_derivatives(text, x0, k, expected):
    assert derivative(parse(text), x0, k) == pytest.approx(expected, rel=1e-12)


def test_derivative_agrees_with_finite_differences():
    f = parse("exp(sin(x)) / (1 + x^2)")
    x0, step = 0.7, 1e-5
    central = (f.evaluate(x0 + step) - f.evaluate(x0 - step)) / (2 * step)
    assert derivative(f, x0, 1) == pytest.approx(central, rel=1e-8)


def test_identity_has_vanishing_derivatives():
    assert derivative(parse("cos(x)^2 + sin(x)^2"), 0.7, 4) == pytest.approx(0.0, abs=1e-12)


def test_truncated_jet_is_bit_identical():
    f = parse("log(x) - x + sin(3*x)^2")
    long, short = jet_eval(f, 0.3, 8), jet_eval(f, 0.3, 3)
    np.testing.assert_array_equal(long.truncate(3).coeffs, short.coeffs)


def test_batched_jets():
    x = np.array([0.5, 1.0, 2.0])
    np.testing.assert_allclose(derivative(parse("log(x)-x"), x, 2), -1.0 / x**2, rtol=1e-14)


def test_jet_outside_domain():
    with pytest.raises(DomainError):
        jet_eval(parse("log(x)"), -1.0, 2)
    with pytest.raises(DomainError):
        jet_eval(parse("sqrt(x)"), 0.0, 1)
    with pytest.raises(ValueError):
        jet_eval(parse("x"), 0.0, -1)
