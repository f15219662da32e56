import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle_values import RL_0_3_SIN_AT_1, RL_0_7_EXP_AT_1
from prabhakar.errors import DomainError, QuadratureFailure, SmoothnessError
from prabhakar.funcspace import (
    CallableFunction,
    EvalResult,
    Exponential,
    PowerSum,
    QuadratureSpec,
    as_powersum,
    derivative_value,
    named_function,
    richardson_derivative,
    rl_differintegrate,
    rl_integral_exact,
    rl_quadrature,
)
from prabhakar.special import gamma


def sin_taylor(degree: int, c: float = 0.0) -> PowerSum:
    terms = [((-1) ** (k // 2) / math.factorial(k), k) for k in range(1, degree + 1, 2)]
    return PowerSum(c, tuple(terms))


def test_powersum_rejects_nonintegrable_exponent():
    with pytest.raises(DomainError):
        PowerSum(0.0, ((1.0, -1.0),))
    ps = PowerSum.unchecked(0.0, ((1.0, -1.5),))
    assert not ps.integrable


def test_polynomial_reexpansion_about_center():
    ps = PowerSum.polynomial([1, -2, 3], center=0.5)
    for x in (0.5, 0.9, 1.7):
        assert abs(ps(x) - (1 - 2 * x + 3 * x * x)) < 1e-14
    assert ps.degree == 2


def test_simplified_merges_terms():
    ps = PowerSum(0.0, ((1, 0.5), (2, 0.5), (3, 1), (-3, 1))).simplified()
    assert ps.terms == ((3 + 0j, 0.5 + 0j),)


def test_rl_integral_exact_examples():
    c = 0.3
    half = rl_integral_exact(PowerSum.constant(1, c), 0.5)
    for x in (0.5, 1.0, 2.0):
        assert abs(half(x) - 2 * math.sqrt((x - c) / math.pi)) < 1e-14
    one = rl_integral_exact(PowerSum.monomial(1, 0, c), 1)
    assert abs(one(1.3) - 1.0) < 1e-15
    a, b, n, m = 0.6, 0.7, 3, 2
    s = a * n + b + m
    val = rl_integral_exact(PowerSum.constant(1, 0.0), s)(1.4)
    assert abs(val - 1.4**s / gamma(s + 1)) < 1e-14


def test_rl_integral_exact_requires_positive_order():
    with pytest.raises(DomainError):
        rl_integral_exact(PowerSum.constant(1), -0.5)


def test_half_integral_then_half_derivative_recovers():
    c = 0.2
    f = PowerSum.monomial(1, 2, c)
    g = f.differintegrate(0.5).differintegrate(-0.5)
    for x in np.linspace(0.3, 2.2, 7):
        assert abs(g(x) - (x - c) ** 2) < 1e-12


def test_first_derivative_of_cube():
    f = PowerSum.monomial(1, 3, 0.0)
    r = rl_differintegrate(f, -1, 0.0, 1.5)
    assert r.value == pytest.approx(3 * 1.5**2, rel=1e-15)
    assert r.method == "exact"


def test_integer_order_derivative_is_classical():
    f = PowerSum.polynomial([2, -1, 0.5, 4, 1], 0.0)
    for n in (1, 2, 3, 4, 5):
        for x in (0.4, 1.1):
            assert abs(rl_differintegrate(f, -n, 0.0, x).value - f.derivative(n)(x)) < 1e-12


def test_fractional_derivative_of_constant():
    # D^0.5 1 = (x - c)^-0.5 / Gamma(0.5)
    r = rl_differintegrate(PowerSum.constant(1, 0.0), -0.5, 0.0, 0.81)
    assert abs(r.value - 0.81**-0.5 / math.sqrt(math.pi)) < 1e-14


def test_callable_sin_matches_taylor_and_oracle():
    sin = named_function("sin")
    quad_val = rl_differintegrate(sin, 0.3, 0.0, 1.0).value
    taylor_val = rl_differintegrate(sin_taylor(25), 0.3, 0.0, 1.0).value
    assert abs(quad_val - taylor_val) < 1e-9
    assert abs(quad_val - RL_0_3_SIN_AT_1) < 1e-12


def test_rl_quadrature_examples():
    one = CallableFunction(lambda t: np.ones_like(t), name="one")
    assert abs(rl_quadrature(one, 1.0, 0.5, 1.75).value - 1.25) < 1e-13
    assert abs(rl_quadrature(one, 0.5, 0.0, 1.0).value - 1 / gamma(1.5)) < 1e-13
    exp = named_function("exp")
    q = rl_quadrature(exp, 0.7, 0.0, 1.0).value
    exact = rl_differintegrate(Exponential(1.0), 0.7, 0.0, 1.0).value
    assert abs(q - exact) < 1e-10
    assert abs(q - RL_0_7_EXP_AT_1) < 1e-12


@pytest.mark.parametrize("scheme", ["tanh-sinh", "gauss-jacobi"])
@pytest.mark.parametrize("order", [0.25, 0.5, 0.9, 1.5])
def test_exact_and_quadrature_agree_on_polynomials(scheme, order):
    rng = np.random.default_rng(7)
    c = -0.4
    coeffs = rng.uniform(-1, 1, 7)
    ps = PowerSum.polynomial(list(coeffs), c)
    cal = CallableFunction(lambda t: np.polyval(coeffs[::-1], t), name="poly6")
    quad = QuadratureSpec(nodes=64, scheme=scheme)
    for x in np.linspace(c + 0.1, c + 2, 6):
        exact = rl_differintegrate(ps, order, c, x).value
        num = rl_quadrature(cal, order, c, x, quad).value
        assert abs(num - exact) <= 1e-8 * max(abs(exact), 1e-8)


def test_rl_semigroup_on_power_sums(rng):
    c = 0.1
    f = PowerSum(c, ((1.0, 0.0), (-0.5, 0.7), (2.0, 3.0)))
    for _ in range(5):
        a = complex(rng.uniform(0.1, 2), rng.uniform(-0.5, 0.5))
        b = complex(rng.uniform(0.1, 2), rng.uniform(-0.5, 0.5))
        lhs = f.differintegrate(b).differintegrate(a)
        rhs = f.differintegrate(a + b)
        for x in np.linspace(c + 0.2, c + 2, 10):
            assert abs(lhs(x) - rhs(x)) <= 1e-11 * max(1, abs(rhs(x)))


def test_tie_break_at_base_point():
    f = PowerSum.polynomial([1, 2], 0.0)
    assert rl_differintegrate(f, 0.5, 0.0, 0.0).value == 0
    with pytest.raises(DomainError):
        rl_differintegrate(f, -0.5, 0.0, 0.0)


def test_domain_and_smoothness_errors():
    f = PowerSum.constant(1.0, 0.0)
    with pytest.raises(DomainError):
        rl_differintegrate(f, 0.5, 0.0, -0.1)
    rough = CallableFunction(lambda t: np.abs(t - 0.5), smoothness_order=0, name="kink")
    with pytest.raises(SmoothnessError):
        rl_differintegrate(rough, -0.5, 0.0, 1.0)
    with pytest.raises(SmoothnessError):
        derivative_value(rough, 1, 0.3)


def test_center_mismatch_rejected():
    with pytest.raises(DomainError):
        as_powersum(PowerSum.constant(1.0, 0.0), 0.5)


def test_callable_fractional_derivative_is_accurate_to_1e6():
    exp = named_function("exp")
    r = rl_differintegrate(exp, -0.4, 0.0, 1.2)
    exact = rl_differintegrate(Exponential(1.0), -0.4, 0.0, 1.2).value
    assert abs(r.value - exact) < 1e-6 * abs(exact)
    assert r.method == "quadrature"


def test_exponential_taylor_form():
    e = Exponential(0.7 - 0.2j)
    ps = e.to_powersum(0.3)
    for x in (0.3, 0.8, 1.5):
        assert abs(ps(x) - e(x)) < 1e-14


def test_named_function_derivatives():
    g = named_function("gaussian")
    x = 0.6
    e = math.exp(-x * x)
    closed = [e, -2 * x * e, (4 * x**2 - 2) * e, (-8 * x**3 + 12 * x) * e, (16 * x**4 - 48 * x**2 + 12) * e]
    for m, ref in enumerate(closed):
        assert abs(derivative_value(g, m, x) - ref) < 1e-14
    fd, _ = richardson_derivative(g, x, 2, 1e-2)
    assert abs(fd - closed[2]) < 1e-8
    assert abs(derivative_value(named_function("sin"), 3, x) + math.cos(x)) < 1e-15
    assert abs(derivative_value(named_function("cos"), 2, x) + math.cos(x)) < 1e-15
    with pytest.raises(ValueError):
        named_function("tan")


def test_finite_difference_fallback():
    cal = CallableFunction(lambda t: np.sin(2 * t), smoothness_order=4, name="sin2")
    assert abs(derivative_value(cal, 2, 0.4) + 4 * math.sin(0.8)) < 1e-7


def test_quadrature_failure_is_reported():
    # a discontinuity defeats the node-doubling estimate at a strict tolerance
    step = CallableFunction(lambda t: (t > 0.37).astype(float), name="step")
    with pytest.raises(QuadratureFailure):
        rl_quadrature(step, 0.5, 0.0, 1.0, QuadratureSpec(nodes=16, rel_tol=1e-12))


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(nodes=1)
    with pytest.raises(ValueError):
        QuadratureSpec(scheme="simpson")


def test_eval_result_error_nonnegative():
    with pytest.raises(ValueError):
        EvalResult(1.0, err_estimate=-1.0)


@settings(max_examples=50, deadline=None)
@given(
    mu=st.floats(-0.9, 4.0),
    a=st.floats(0.05, 2.5),
    b=st.floats(-0.9, 2.5),
    x=st.floats(0.05, 2.0),
)
def test_powersum_order_composition(mu, a, b, x):
    # I^a then the order-b differintegral equals order a + b whenever I^a f is integrable
    f = PowerSum.monomial(1.0, mu, 0.0)
    g = PowerSum(0.0, f.differintegrate(a).terms)
    lhs = g.differintegrate(b)(x)
    rhs = f.differintegrate(a + b)(x)
    assert abs(lhs - rhs) <= 1e-11 * max(1.0, abs(rhs))
