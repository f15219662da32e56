import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle_values import GP_GAUSSIAN
from prabhakar.errors import NonConvergence
from prabhakar.funcspace import (
    CallableFunction,
    Exponential,
    PowerSum,
    named_function,
    richardson_derivative,
    rl_quadrature,
)
from prabhakar.operators import ParamSet, prabhakar_quadrature, prabhakar_series
from prabhakar.rules import (
    PartitionVector,
    RuleTruncation,
    chain_rule_apply,
    composition_derivative,
    enumerate_partitions,
    faa_di_bruno_coefficient,
    product_rule_apply,
)

GAUSS_P = ParamSet(0.5, 0.7, 0.2, 1, 1, 0.0)
NEG_SQ = PowerSum.monomial(-1.0, 2, 0.0)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-8)


# --- partitions ---------------------------------------------------------------------


def test_partitions_small():
    (only,) = enumerate_partitions(1)
    assert only.P == (1,) and only.r == 1
    got = {(v.P, v.r) for v in enumerate_partitions(3)}
    assert got == {((3, 0, 0), 3), ((1, 1, 0), 2), ((0, 0, 1), 1)}


@pytest.mark.parametrize("m", range(1, 9))
def test_partitions_match_brute_force(m):
    brute = set()
    for P in itertools.product(*(range(m // j + 1) for j in range(1, m + 1))):
        if sum(j * k for j, k in enumerate(P, start=1)) == m:
            brute.add(P)
    got = enumerate_partitions(m)
    assert {v.P for v in got} == brute
    assert [v.r for v in got] == sorted(v.r for v in got)
    if m == 6:
        assert len(got) == 11


def test_partition_vector_validation():
    with pytest.raises(ValueError):
        PartitionVector(3, (1, 0, 0), 1)
    with pytest.raises(ValueError):
        enumerate_partitions(0)


def test_faa_di_bruno_coefficients_sum_to_bell_numbers():
    bell = [1, 1, 2, 5, 15, 52, 203, 877, 4140]
    for m in range(1, 9):
        total = sum(faa_di_bruno_coefficient(v) for v in enumerate_partitions(m))
        assert total == pytest.approx(bell[m])


def test_printed_coefficient_equals_classical():
    for m in range(1, 12):
        for v in enumerate_partitions(m):
            assert faa_di_bruno_coefficient(v, "printed") == faa_di_bruno_coefficient(v, "classical")
    with pytest.raises(ValueError):
        faa_di_bruno_coefficient(enumerate_partitions(2)[0], "other")


# --- composition derivative ---------------------------------------------------------


def test_composition_first_derivative():
    f, g = named_function("sin"), PowerSum.polynomial([0.3, 1, 2], 0.0)
    x = 0.4
    assert abs(composition_derivative(f, g, 1, x) - math.cos(g(x).real) * (1 + 4 * x)) < 1e-14


def test_composition_gaussian_second_derivative():
    x = 0.5
    ref = (4 * x * x - 2) * math.exp(-x * x)
    for norm in ("classical", "printed"):
        assert abs(composition_derivative(Exponential(1.0), NEG_SQ, 2, x, norm) - ref) < 1e-14


def test_composition_identity_inner():
    ident = PowerSum.monomial(1.0, 1, 0.0)
    cos = named_function("cos")
    for m in range(1, 7):
        got = composition_derivative(cos, ident, m, 0.7)
        assert abs(got - math.cos(0.7 + m * math.pi / 2)) < 1e-13


def exp_g(t):
    return np.exp(0.1 - 0.4 * t + 0.3 * t * t)


def cauchy_derivative(func, x, m, radius=1.0, nodes=64):
    # m-th derivative of an entire function from its trapezoidal contour integral
    theta = 2 * np.pi * np.arange(nodes) / nodes
    vals = func(x + radius * np.exp(1j * theta))
    return math.factorial(m) * np.mean(vals * np.exp(-1j * m * theta)) / radius**m


@pytest.mark.parametrize("m", range(1, 7))
def test_composition_against_finite_differences(m):
    g = PowerSum.polynomial([0.1, -0.4, 0.3], 0.0)
    comp = CallableFunction(exp_g, name="exp_g")
    fd, _ = richardson_derivative(comp, 0.6, m, 0.15)
    got = composition_derivative(Exponential(1.0), g, m, 0.6)
    assert rel(got, fd) < 1e-6


@pytest.mark.parametrize("m", range(1, 9))
def test_composition_against_contour_integral(m):
    g = PowerSum.polynomial([0.1, -0.4, 0.3], 0.0)
    got = composition_derivative(Exponential(1.0), g, m, 0.6)
    assert rel(got, cauchy_derivative(exp_g, 0.6, m)) < 1e-10


# --- product rule -------------------------------------------------------------------


def test_product_rule_with_unit_g():
    p = ParamSet(0.6, 0.9, -0.4, 1.3, 1.1, 0.0)
    f = PowerSum.polynomial([1, 2, -1], 0.0)
    r = product_rule_apply(f, PowerSum.constant(1.0, 0.0), p, 0.8)
    assert rel(r.value, prabhakar_series(p, f, 0.8).value) < 1e-14
    assert len(r.parts) == 1


def test_product_rule_example():
    p = ParamSet(0.5, 0.8, 0.3, 1.2, 1, 0.0)
    one, sq = PowerSum.constant(1.0, 0.0), PowerSum.monomial(1.0, 2, 0.0)
    r = product_rule_apply(one, sq, p, 1.0, RuleTruncation(outer_terms=8))
    assert rel(r.value, prabhakar_series(p, sq, 1.0).value) < 1e-8
    assert len(r.parts) == 3


def test_product_rule_two_term_collapse():
    # f = e^{2x}, g = x: only m = 0, 1 contribute
    p = ParamSet(0.7, 0.6, 0.4, 0.9, 1, 0.0)
    e2 = Exponential(2.0)
    x = 0.9
    r = product_rule_apply(e2, PowerSum.monomial(1.0, 1, 0.0), p, x)
    assert len(r.parts) == 2 and all(t != 0 for t in r.parts)
    direct = CallableFunction(lambda t: t * np.exp(2 * t), name="x_exp2x")
    assert rel(r.value, prabhakar_quadrature(p, direct, x).value) < 1e-8


def test_product_rule_callable_g_tail_bound():
    p = ParamSet(0.6, 0.5, 0.3, 1.1, 1, 0.0)
    f = PowerSum.polynomial([1, 1], 0.0)
    x = 0.7
    r = product_rule_apply(f, named_function("exp"), p, x)
    assert r.err_estimate <= 10 * abs(r.parts[-1]) + 1e-12
    tail = [abs(t) for t in r.parts[4:]]
    assert all(a >= b for a, b in zip(tail, tail[1:]))
    direct = CallableFunction(lambda t: (1 + t) * np.exp(t), name="fg")
    assert rel(r.value, prabhakar_quadrature(p, direct, x).value) < 1e-8


def test_product_rule_nonconvergence():
    p = ParamSet(0.6, 0.5, 0.3, 1.1, 1, 0.0)
    f = PowerSum.constant(1.0, 0.0)
    fast = Exponential(30.0)
    with pytest.raises(NonConvergence):
        product_rule_apply(f, fast, p, 0.9, RuleTruncation(outer_terms=4))


def test_product_rule_random_polynomials(rng):
    for _ in range(10):
        p = ParamSet(
            rng.uniform(0.3, 1.5), rng.uniform(0.2, 1.5), rng.uniform(-1, 1), rng.uniform(-2, 2), 1, 0.0
        )
        fc = rng.uniform(-1, 1, rng.integers(1, 6))
        gc = rng.uniform(-1, 1, rng.integers(1, 6))
        f, g = PowerSum.polynomial(list(fc), 0.0), PowerSum.polynomial(list(gc), 0.0)
        fg = PowerSum.polynomial(list(np.polynomial.polynomial.polymul(fc, gc)), 0.0)
        for x in (0.4, 1.0):
            r = product_rule_apply(f, g, p, x)
            assert rel(r.value, prabhakar_series(p, fg, x).value) < 1e-8
            assert len(r.parts) == len(gc)


# --- chain rule ---------------------------------------------------------------------


@pytest.mark.parametrize("x", sorted(GP_GAUSSIAN))
def test_chain_rule_gaussian(x):
    r = chain_rule_apply(Exponential(1.0), NEG_SQ, GAUSS_P, x)
    q = prabhakar_quadrature(GAUSS_P, named_function("gaussian"), x).value
    assert rel(r.value, q) < 1e-4
    assert rel(r.value, GP_GAUSSIAN[x]) < 1e-4


def test_chain_rule_identity_outer():
    p = ParamSet(0.8, 0.6, -0.3, 1.4, 1, 0.0)
    g = PowerSum.polynomial([0.5, -1, 2, 0.3], 0.0)
    ident = PowerSum.monomial(1.0, 1, 0.0)
    for x in (0.3, 1.0):
        r = chain_rule_apply(ident, g, p, x)
        assert rel(r.value, prabhakar_series(p, g, x).value) < 1e-8


def test_chain_rule_identity_inner():
    p = ParamSet(0.8, 0.6, -0.3, 1.4, 1, 0.0)
    f = PowerSum.polynomial([0.5, -1, 2], 0.0)
    ident = PowerSum.monomial(1.0, 1, 0.0)
    r = chain_rule_apply(f, ident, p, 0.9)
    assert rel(r.value, prabhakar_series(p, f, 0.9).value) < 1e-8


def test_chain_rule_omega_zero_is_rl():
    p = ParamSet(0.5, 0.7, 0.0, 1, 1, 0.0)
    for x in (0.25, 0.5, 1.0):
        r = chain_rule_apply(Exponential(1.0), NEG_SQ, p, x)
        q = rl_quadrature(named_function("gaussian"), 0.7, 0.0, x).value
        assert rel(r.value, q) < 1e-6


@settings(max_examples=15, deadline=None)
@given(
    alpha=st.floats(0.3, 1.2),
    beta=st.floats(0.2, 1.2),
    omega=st.floats(-0.5, 0.5),
    x=st.floats(0.1, 1.0),
)
def test_chain_rule_matches_quadrature(alpha, beta, omega, x):
    p = ParamSet(alpha, beta, omega, 1, 1, 0.0)
    r = chain_rule_apply(Exponential(1.0), NEG_SQ, p, x)
    q = prabhakar_quadrature(p, named_function("gaussian"), x).value
    assert rel(r.value, q) < 1e-4
