import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle_values import BINOM_MINUS_1_6_CHOOSE_3, GAMMA_4_2_0_7I, ML_2_1_AT_1
from prabhakar.errors import ConditionError, NonConvergence, PoleError
from prabhakar.special import (
    Truncation,
    beta,
    gamma,
    gamma_ratio,
    gen_binomial,
    gen_pochhammer,
    is_gamma_pole,
    loggamma,
    mittag_leffler,
    ml_coefficients,
    ml_polyval,
    pochhammer_term,
    rgamma,
)


def test_gamma_classical_values():
    assert gamma(1) == pytest.approx(1, rel=1e-15)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert gamma(5) == pytest.approx(24, rel=1e-15)
    assert gamma(-0.5) == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-14)


def test_gamma_complex_oracle():
    assert abs(gamma(4.2 + 0.7j) / GAMMA_4_2_0_7I - 1) < 1e-14


def test_gamma_conjugate_symmetry():
    z = -1.3 + 2.1j
    assert abs(gamma(z.conjugate()) - gamma(z).conjugate()) < 1e-14 * abs(gamma(z))


@pytest.mark.parametrize("z", [0, -1, -3, -7.0, -2 + 1e-14])
def test_gamma_poles_raise(z):
    with pytest.raises(PoleError):
        gamma(z)
    assert rgamma(z) == 0


def test_near_pole_is_not_a_pole():
    assert not is_gamma_pole(-1 + 1e-9)
    assert abs(gamma(-0.999999) * (-0.999999 + 1) + 1) < 1e-5


def test_rgamma_values():
    assert rgamma(-3) == 0
    assert rgamma(1) == pytest.approx(1)
    assert rgamma(0.5) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)
    # far beyond the double range of Gamma the reciprocal underflows to 0
    assert rgamma(400.5) == 0


def test_rgamma_times_gamma_is_one(rng):
    for _ in range(100):
        z = complex(rng.uniform(-5, 5), rng.uniform(-3, 3))
        if is_gamma_pole(z, 1e-3):
            continue
        assert abs(rgamma(z) * gamma(z) - 1) < 1e-12


def test_loggamma_exponentiates_to_gamma():
    for z in (0.3 + 0.2j, 7.5 - 3j, -2.5 + 0.1j, 150 + 2j):
        lg = loggamma(z)
        if abs(z) < 100:
            assert abs(cmath.exp(lg) / gamma(z) - 1) < 1e-13
    assert abs(loggamma(200.0) - math.lgamma(200.0)) < 1e-10


def test_gamma_ratio_large_arguments():
    # Gamma(300.5) / Gamma(300) ~ sqrt(300) with a small correction
    r = gamma_ratio(300.5, 300.0)
    assert abs(r.real / (math.sqrt(300) * (1 - 1 / 2400)) - 1) < 1e-6
    assert gamma_ratio(1.5, -2) == 0
    with pytest.raises(PoleError):
        gamma_ratio(-1, 2)


def test_beta_values():
    assert beta(1, 1) == pytest.approx(1)
    assert beta(2, 3) == pytest.approx(1 / 12, rel=1e-15)
    with pytest.raises(PoleError):
        beta(-1, 0.5)


def test_beta_recurrences():
    x, y = 2.5, 1.7
    b = beta(x, y)
    assert abs(b - (x - 1) / (x + y - 1) * beta(x - 1, y)) < 1e-13 * abs(b)
    assert abs(b - (y - 1) / (x + y - 1) * beta(x, y - 1)) < 1e-13 * abs(b)
    # the additive (Pascal) form behind the induction on k
    assert abs(b - beta(x + 1, y) - beta(x, y + 1)) < 1e-13 * abs(b)


def test_gen_pochhammer_examples():
    assert gen_pochhammer(0.3 + 1j, 1.4, 0) == 1
    assert gen_pochhammer(3, 1, 2) == 12
    assert gen_pochhammer(-2, 1, 3) == 0
    assert gen_pochhammer(-2, 1, 2) == 2
    # kappa != 1 on a pole: limit convention
    assert gen_pochhammer(-1, 1.5, 0) == 1
    assert gen_pochhammer(-1, 1.5, 2) == 0


def test_gen_pochhammer_general_kappa():
    rho, kappa, n = 0.7, 1.3, 4
    assert abs(gen_pochhammer(rho, kappa, n) - gamma(rho + kappa * n) / gamma(rho)) < 1e-13 * abs(
        gen_pochhammer(rho, kappa, n)
    )


def test_gen_pochhammer_pole_in_numerator():
    # Gamma(0.5 + 0.5 * n) never hits a pole, but Gamma(-2.5 + 0.5 n) does at n = 5
    with pytest.raises(PoleError):
        gen_pochhammer(-2.5, 0.5, 5)


def test_gen_pochhammer_recurrence_exact():
    for rho in (-3.5, 0.25, 2 + 1j, -4):
        for n in range(50):
            assert gen_pochhammer(rho, 1, n + 1) == gen_pochhammer(rho, 1, n) * (rho + n)


def test_pochhammer_term_large_n_matches_logs():
    rho, kappa, w = 0.8, 1.1, 0.3
    n = 200
    direct = math.exp(
        math.lgamma(rho + kappa * n) - math.lgamma(rho) - math.lgamma(n + 1) + n * math.log(w)
    )
    assert abs(pochhammer_term(rho, kappa, n, w) / direct - 1) < 1e-11


def test_gen_binomial_examples():
    assert gen_binomial(2.7 - 1j, 0) == 1
    assert gen_binomial(0.5, 2) == pytest.approx(-1 / 8)
    a, b, n, m = 0.6, 0.4, 2, 3
    via_gamma = gamma(1 - b - a * n) / (gamma(1 - b - a * n - m) * math.factorial(m))
    prod = gen_binomial(-a * n - b, m)
    assert abs(prod - via_gamma) < 1e-12
    assert abs(prod - BINOM_MINUS_1_6_CHOOSE_3) < 1e-13
    # integer upper argument: no poles, exact zeros
    assert gen_binomial(2, 3) == 0
    assert gen_binomial(-2, 3) == -4


def test_truncation_validation():
    with pytest.raises(ValueError):
        Truncation(rel_tol=0)
    with pytest.raises(ValueError):
        Truncation(consecutive_small=5, max_terms=4)


@pytest.mark.parametrize("z", [0.0, 0.5, 1.0, 2.0, -3.0])
def test_ml_exponential(z):
    r = mittag_leffler(1, 1, 1, 1, z)
    assert abs(r.value / math.exp(z) - 1) < 1e-12
    assert r.terms_used <= Truncation().max_terms


def test_ml_cosh():
    r = mittag_leffler(2, 1, 1, 1, 1.0)
    assert abs(r.value - math.cosh(1)) < 1e-13
    assert abs(r.value - ML_2_1_AT_1) < 1e-13


def test_ml_at_zero(rng):
    for _ in range(20):
        a, b = rng.uniform(0.2, 2), rng.uniform(0.1, 3)
        k = rng.uniform(0.3, min(1.5, a + 0.9))
        r = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
        v = mittag_leffler(a, b, r, k, 0).value
        assert abs(v - rgamma(b)) < 1e-13 * max(1, abs(rgamma(b)))


def test_ml_three_parameter_coefficients():
    # kappa = 1 reproduces (rho)_n z^n / (Gamma(a n + b) n!)
    a, b, rho = 0.7, 1.2, 1.9
    coeffs = ml_coefficients(a, b, rho, 1, 1.0)
    for n, c in enumerate(coeffs[:30]):
        ref = gamma(rho + n) / gamma(rho) / (gamma(a * n + b) * math.factorial(n))
        assert abs(c - ref) <= 1e-14 * abs(ref) + 1e-300


def test_ml_terminates_for_negative_integer_rho():
    r = mittag_leffler(0.5, 1.0, -2, 1, 0.7)
    ref = rgamma(1) - 2 * 0.7 * rgamma(1.5) + 0.49 * rgamma(2)
    assert r.terms_used == 3
    assert abs(r.value - ref) < 1e-15


def test_ml_conditions():
    with pytest.raises(ConditionError):
        mittag_leffler(0.5, 1, 1, 1.6, 0.1)
    with pytest.raises(ConditionError):
        mittag_leffler(-0.5, 1, 1, 1, 0.1)
    with pytest.raises(ConditionError):
        mittag_leffler(0.5, 0, 1, 1, 0.1)


def test_ml_nonconvergence_flagged():
    with pytest.raises(NonConvergence):
        mittag_leffler(1, 1, 1, 1, 200.0, Truncation(max_terms=20))
    # terms overflow long before they start to decay
    with pytest.raises(NonConvergence):
        mittag_leffler(0.25, 1, 1, 1, -5.0)


def test_ml_polyval_matches_direct():
    coeffs = ml_coefficients(0.8, 0.9, 1.3, 1.1, 2.0)
    for z in (0.3, -1.2, 1.5 + 0.5j):
        assert abs(ml_polyval(coeffs, np.array([z]))[0] - mittag_leffler(0.8, 0.9, 1.3, 1.1, z).value) < 1e-13


@settings(max_examples=60, deadline=None)
@given(
    alpha=st.floats(0.3, 1.0),
    beta_=st.floats(0.1, 3.0),
    rho=st.floats(0.05, 3.0),
    z=st.floats(-2.0, -0.01),
)
def test_ml_real_for_real_negative_argument(alpha, beta_, rho, z):
    v = mittag_leffler(alpha, beta_, rho, 1, z).value
    assert abs(v.imag) <= 1e-12 * max(abs(v), 1e-300)


@settings(max_examples=60, deadline=None)
@given(x=st.floats(0.2, 6.0), y=st.floats(0.2, 6.0))
def test_beta_symmetric_and_positive(x, y):
    b = beta(x, y)
    assert b.real > 0
    assert abs(b - beta(y, x)) <= 1e-14 * abs(b)
