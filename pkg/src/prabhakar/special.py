"""Complex special functions behind every series coefficient.

Off the real axis Gamma is a 9-term Lanczos approximation (g = 7) with
reflection below ``Re(z) = 1/2``, good to roughly 15 significant digits;
real arguments go to the C library.  Everything else
(beta, Pochhammer symbols, binomials, the four-parameter Mittag-Leffler
function) is built on it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConditionError, NonConvergence, PoleError

__all__ = [
    "POLE_TOL",
    "Truncation",
    "MLValue",
    "is_gamma_pole",
    "gamma",
    "rgamma",
    "loggamma",
    "gamma_ratio",
    "beta",
    "gen_pochhammer",
    "pochhammer_term",
    "gen_binomial",
    "check_conditions",
    "mittag_leffler",
    "ml_coefficients",
    "ml_polyval",
]

POLE_TOL = 1e-12

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
# beyond this the direct products risk overflow, so work with logarithms
_DIRECT_LIMIT = 140.0


@dataclass(frozen=True)
class Truncation:
    """When to stop summing a series.

    A series stops once ``consecutive_small`` successive terms all have
    magnitude at most ``rel_tol * |partial sum|``, or after ``max_terms``.
    """

    rel_tol: float = 1e-14
    consecutive_small: int = 3
    max_terms: int = 512

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.consecutive_small < 1:
            raise ValueError("consecutive_small must be >= 1")
        if self.max_terms < self.consecutive_small:
            raise ValueError("max_terms must be >= consecutive_small")


@dataclass(frozen=True)
class MLValue:
    value: complex
    terms_used: int
    err_estimate: float


def is_gamma_pole(z, tol: float = POLE_TOL) -> bool:
    """True when ``z`` is within ``tol`` of a non-positive integer."""
    z = complex(z)
    if abs(z.imag) > tol or z.real > tol:
        return False
    return abs(z.real - round(z.real)) <= tol


def _sinpi(z: complex) -> complex:
    # reduce the real part first so sin(pi z) stays accurate near integers
    k = round(z.real)
    s = cmath.sin(math.pi * complex(z.real - k, z.imag))
    return -s if k % 2 else s


def _lanczos_parts(z: complex) -> tuple[complex, complex]:
    """Return ``(t, A)`` with Gamma(z) = sqrt(2 pi) t^(z - 1/2) e^-t A, Re z >= 1/2."""
    z = z - 1.0
    acc = complex(_LANCZOS[0])
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return t, acc


def loggamma(z) -> complex:
    """A logarithm of Gamma(z).

    The branch is not the principal one of scipy/mpmath ``loggamma``; it is
    only meant to be exponentiated, where the branch is irrelevant.
    """
    z = complex(z)
    if is_gamma_pole(z):
        raise PoleError(f"Gamma has a pole at {z}")
    if z.real < 0.5:
        return math.log(math.pi) - cmath.log(_sinpi(z)) - loggamma(1.0 - z)
    t, acc = _lanczos_parts(z)
    return _LOG_SQRT_2PI + (z - 0.5) * cmath.log(t) - t + cmath.log(acc)


def gamma(z) -> complex:
    """Gamma function for complex ``z``.

    Raises PoleError at (numerical) non-positive integers and OverflowError
    when the result does not fit in a double.
    """
    z = complex(z)
    if is_gamma_pole(z):
        raise PoleError(f"Gamma has a pole at {z}")
    if z.imag == 0.0:
        # the libm gamma is a few ulp accurate on the real line
        try:
            return complex(math.gamma(z.real))
        except OverflowError:
            raise OverflowError(f"Gamma({z.real}) overflows") from None
    if z.real < 0.5:
        return math.pi / (_sinpi(z) * gamma(1.0 - z))
    t, acc = _lanczos_parts(z)
    if abs(z) < _DIRECT_LIMIT:
        return math.sqrt(2.0 * math.pi) * t ** (z - 0.5) * cmath.exp(-t) * acc
    return cmath.exp(loggamma(z))


def rgamma(z) -> complex:
    """Reciprocal gamma, entire: exactly 0 at the poles of Gamma."""
    z = complex(z)
    if is_gamma_pole(z):
        return 0j
    if z.imag == 0.0 and abs(z.real) < 170.0:
        return complex(1.0 / math.gamma(z.real))
    if z.real < 0.5:
        return _sinpi(z) * gamma(1.0 - z) / math.pi
    if abs(z) < _DIRECT_LIMIT:
        return 1.0 / gamma(z)
    lg = loggamma(z)
    if lg.real > 745.0:
        return 0j
    return cmath.exp(-lg)


def _realify(value: complex, *args) -> complex:
    if all(complex(a).imag == 0.0 for a in args):
        return complex(value.real, 0.0)
    return value


def gamma_ratio(a, b) -> complex:
    """Gamma(a) / Gamma(b); zero when only ``b`` is a pole."""
    a, b = complex(a), complex(b)
    if is_gamma_pole(a):
        raise PoleError(f"Gamma has a pole at {a}")
    if is_gamma_pole(b):
        return 0j
    if abs(a) < _DIRECT_LIMIT and abs(b) < _DIRECT_LIMIT:
        return gamma(a) * rgamma(b)
    return _realify(cmath.exp(loggamma(a) - loggamma(b)), a, b)


def beta(x, y) -> complex:
    """Euler beta function Gamma(x) Gamma(y) / Gamma(x + y)."""
    x, y = complex(x), complex(y)
    for arg in (x, y, x + y):
        if is_gamma_pole(arg):
            raise PoleError(f"beta({x}, {y}) has a Gamma pole at {arg}")
    if max(abs(x), abs(y), abs(x + y)) < _DIRECT_LIMIT:
        return gamma(x) * gamma(y) * rgamma(x + y)
    return _realify(cmath.exp(loggamma(x) + loggamma(y) - loggamma(x + y)), x, y)


def gen_pochhammer(rho, kappa, n: int) -> complex:
    """Generalised Pochhammer symbol (rho)_{kappa n} = Gamma(rho + kappa n) / Gamma(rho).

    For ``kappa == 1`` this is the rising product, so terminating cases
    such as (-2)_3 = 0 come out exactly.  For other ``kappa`` with ``rho``
    on a pole of Gamma the limit convention applies: 1 at n = 0, else 0.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    rho, kappa = complex(rho), complex(kappa)
    if n == 0:
        return 1 + 0j
    if kappa == 1:
        out = 1 + 0j
        for k in range(n):
            out *= rho + k
        return out
    if is_gamma_pole(rho):
        return 0j
    top = rho + kappa * n
    if is_gamma_pole(top):
        raise PoleError(f"Gamma({top}) is infinite while Gamma({rho}) is finite")
    return gamma_ratio(top, rho)


def pochhammer_term(rho, kappa, n: int, w) -> complex:
    """The series weight (rho)_{kappa n} w^n / n!, overflow-safe for large n."""
    rho, kappa, w = complex(rho), complex(kappa), complex(w)
    if n == 0:
        return 1 + 0j
    if w == 0:
        return 0j
    if kappa == 1 and is_gamma_pole(rho) and n > -round(rho.real):
        return 0j
    if kappa != 1 and is_gamma_pole(rho):
        return 0j
    if n < _DIRECT_LIMIT and n * math.log(max(abs(w), 1.0)) < 600.0:
        if kappa == 1:
            out = 1 + 0j
            for k in range(n):
                out *= (rho + k) * w / (k + 1)
            return out
        return gen_pochhammer(rho, kappa, n) * w**n / math.factorial(n)
    top = rho + kappa * n
    if is_gamma_pole(top):
        raise PoleError(f"Gamma({top}) is infinite while Gamma({rho}) is finite")
    if is_gamma_pole(rho):
        # kappa == 1, rho a pole, n within the surviving range: use reflection
        # of the finite product instead of infinite gammas
        out = gen_pochhammer(rho, kappa, n) * cmath.exp(n * cmath.log(w) - loggamma(n + 1))
        return _realify(out, rho, kappa, w)
    logs = loggamma(top) - loggamma(rho) - loggamma(n + 1) + n * cmath.log(w)
    if logs.real < -745.0:
        return 0j
    # log(w) carries i*pi for w < 0; drop the round-off it leaves behind
    return _realify(cmath.exp(logs), rho, kappa, w)


def gen_binomial(a, m: int) -> complex:
    """Binomial coefficient a(a-1)...(a-m+1)/m! as a falling product (no poles)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    a = complex(a)
    out = 1 + 0j
    for k in range(m):
        out *= (a - k) / (k + 1)
    return out


def check_conditions(alpha, beta, kappa, require_beta: bool = True) -> None:
    """Raise ConditionError unless Re a > 0, Re b > 0, Re k > 0 and Re(k - a) < 1."""
    alpha, beta, kappa = complex(alpha), complex(beta), complex(kappa)
    if not alpha.real > 0:
        raise ConditionError(f"need Re(alpha) > 0, got alpha={alpha}")
    if require_beta and not beta.real > 0:
        raise ConditionError(f"need Re(beta) > 0, got beta={beta}")
    if not kappa.real > 0:
        raise ConditionError(f"need Re(kappa) > 0, got kappa={kappa}")
    if not (kappa - alpha).real < 1:
        raise ConditionError(f"need Re(kappa - alpha) < 1, got kappa={kappa}, alpha={alpha}")


def _last_index(rho: complex, kappa: complex) -> int | None:
    """Index of the last non-zero coefficient when the series terminates."""
    if is_gamma_pole(rho):
        return -round(rho.real) if kappa == 1 else 0
    return None


def _ml_term(alpha, beta, rho, kappa, n, z) -> complex:
    try:
        w = pochhammer_term(rho, kappa, n, z)
    except OverflowError:
        raise NonConvergence(f"Mittag-Leffler term {n} overflows at z={z}") from None
    return w * rgamma(alpha * n + beta) if w != 0 else 0j


def mittag_leffler(alpha, beta, rho, kappa, z, trunc: Truncation = Truncation()) -> MLValue:
    """Four-parameter Mittag-Leffler function E^{rho,kappa}_{alpha,beta}(z).

    Summed as sum_n (rho)_{kappa n} z^n / (Gamma(alpha n + beta) n!).
    """
    alpha, beta, rho, kappa, z = map(complex, (alpha, beta, rho, kappa, z))
    check_conditions(alpha, beta, kappa)
    last = _last_index(rho, kappa)
    if z == 0:
        last = 0
    total = 0j
    small = 0
    term = 0j
    n = 0
    while n < trunc.max_terms:
        term = _ml_term(alpha, beta, rho, kappa, n, z)
        total += term
        n += 1
        if last is not None and n > last:
            return MLValue(total, n, 0.0)
        if abs(term) <= trunc.rel_tol * abs(total):
            small += 1
            if small >= trunc.consecutive_small:
                return MLValue(total, n, abs(term))
        else:
            small = 0
    if abs(term) > math.sqrt(trunc.rel_tol) * abs(total):
        raise NonConvergence(f"Mittag-Leffler series not converged after {n} terms (last term {abs(term):.3e})")
    return MLValue(total, n, abs(term))


def ml_coefficients(alpha, beta, rho, kappa, zmax: float, trunc: Truncation = Truncation()) -> np.ndarray:
    """Coefficients c_n of E^{rho,kappa}_{alpha,beta}(z) = sum c_n z^n, enough for |z| <= zmax.

    Truncation is relative to sum |c_n| zmax^n, so it is safe for every
    |z| <= zmax, including where the series cancels.
    """
    alpha, beta, rho, kappa = map(complex, (alpha, beta, rho, kappa))
    check_conditions(alpha, beta, kappa)
    last = _last_index(rho, kappa)
    zmax = float(zmax)
    coeffs = []
    scale = 0.0
    small = 0
    mag = 0.0
    for n in range(trunc.max_terms):
        c = _ml_term(alpha, beta, rho, kappa, n, 1.0)
        coeffs.append(c)
        if last is not None and n >= last:
            return np.array(coeffs, dtype=complex)
        mag = abs(c) * zmax**n if zmax > 0 else (abs(c) if n == 0 else 0.0)
        scale += mag
        if mag <= trunc.rel_tol * scale:
            small += 1
            if small >= trunc.consecutive_small:
                return np.array(coeffs, dtype=complex)
        else:
            small = 0
    if mag > math.sqrt(trunc.rel_tol) * scale:
        raise NonConvergence(f"Mittag-Leffler coefficients still large after {trunc.max_terms} terms")
    return np.array(coeffs, dtype=complex)


def ml_polyval(coeffs: np.ndarray, z) -> np.ndarray:
    """Evaluate sum coeffs[n] z^n by Horner's rule over an array of z."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    for c in coeffs[::-1]:
        out = out * z + c
    return out
