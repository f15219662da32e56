"""Functions to differintegrate, and Riemann-Liouville operators acting on them.

Three representations are supported:

* :class:`PowerSum` -- finite sums ``sum a_k (x - c)^mu_k``.  Every
  Riemann-Liouville differintegral of a power sum is again a power sum, so
  this is the exact path.
* :class:`Exponential` -- ``exp(a x)``, exact pointwise, and turned into its
  Taylor power sum about the base point whenever an exact RL operator is
  needed.
* :class:`CallableFunction` -- anything evaluable pointwise; RL integrals
  go through quadrature and derivatives through Richardson-extrapolated
  central differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Union

import numpy as np
from scipy.special import roots_jacobi

from .errors import DomainError, QuadratureFailure, SmoothnessError
from .special import Truncation, gamma_ratio, gen_binomial, rgamma

__all__ = [
    "PowerSum",
    "Exponential",
    "CallableFunction",
    "FunctionRepr",
    "QuadratureSpec",
    "EvalResult",
    "as_powersum",
    "evaluate",
    "derivative_value",
    "named_function",
    "rl_integral_exact",
    "rl_differintegrate",
    "rl_quadrature",
    "kernel_quadrature",
    "richardson_derivative",
]

_KEY_DIGITS = 12


def _key(z: complex) -> tuple[float, float]:
    return (round(z.real, _KEY_DIGITS), round(z.imag, _KEY_DIGITS))


@lru_cache(maxsize=1 << 16)
def _power_factor(mu: complex, order: complex) -> complex:
    """Gamma(mu + 1) / Gamma(mu + order + 1): the RL action on (x - c)^mu."""
    return gamma_ratio(mu + 1, mu + order + 1)


def _is_nonneg_int(z: complex) -> bool:
    return z.imag == 0 and z.real >= 0 and z.real == int(z.real)


@dataclass(frozen=True)
class PowerSum:
    """``sum coeff * (x - center)^exponent`` over ``terms``.

    Exponents must satisfy Re(mu) > -1 so the sum is integrable at the
    base point.  Results of fractional *derivatives* may break that; they
    are built through :meth:`unchecked` and can only be evaluated or
    differentiated further.
    """

    center: float
    terms: tuple[tuple[complex, complex], ...]
    integrable: bool = field(default=True, compare=False)

    def __post_init__(self):
        terms = tuple((complex(a), complex(mu)) for a, mu in self.terms)
        object.__setattr__(self, "center", float(self.center))
        object.__setattr__(self, "terms", terms)
        ok = all(mu.real > -1 for _, mu in terms)
        if self.integrable and not ok:
            bad = [mu for _, mu in terms if not mu.real > -1]
            raise DomainError(f"power-sum exponents need Re(mu) > -1, got {bad}")
        object.__setattr__(self, "integrable", ok)

    @classmethod
    def unchecked(cls, center: float, terms) -> "PowerSum":
        return cls(center, tuple(terms), integrable=False)

    @classmethod
    def monomial(cls, coeff, exponent, center: float = 0.0) -> "PowerSum":
        return cls(center, ((coeff, exponent),))

    @classmethod
    def constant(cls, value, center: float = 0.0) -> "PowerSum":
        return cls(center, ((value, 0),))

    @classmethod
    def polynomial(cls, coeffs, center: float = 0.0) -> "PowerSum":
        """``sum coeffs[k] x^k`` re-expanded in powers of ``(x - center)``."""
        n = len(coeffs)
        out = [0j] * n
        for k, a in enumerate(coeffs):
            # x^k = sum_j C(k, j) center^(k - j) (x - center)^j
            for j in range(k + 1):
                out[j] += complex(a) * math.comb(k, j) * center ** (k - j)
        return cls(center, tuple((a, j) for j, a in enumerate(out) if a != 0))

    @property
    def degree(self) -> int | None:
        """Polynomial degree, or None unless every exponent is a non-negative integer."""
        if not self.terms:
            return -1
        if not all(_is_nonneg_int(mu) for _, mu in self.terms):
            return None
        return int(max(mu.real for _, mu in self.terms))

    @property
    def min_exponent(self) -> float:
        return min((mu.real for _, mu in self.terms), default=0.0)

    def simplified(self) -> "PowerSum":
        """Merge equal exponents and drop zero coefficients."""
        acc: dict[tuple[float, float], list] = {}
        for a, mu in self.terms:
            slot = acc.setdefault(_key(mu), [0j, mu])
            slot[0] += a
        terms = tuple((a, mu) for a, mu in acc.values() if a != 0)
        return PowerSum(self.center, terms, integrable=self.integrable)

    def scaled(self, k) -> "PowerSum":
        k = complex(k)
        return PowerSum(self.center, tuple((k * a, mu) for a, mu in self.terms), integrable=self.integrable)

    def __add__(self, other: "PowerSum") -> "PowerSum":
        if not isinstance(other, PowerSum):
            return NotImplemented
        if other.center != self.center:
            raise DomainError("cannot add power sums about different centres")
        ok = self.integrable and other.integrable
        return PowerSum(self.center, self.terms + other.terms, integrable=ok)

    def differintegrate(self, order) -> "PowerSum":
        """Exact RL differintegral of order ``order`` (Re > 0 integrates)."""
        order = complex(order)
        if order == 0:
            return self
        terms = []
        for a, mu in self.terms:
            k = _power_factor(mu, order)
            if k != 0:
                terms.append((a * k, mu + order))
        return PowerSum(self.center, tuple(terms), integrable=False)

    def derivative(self, m: int = 1) -> "PowerSum":
        """Classical m-th derivative; exact zeros for polynomial parts."""
        terms = []
        for a, mu in self.terms:
            k = gen_binomial(mu, m) * math.factorial(m)
            if k != 0:
                terms.append((a * k, mu - m))
        return PowerSum(self.center, tuple(terms), integrable=False)

    def at_offset(self, v) -> np.ndarray:
        """Values at ``x = center + v`` for an array of offsets ``v > 0``."""
        v = np.asarray(v, dtype=float)
        out = np.zeros(v.shape, dtype=complex)
        for a, mu in self.terms:
            if _is_nonneg_int(mu):
                out += a * v ** int(mu.real)
            else:
                out += a * np.power(v.astype(complex), mu)
        return out

    def __call__(self, x) -> complex:
        x = float(x)
        v = x - self.center
        if v < 0:
            raise DomainError(f"power sum about {self.center} evaluated at {x}")
        if v == 0:
            total = 0j
            for a, mu in self.terms:
                if mu == 0:
                    total += a
                elif mu.real <= 0:
                    raise DomainError(f"(x - c)^{mu} is singular at the base point")
            return total
        return complex(self.at_offset(np.array([v]))[0])


@dataclass(frozen=True)
class Exponential:
    """``exp(a x)``; exact RL operators use its Taylor sum about the base point."""

    a: complex
    taylor_degree: int = 30

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        if self.taylor_degree < 0:
            raise ValueError("taylor_degree must be non-negative")

    def __call__(self, x) -> complex:
        return complex(np.exp(self.a * x))

    def to_powersum(self, center: float) -> PowerSum:
        scale = np.exp(self.a * center)
        terms = []
        coeff = complex(scale)
        for k in range(self.taylor_degree + 1):
            terms.append((coeff, k))
            coeff *= self.a / (k + 1)
        return PowerSum(center, tuple(terms))


@dataclass(frozen=True)
class CallableFunction:
    """A pointwise evaluator.

    ``evaluator`` is called with numpy arrays and must be vectorised.
    ``derivative(m, x)``, when given, returns exact classical derivatives;
    otherwise derivatives up to ``smoothness_order`` (at most 6) come from
    finite differences.
    """

    evaluator: Callable
    smoothness_order: int = 0
    derivative: Callable[[int, float], complex] | None = None
    name: str = "callable"

    def __call__(self, x) -> complex:
        return complex(np.asarray(self.evaluator(np.asarray([float(x)])))[0])


FunctionRepr = Union[PowerSum, Exponential, CallableFunction]


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature settings.

    ``scheme`` is ``"tanh-sinh"`` (double-exponential, robust to every
    algebraic endpoint singularity at once) or ``"gauss-jacobi"`` (the
    ``(x - t)^(order - 1)`` factor absorbed into a Jacobi weight; spectral
    only for integrands smooth apart from that factor).  ``rel_tol`` bounds
    the node-doubling error estimate relative to the integral's L1 size.
    """

    nodes: int = 64
    scheme: str = "tanh-sinh"
    rel_tol: float = 1e-12

    def __post_init__(self):
        if self.nodes < 2:
            raise ValueError("nodes must be >= 2")
        if self.scheme not in ("tanh-sinh", "gauss-jacobi"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")


@dataclass(frozen=True)
class EvalResult:
    value: complex
    err_estimate: float = 0.0
    terms_used: int = 0
    method: str = "exact"
    parts: tuple = ()

    def __post_init__(self):
        if not self.err_estimate >= 0:
            raise ValueError("err_estimate must be non-negative")


def as_powersum(f: FunctionRepr, c: float) -> PowerSum | None:
    """The exact power-sum form of ``f`` about ``c``, or None for callables."""
    if isinstance(f, PowerSum):
        if f.center != float(c):
            raise DomainError(f"power sum centred at {f.center}, operator base point is {c}")
        return f
    if isinstance(f, Exponential):
        return f.to_powersum(float(c))
    return None


def evaluate(f: FunctionRepr, t) -> np.ndarray:
    """Vectorised pointwise values of any representation."""
    t = np.asarray(t, dtype=float)
    if isinstance(f, PowerSum):
        if np.any(t <= f.center):
            return np.array([f(x) for x in t.ravel()], dtype=complex).reshape(t.shape)
        return f.at_offset(t - f.center)
    if isinstance(f, Exponential):
        return np.exp(f.a * t)
    out = f.evaluator(t)
    return np.broadcast_to(np.asarray(out, dtype=complex), t.shape).copy()


def richardson_derivative(func: Callable[[float], complex], x: float, n: int, h: float) -> tuple[complex, float]:
    """n-th derivative by central differences with two Richardson levels.

    Returns ``(value, err_estimate)``.  All sample points lie in
    ``[x - n h / 2, x + n h / 2]``.
    """
    if n == 0:
        return complex(func(x)), 0.0
    weights = [(-1) ** k * math.comb(n, k) for k in range(n + 1)]

    def central(step: float) -> complex:
        acc = 0j
        for k, w in enumerate(weights):
            acc += w * complex(func(x + (n / 2 - k) * step))
        return acc / step**n

    d0, d1, d2 = central(h), central(h / 2), central(h / 4)
    r1 = (4 * d1 - d0) / 3
    r1b = (4 * d2 - d1) / 3
    r2 = (16 * r1b - r1) / 15
    return r2, abs(r2 - r1b)


_FD_MAX_ORDER = 6


def derivative_value(f: FunctionRepr, m: int, x: float) -> complex:
    """Classical m-th derivative of ``f`` at ``x``."""
    if m == 0:
        return complex(evaluate(f, np.array([x]))[0])
    if isinstance(f, PowerSum):
        return f.derivative(m)(x)
    if isinstance(f, Exponential):
        return complex(f.a**m * np.exp(f.a * x))
    if f.derivative is not None:
        return complex(f.derivative(m, x))
    if m > f.smoothness_order or m > _FD_MAX_ORDER:
        raise SmoothnessError(
            f"{f.name}: derivative of order {m} requested, "
            f"finite differences limited to order {min(f.smoothness_order, _FD_MAX_ORDER)}"
        )
    h = 1e-2 * max(1.0, abs(x))
    value, _ = richardson_derivative(f, x, m, h)
    return value


def _hermite_gaussian_derivative(m: int, x: float) -> complex:
    # d^m/dx^m exp(-x^2) = (-1)^m H_m(x) exp(-x^2), physicists' Hermite H_m
    h_prev, h = 1.0, 2.0 * x
    if m == 0:
        h = 1.0
    for k in range(1, m):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return complex((-1) ** m * h * math.exp(-x * x))


def _sin_derivative(m: int, x: float) -> complex:
    return complex(math.sin(x + m * math.pi / 2))


def _cos_derivative(m: int, x: float) -> complex:
    return complex(math.cos(x + m * math.pi / 2))


def _exp_derivative(m: int, x: float) -> complex:
    return complex(math.exp(x))


_NAMED = {
    "gaussian": (lambda t: np.exp(-t * t), _hermite_gaussian_derivative),
    "sin": (np.sin, _sin_derivative),
    "cos": (np.cos, _cos_derivative),
    "exp": (np.exp, _exp_derivative),
}


def named_function(name: str) -> CallableFunction:
    """Callable corpus entries with exact derivatives: gaussian, sin, cos, exp."""
    try:
        ev, der = _NAMED[name]
    except KeyError:
        raise ValueError(f"unknown named function {name!r}; known: {sorted(_NAMED)}") from None
    return CallableFunction(ev, smoothness_order=10**6, derivative=der, name=name)


def rl_integral_exact(f: PowerSum, mu) -> PowerSum:
    """RL integral of order ``mu`` (Re mu > 0) of a power sum, in closed form."""
    mu = complex(mu)
    if not mu.real > 0:
        raise DomainError(f"rl_integral_exact needs Re(mu) > 0, got {mu}")
    if not f.integrable:
        raise DomainError("power sum is not integrable at its base point")
    return PowerSum(f.center, f.differintegrate(mu).terms)


# --- quadrature -----------------------------------------------------------


def _tanh_sinh_grid(length: float, nodes: int, tau_max: float):
    """Offsets from both endpoints and weights, on the fine (h/2) grid.

    Returns ``(u, v, w, even)`` with ``u = x - t``, ``v = t - c`` computed
    without cancellation, ``w`` the fine-grid weights, and ``even`` the mask
    of nodes belonging to the coarse grid.
    """
    half = nodes // 2
    h = tau_max / half
    k = np.arange(-2 * half, 2 * half + 1)
    tau = k * (h / 2)
    y = (math.pi / 2) * np.sinh(tau)
    ay = np.abs(y)
    e = np.exp(-2.0 * ay)
    small = 2.0 * e / (1.0 + e)  # 1 - tanh|y|
    one_plus = np.where(y >= 0, 2.0 - small, small)
    one_minus = np.where(y >= 0, small, 2.0 - small)
    sech2 = 4.0 * e / (1.0 + e) ** 2
    dsdtau = (math.pi / 2) * np.cosh(tau) * sech2
    u = 0.5 * length * one_minus
    v = 0.5 * length * one_plus
    w = 0.5 * length * (h / 2) * dsdtau
    even = (k % 2) == 0
    keep = (u > 0) & (v > 0) & (w > 0)
    return u[keep], v[keep], w[keep], even[keep]


def _tau_max(exponent_floor: float) -> float:
    a = min(max(exponent_floor, 1e-3), 1.0)
    return min(math.asinh(46.0 / (math.pi * a)), 7.0)


def _f_at(f: FunctionRepr, c: float, v: np.ndarray) -> np.ndarray:
    if isinstance(f, PowerSum):
        return f.at_offset(v)
    return evaluate(f, c + v)


def _left_floor(f: FunctionRepr) -> float:
    if isinstance(f, PowerSum):
        return 1.0 + f.min_exponent
    return 1.0


def kernel_quadrature(
    smooth_kernel: Callable[[np.ndarray], np.ndarray],
    weight_exponent: complex,
    f: FunctionRepr,
    c: float,
    x: float,
    quad: QuadratureSpec = QuadratureSpec(),
) -> EvalResult:
    """``int_c^x (x - t)^weight_exponent * smooth_kernel(x - t) * f(t) dt``.

    The error estimate is the difference between the rule at ``nodes`` and
    at twice as many nodes; the finer value is returned.  Failure means the
    estimate exceeds ``rel_tol`` times the L1 size of the integrand sum
    (for Gauss-Jacobi, never below the round-off floor of the nodes).
    """
    c, x = float(c), float(x)
    weight_exponent = complex(weight_exponent)
    length = x - c
    if length <= 0:
        raise DomainError(f"need x > c, got x={x}, c={c}")
    if quad.scheme == "tanh-sinh":
        floor = min(weight_exponent.real + 1.0, _left_floor(f))
        u, v, w, even = _tanh_sinh_grid(length, quad.nodes, _tau_max(floor))
        vals = w * np.power(u.astype(complex), weight_exponent) * smooth_kernel(u) * _f_at(f, c, v)
        fine = vals.sum()
        coarse = 2.0 * vals[even].sum()
        l1 = np.abs(vals).sum()
        n_used = vals.size
    else:
        a = weight_exponent.real
        results = []
        for n in (quad.nodes, 2 * quad.nodes):
            s, ws = roots_jacobi(n, a, 0.0)
            u = 0.5 * length * (1.0 - s)
            v = 0.5 * length * (1.0 + s)
            scale = (0.5 * length) ** (a + 1.0)
            extra = np.power(u.astype(complex), 1j * weight_exponent.imag)
            vals = scale * ws * extra * smooth_kernel(u) * _f_at(f, c, v)
            results.append((vals.sum(), np.abs(vals).sum()))
        (coarse, _), (fine, l1) = results
        n_used = 2 * quad.nodes
    err = float(abs(fine - coarse))
    if not np.isfinite(fine):
        raise QuadratureFailure("non-finite quadrature value")
    tol = quad.rel_tol
    if quad.scheme == "gauss-jacobi":
        # scipy's Jacobi nodes carry round-off growing like n^2 eps
        tol = max(tol, 4.0 * n_used**2 * np.finfo(float).eps)
    if err > tol * max(l1, 1e-300):
        raise QuadratureFailure(f"quadrature error estimate {err:.3e} exceeds {quad.rel_tol:.1e} x {l1:.3e}")
    return EvalResult(complex(fine), err, n_used, "quadrature")


def rl_quadrature(
    f: FunctionRepr, order, c: float, x: float, quad: QuadratureSpec = QuadratureSpec()
) -> EvalResult:
    """RL integral of order ``order`` (Re > 0) at ``x`` by weighted quadrature."""
    order = complex(order)
    if not order.real > 0:
        raise DomainError(f"rl_quadrature needs Re(order) > 0, got {order}")
    res = kernel_quadrature(lambda u: np.ones_like(u, dtype=complex), order - 1, f, c, x, quad)
    k = complex(rgamma(order))
    return EvalResult(res.value * k, res.err_estimate * abs(k), res.terms_used, "quadrature")


def _exact_value(ps: PowerSum, order: complex, x: float) -> EvalResult:
    out = ps.differintegrate(order)
    if x == ps.center:
        if all(mu.real > 0 for _, mu in out.terms):
            return EvalResult(0j, 0.0, len(out.terms), "exact")
        raise DomainError("differintegral is singular or undefined at the base point")
    return EvalResult(out(x), 0.0, len(out.terms), "exact")


def rl_differintegrate(
    f: FunctionRepr,
    order,
    c: float,
    x: float,
    trunc: Truncation = Truncation(),
    quad: QuadratureSpec = QuadratureSpec(),
) -> EvalResult:
    """RL differintegral of ``f`` at ``x``: Re(order) > 0 integrates, otherwise differentiates.

    A derivative of order ``s`` is ``d^n/dx^n I^(n - s)`` with
    ``n = floor(Re s) + 1``.  For callables the outer derivative is a
    Richardson-extrapolated central difference (accuracy about 1e-6).
    """
    order = complex(order)
    c, x = float(c), float(x)
    if x < c:
        raise DomainError(f"need x > c, got x={x}, c={c}")
    if order == 0:
        return EvalResult(complex(evaluate(f, np.array([x]))[0]), 0.0, 1, "exact")
    ps = as_powersum(f, c)
    if ps is not None:
        res = _exact_value(ps, order, x)
        if isinstance(f, Exponential) and x > c:
            # Taylor tail proxy: size of the last retained term after the operator
            last = PowerSum.unchecked(c, ps.terms[-1:]).differintegrate(order)
            tail = abs(last(x)) if last.terms else 0.0
            return EvalResult(res.value, tail, res.terms_used, "exact")
        return res
    if x == c:
        raise DomainError("callable differintegrals are not evaluated at the base point")
    if order.real > 0:
        res = rl_quadrature(f, order, c, x, quad)
        if res.err_estimate > 1e2 * trunc.rel_tol * max(abs(res.value), 1.0):
            raise QuadratureFailure(f"quadrature error {res.err_estimate:.3e} too large")
        return res
    s = -order
    n = math.floor(s.real) + 1
    if s.imag == 0 and s.real == int(s.real):
        # classical derivative of integer order
        m = int(s.real)
        return EvalResult(derivative_value(f, m, x), 0.0, 1, "exact" if f.derivative else "quadrature")
    if f.smoothness_order < n:
        raise SmoothnessError(f"{f.name}: RL derivative of order {s} needs smoothness {n}, have {f.smoothness_order}")
    h = (x - c) * 1e-3
    inner = n - s

    def outer(y: float) -> complex:
        return rl_quadrature(f, inner, c, y, quad).value

    value, err = richardson_derivative(outer, x, n, h)
    return EvalResult(value, err, 1, "quadrature")
