"""Prabhakar-family operators as series of Riemann-Liouville differintegrals.

Every operator here has the shape ``prefactor * sum_n w_n I^{s_n}`` with
signed orders ``s_n`` (positive real part integrates, otherwise
differentiates).  :class:`DifferintegralSeries` is that shape; the public
functions only differ in how they generate ``(w_n, s_n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Iterator

import numpy as np

from .errors import ConditionError, DomainError, NonConvergence, RangeError, SmoothnessError
from .funcspace import (
    CallableFunction,
    EvalResult,
    Exponential,
    FunctionRepr,
    PowerSum,
    QuadratureSpec,
    as_powersum,
    derivative_value,
    evaluate,
    kernel_quadrature,
    richardson_derivative,
    rl_differintegrate,
)
from .special import (
    Truncation,
    check_conditions,
    gen_binomial,
    is_gamma_pole,
    ml_coefficients,
    ml_polyval,
    pochhammer_term,
)

__all__ = [
    "ParamSet",
    "ABConfig",
    "IterationOrder",
    "DifferintegralSeries",
    "prabhakar_operator",
    "prabhakar_series",
    "prabhakar_quadrature",
    "prabhakar_derivative",
    "prabhakar_left_inverse_form",
    "ab_derivative_r",
    "ab_derivative_r_operator",
    "ab_derivative_c",
    "ab_integral",
    "ab_integral_operator",
    "iterated_ab",
    "iterated_ab_operator",
    "iterated_prabhakar",
    "specialize_model",
    "apply_specialized",
]

_DEFAULT_TRUNC = Truncation()
_DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class ParamSet:
    """Parameters (alpha, beta, omega, rho, kappa) and base point c of a generalised Prabhakar operator."""

    alpha: complex
    beta: complex
    omega: complex
    rho: complex
    kappa: complex = 1
    c: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "omega", "rho", "kappa"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        object.__setattr__(self, "c", float(self.c))
        check_conditions(self.alpha, self.beta, self.kappa, require_beta=False)

    def require_integral(self) -> None:
        check_conditions(self.alpha, self.beta, self.kappa, require_beta=True)

    def require_classical(self) -> None:
        if self.kappa != 1:
            raise ConditionError(f"this operation needs kappa = 1, got {self.kappa}")


def _unit(alpha: float) -> float:
    return 1.0


@dataclass(frozen=True)
class ABConfig:
    """Atangana-Baleanu order ``alpha`` in (0, 1) and normalisation B(alpha)."""

    alpha: float
    b_multiplier: Callable[[float], float] = _unit

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise RangeError(f"AB order must lie in (0, 1), got {self.alpha}")
        if not self.b_multiplier(self.alpha) > 0:
            raise RangeError("B(alpha) must be positive")

    @property
    def B(self) -> float:
        return float(self.b_multiplier(self.alpha))

    @property
    def lam(self) -> float:
        return -self.alpha / (1 - self.alpha)


@dataclass(frozen=True)
class IterationOrder:
    """Iteration exponent nu and the derivative count m of the defining formula."""

    nu: complex
    beta: complex

    @property
    def m(self) -> int:
        return max(0, math.floor((-complex(self.nu) * complex(self.beta)).real) + 1)


# --- the series engine -----------------------------------------------------


@dataclass(frozen=True)
class DifferintegralSeries:
    """``prefactor * sum_n w_n I^{s_n}`` about base point ``c``.

    ``terms`` returns a fresh iterator of ``(w_n, s_n)``; a finite iterator
    means the series terminates exactly.
    """

    terms: Callable[[], Iterable[tuple[complex, complex]]]
    c: float
    prefactor: complex = 1
    label: str = "series"

    def _walk(self, term_value, trunc: Truncation):
        total = 0j
        small = 0
        used = 0
        last = 0.0
        for w, s in self.terms():
            if used >= trunc.max_terms:
                if last > math.sqrt(trunc.rel_tol) * abs(total):
                    raise NonConvergence(f"{self.label}: not converged after {used} terms (last {last:.3e})")
                return total, used, last, True
            val = term_value(w, s) if w != 0 else 0j
            total += val
            used += 1
            last = abs(val)
            if last <= trunc.rel_tol * abs(total):
                small += 1
                if small >= trunc.consecutive_small:
                    return total, used, last, True
            else:
                small = 0
        return total, used, 0.0, False

    def powersum(self, f: FunctionRepr, x_ref: float, trunc: Truncation = _DEFAULT_TRUNC) -> PowerSum:
        """The result as a power sum, truncated for accuracy on ``(c, x_ref]``."""
        ps = as_powersum(f, self.c)
        if ps is None:
            raise DomainError(f"{self.label}: a function-valued result needs a power-sum input")
        pieces: list[PowerSum] = []

        def term_value(w, s):
            piece = ps.differintegrate(s).scaled(w)
            pieces.append(piece)
            return piece(x_ref)

        self._walk(term_value, trunc)
        terms = [t for piece in pieces for t in piece.terms]
        k = complex(self.prefactor)
        return PowerSum.unchecked(self.c, ((k * a, mu) for a, mu in terms)).simplified()

    def __call__(
        self,
        f: FunctionRepr,
        x: float,
        trunc: Truncation = _DEFAULT_TRUNC,
        quad: QuadratureSpec = _DEFAULT_QUAD,
    ) -> EvalResult:
        x = float(x)
        if x < self.c:
            raise DomainError(f"need x > c, got x={x}, c={self.c}")
        ps = as_powersum(f, self.c)
        quad_err = [0.0]
        if ps is not None:

            def term_value(w, s):
                piece = ps.differintegrate(s)
                return w * piece(x) if piece.terms else 0j

        else:

            def term_value(w, s):
                r = rl_differintegrate(f, s, self.c, x, trunc, quad)
                quad_err[0] += abs(w) * r.err_estimate
                return w * r.value

        total, used, last, _ = self._walk(term_value, trunc)
        k = complex(self.prefactor)
        method = "series" if ps is not None else "series+quadrature"
        return EvalResult(k * total, abs(k) * (last + quad_err[0]), used, method)


def _prabhakar_terms(alpha, shift, omega, rho, kappa) -> Callable[[], Iterator[tuple[complex, complex]]]:
    alpha, shift, omega, rho, kappa = map(complex, (alpha, shift, omega, rho, kappa))
    if omega == 0:
        last = 0
    elif is_gamma_pole(rho):
        last = -round(rho.real) if kappa == 1 else 0
    else:
        last = None

    def gen():
        n = 0
        while last is None or n <= last:
            yield pochhammer_term(rho, kappa, n, omega), alpha * n + shift
            n += 1

    return gen


def prabhakar_operator(
    p: ParamSet, shift: complex | None = None, rho: complex | None = None, prefactor: complex = 1
) -> DifferintegralSeries:
    """sum_n (rho)_{kappa n} omega^n / n! I^{alpha n + shift}; shift defaults to beta."""
    shift = p.beta if shift is None else shift
    rho = p.rho if rho is None else rho
    return DifferintegralSeries(
        _prabhakar_terms(p.alpha, shift, p.omega, rho, p.kappa), p.c, prefactor, label="prabhakar"
    )


def prabhakar_series(
    p: ParamSet,
    f: FunctionRepr,
    x: float,
    trunc: Truncation = _DEFAULT_TRUNC,
    quad: QuadratureSpec = _DEFAULT_QUAD,
) -> EvalResult:
    """Generalised Prabhakar integral as a series of RL integrals of orders alpha n + beta."""
    p.require_integral()
    return prabhakar_operator(p)(f, x, trunc, quad)


def prabhakar_quadrature(
    p: ParamSet,
    f: FunctionRepr,
    x: float,
    quad: QuadratureSpec = _DEFAULT_QUAD,
    trunc: Truncation = _DEFAULT_TRUNC,
) -> EvalResult:
    """Generalised Prabhakar integral from its kernel, the Mittag-Leffler function under a quadrature."""
    p.require_integral()
    x = float(x)
    if x <= p.c:
        raise DomainError(f"need x > c, got x={x}, c={p.c}")
    zmax = abs(p.omega) * (x - p.c) ** p.alpha.real
    coeffs = ml_coefficients(p.alpha, p.beta, p.rho, p.kappa, zmax, trunc)
    alpha, omega = p.alpha, p.omega

    def smooth(u):
        return ml_polyval(coeffs, omega * np.power(u.astype(complex), alpha))

    res = kernel_quadrature(smooth, p.beta - 1, f, p.c, x, quad)
    return EvalResult(res.value, res.err_estimate, res.terms_used, "quadrature")


def _classical_derivative_of(op: DifferintegralSeries, m: int, f, x, trunc, quad) -> EvalResult:
    """d^m/dx^m of ``op f`` at x: exact on power sums, Richardson otherwise."""
    if m == 0:
        return op(f, x, trunc, quad)
    if as_powersum(f, op.c) is not None:
        ps = op.powersum(f, x, trunc).derivative(m)
        return EvalResult(ps(x), 0.0, len(ps.terms), "series")
    h = (x - op.c) * 1e-3
    value, err = richardson_derivative(lambda y: op(f, y, trunc, quad).value, x, m, h)
    return EvalResult(value, err, 1, "series+quadrature")


def prabhakar_derivative(
    p: ParamSet,
    f: FunctionRepr,
    x: float,
    trunc: Truncation = _DEFAULT_TRUNC,
    quad: QuadratureSpec = _DEFAULT_QUAD,
    method: str = "series",
) -> EvalResult:
    """Prabhakar derivative (RL type, kappa = 1).

    ``method="series"`` sums (-rho)_n omega^n / n! I^{alpha n - beta};
    ``method="definition"`` differentiates the integral of order m - beta
    with -rho classically m times, m = floor(Re beta) + 1.
    """
    p.require_classical()
    p.require_integral()
    if method == "series":
        return prabhakar_operator(p, shift=-p.beta, rho=-p.rho)(f, x, trunc, quad)
    if method == "definition":
        m = math.floor(p.beta.real) + 1
        op = prabhakar_operator(p, shift=m - p.beta, rho=-p.rho)
        return _classical_derivative_of(op, m, f, x, trunc, quad)
    raise ValueError(f"unknown method {method!r}")


def prabhakar_left_inverse_form(
    p: ParamSet,
    gamma,
    f: FunctionRepr,
    x: float,
    trunc: Truncation = _DEFAULT_TRUNC,
    quad: QuadratureSpec = _DEFAULT_QUAD,
) -> EvalResult:
    """RL derivative of order beta + gamma applied to the Prabhakar integral (alpha, gamma, omega, -rho)."""
    p.require_classical()
    p.require_integral()
    gamma = complex(gamma)
    if not gamma.real > 0:
        raise ConditionError(f"need Re(gamma) > 0, got {gamma}")
    order = p.beta + gamma
    inner = prabhakar_operator(p, shift=gamma, rho=-p.rho)
    if as_powersum(f, p.c) is not None:
        ps = inner.powersum(f, x, trunc).differintegrate(-order)
        return EvalResult(ps(x), 0.0, len(ps.terms), "series")
    # callables: fold I^(n - order) into the inner series, then n classical derivatives
    n = math.floor(order.real) + 1
    folded = prabhakar_operator(p, shift=gamma + n - order, rho=-p.rho)
    return _classical_derivative_of(folded, n, f, x, trunc, quad)


# --- Atangana-Baleanu family -------------------------------------------------


def _geometric_terms(lam: float, alpha: float, shift: float):
    def gen():
        w = 1.0
        n = 0
        while True:
            yield w, alpha * n + shift
            w *= lam
            n += 1

    return gen


def _derivative_repr(f: FunctionRepr, c: float) -> FunctionRepr:
    ps = as_powersum(f, c)
    if ps is not None:
        d = ps.derivative(1)
        if not all(mu.real > -1 for _, mu in d.terms):
            raise SmoothnessError("f' is not integrable at the base point")
        return PowerSum(c, d.terms)
    if f.derivative is None and f.smoothness_order < 1:
        raise SmoothnessError(f"{f.name}: no first derivative available")

    def ev(t):
        return np.array([derivative_value(f, 1, float(s)) for s in np.ravel(t)], dtype=complex).reshape(np.shape(t))

    return CallableFunction(ev, max(f.smoothness_order - 1, 0), None, name=f"{f.name}'")


def _ab_kernel(cfg: ABConfig, x: float, c: float, trunc: Truncation):
    zmax = abs(cfg.lam) * (x - c) ** cfg.alpha
    coeffs = ml_coefficients(cfg.alpha, 1.0, 1.0, 1.0, zmax, trunc)
    return lambda u: ml_polyval(coeffs, cfg.lam * np.power(u, cfg.alpha))


def ab_derivative_r_operator(cfg: ABConfig, c: float) -> DifferintegralSeries:
    """The ABR derivative as B/(1-a) sum_n lam^n I^{a n}."""
    return DifferintegralSeries(_geometric_terms(cfg.lam, cfg.alpha, 0.0), c, cfg.B / (1 - cfg.alpha), label="abr")


def ab_derivative_r(
    cfg: ABConfig,
    f: FunctionRepr,
    c: float,
    x: float,
    trunc: Truncation = _DEFAULT_TRUNC,
    quad: QuadratureSpec = _DEFAULT_QUAD,
    method: str = "series",
) -> EvalResult:
    """AB derivative of Riemann-Liouville type.

    The series form is B/(1-a) sum_n lam^n I^{a n} f, lam = -a/(1-a): the
    outer d/dx of the defining formula shifts every order down by one.
    ``method="quadrature"`` differentiates the kernel integral numerically.
    """
    pref = cfg.B / (1 - cfg.alpha)
    if method == "series":
        return ab_derivative_r_operator(cfg, c)(f, x, trunc, quad)
    if method == "quadrature":
        c, x = float(c), float(x)

        def integral(y: float) -> complex:
            kern = _ab_kernel(cfg, y, c, trunc)
            return kernel_quadrature(kern, 0.0, f, c, y, quad).value

        value, err = richardson_derivative(integral, x, 1, (x - c) * 1e-3)
        return EvalResult(pref * value, pref * err, 1, "quadrature")
    raise ValueError(f"unknown method {method!r}")


def ab_derivative_c(
    cfg: ABConfig,
    f: FunctionRepr,
    c: float,
    x: float,
    trunc: Truncation = _DEFAULT_TRUNC,
    quad: QuadratureSpec = _DEFAULT_QUAD,
    method: str = "series",
) -> EvalResult:
    """AB derivative of Caputo type: B/(1-a) sum_n lam^n I^{a n + 1} f'."""
    pref = cfg.B / (1 - cfg.alpha)
    df = _derivative_repr(f, c)
    if method == "series":
        op = DifferintegralSeries(_geometric_terms(cfg.lam, cfg.alpha, 1.0), c, pref, label="abc")
        return op(df, x, trunc, quad)
    if method == "quadrature":
        res = kernel_quadrature(_ab_kernel(cfg, x, c, trunc), 0.0, df, c, x, quad)
        return EvalResult(pref * res.value, pref * res.err_estimate, res.terms_used, "quadrature")
    raise ValueError(f"unknown method {method!r}")


def ab_integral_operator(cfg: ABConfig, c: float) -> DifferintegralSeries:
    a, B = cfg.alpha, cfg.B

    def gen():
        yield (1 - a) / B, 0.0
        yield a / B, a

    return DifferintegralSeries(gen, c, 1, label="ab_integral")


def ab_integral(
    cfg: ABConfig,
    f: FunctionRepr,
    c: float,
    x: float,
    trunc: Truncation = _DEFAULT_TRUNC,
    quad: QuadratureSpec = _DEFAULT_QUAD,
) -> EvalResult:
    """AB integral (1-a)/B f(x) + a/B I^a f(x)."""
    return ab_integral_operator(cfg, c)(f, x, trunc, quad)


def iterated_ab_operator(cfg_alpha: float, b_multiplier, rho: float, c: float) -> DifferintegralSeries:
    """The rho-th iterate of the AB integral as sum_n C(rho,n)(1-a)^(rho-n) a^n / B^rho I^{a n}.

    Takes the order directly so the closed interval [0, 1] is allowed.
    """
    a = float(cfg_alpha)
    rho = float(rho)
    if not 0 <= a <= 1:
        raise RangeError(f"iterated AB order must lie in [0, 1], got {a}")
    B = float(b_multiplier(a))
    if a == 0:
        return DifferintegralSeries(lambda: iter([(B**-rho, 0.0)]), c, 1, label="iab")
    if a == 1:
        return DifferintegralSeries(lambda: iter([(B**-rho, rho)]), c, 1, label="iab")
    last = int(rho) if rho >= 0 and rho == int(rho) else None

    def gen():
        n = 0
        while last is None or n <= last:
            yield gen_binomial(rho, n) * (1 - a) ** (rho - n) * a**n / B**rho, a * n
            n += 1

    return DifferintegralSeries(gen, c, 1, label="iab")


def iterated_ab(
    cfg: ABConfig | tuple,
    rho: float,
    f: FunctionRepr,
    c: float,
    x: float,
    trunc: Truncation = _DEFAULT_TRUNC,
    quad: QuadratureSpec = _DEFAULT_QUAD,
) -> EvalResult:
    """Iterated AB differintegral; ``cfg`` may also be ``(alpha, B)`` to reach alpha = 0 or 1."""
    if isinstance(cfg, ABConfig):
        alpha, b = cfg.alpha, cfg.b_multiplier
    else:
        alpha, b = cfg
    return iterated_ab_operator(alpha, b, rho, c)(f, x, trunc, quad)


# --- fractional iteration ---------------------------------------------------


def iterated_prabhakar(
    p: ParamSet,
    nu,
    f: FunctionRepr,
    x: float,
    trunc: Truncation = _DEFAULT_TRUNC,
    quad: QuadratureSpec = _DEFAULT_QUAD,
    method: str = "series",
) -> EvalResult:
    """nu-th iterate of the Prabhakar integral (kappa = 1).

    ``method="series"`` sums (nu rho)_n omega^n / n! I^{alpha n + nu beta}
    for either sign of Re(nu beta); ``method="definition"`` differentiates
    the integral with (m + nu beta, nu rho) classically m times.
    """
    p.require_classical()
    p.require_integral()
    nu = complex(nu)
    if method == "series":
        return prabhakar_operator(p, shift=nu * p.beta, rho=nu * p.rho)(f, x, trunc, quad)
    if method == "definition":
        m = IterationOrder(nu, p.beta).m
        op = prabhakar_operator(p, shift=m + nu * p.beta, rho=nu * p.rho)
        return _classical_derivative_of(op, m, f, x, trunc, quad)
    raise ValueError(f"unknown method {method!r}")


# --- special cases of the generalised model -----------------------------------


def specialize_model(model: str, **inputs) -> tuple[ParamSet, complex, str]:
    """Express a model as (generalised Prabhakar parameters, prefactor, post-operation).

    ``model`` is ``prabhakar`` (inputs ``p``), ``abr``/``abc`` (``cfg``,
    ``c``) or ``iab`` (``cfg``, ``rho``, ``c``).  The post-operation is
    ``none``, ``d_dx`` (differentiate the result) or ``on_derivative``
    (apply the operator to f').  For ``iab`` beta is 0, so the n = 0 term
    is the identity.
    """
    if model == "prabhakar":
        p = inputs["p"]
        return replace(p, kappa=1), 1 + 0j, "none"
    if model in ("abr", "abc", "iab"):
        cfg = inputs["cfg"]
        c = float(inputs.get("c", 0.0))
        if not isinstance(cfg, ABConfig):
            raise RangeError("AB models need an ABConfig")
        a, B = cfg.alpha, cfg.B
        if model == "abr":
            return ParamSet(a, 1, -a / (1 - a), 1, 1, c), complex(B / (1 - a)), "d_dx"
        if model == "abc":
            return ParamSet(a, 1, -a / (1 - a), 1, 1, c), complex(B / (1 - a)), "on_derivative"
        rho = float(inputs["rho"])
        # binom(rho, n) (1-a)^(rho-n) a^n = (1-a)^rho (-rho)_n / n! (-a/(1-a))^n
        return ParamSet(a, 0, -a / (1 - a), -rho, 1, c), complex(((1 - a) / B) ** rho), "none"
    raise RangeError(f"unknown model {model!r}")


def apply_specialized(
    spec: tuple[ParamSet, complex, str],
    f: FunctionRepr,
    x: float,
    trunc: Truncation = _DEFAULT_TRUNC,
    quad: QuadratureSpec = _DEFAULT_QUAD,
) -> EvalResult:
    """Evaluate a model through its generalised Prabhakar form from :func:`specialize_model`."""
    p, pref, post = spec
    op = prabhakar_operator(p, prefactor=pref)
    if post == "none":
        return op(f, x, trunc, quad)
    if post == "d_dx":
        return _classical_derivative_of(op, 1, f, x, trunc, quad)
    if post == "on_derivative":
        return op(_derivative_repr(f, p.c), x, trunc, quad)
    raise ValueError(f"unknown post-operation {post!r}")
