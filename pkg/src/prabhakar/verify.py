"""Numerical checks of the operator identities, with machine-readable reports.

Each checker compares two independently assembled sides of an identity on
a grid of points and returns :class:`IdentityReport` objects.  Power-sum
inputs go through exact function-valued compositions, so only round-off and
series truncation separate the two sides.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .funcspace import FunctionRepr, PowerSum, named_function
from .operators import (
    ABConfig,
    ParamSet,
    ab_derivative_c,
    ab_derivative_r,
    apply_specialized,
    iterated_ab,
    prabhakar_derivative,
    prabhakar_left_inverse_form,
    prabhakar_operator,
    prabhakar_quadrature,
    prabhakar_series,
    specialize_model,
)
from .rules import product_rule_apply
from .special import Truncation, beta, is_gamma_pole

__all__ = [
    "IdentityReport",
    "SuiteConfig",
    "ConfigWarning",
    "DEFAULT_TOLERANCES",
    "relative_deviation",
    "polynomial_corpus",
    "series_tractable",
    "draw_params",
    "check_semigroup",
    "check_left_inverse",
    "check_rl_commutation",
    "check_beta_identity",
    "check_iterated_semigroup",
    "check_cross_method",
    "check_product_rule",
    "check_special_cases",
    "run_suite",
    "suite_passed",
]

DEFAULT_TOLERANCES = {
    "cross_method": 1e-6,
    "semigroup": 1e-8,
    "left_inverse.recovery": 1e-6,
    "left_inverse.gamma_independence": 1e-8,
    "rl_commutation.eqn1": 1e-10,
    "rl_commutation.eqn2": 1e-10,
    "rl_commutation.eqn2_diagnostic": float("nan"),
    "beta_identity": 1e-12,
    "iterated_semigroup": 1e-8,
    "product_rule": 1e-8,
    "special_cases": 1e-10,
}

_ORDER = list(DEFAULT_TOLERANCES)
_FLOOR = 1e-8


class ConfigWarning(UserWarning):
    pass


def relative_deviation(lhs: complex, rhs: complex) -> float:
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), _FLOOR)


def _cjson(z):
    z = complex(z)
    return [z.real, z.imag]


def _params_json(p) -> dict:
    if isinstance(p, ParamSet):
        return {k: (_cjson(v) if isinstance(v, complex) else v) for k, v in asdict(p).items()}
    if isinstance(p, dict):
        return {k: (_cjson(v) if isinstance(v, complex) else v) for k, v in p.items()}
    return {"value": repr(p)}


@dataclass
class IdentityReport:
    """Outcome of one identity over all draws and sample points.

    ``passed`` is None for diagnostic reports, which measure a deviation
    without asserting anything about it.
    """

    identity_id: str
    param_draws: int = 0
    sample_points: list = field(default_factory=list)
    max_abs_dev: float = 0.0
    max_rel_dev: float = 0.0
    passed: bool | None = True
    tolerance: float = 0.0
    witnesses: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    @property
    def diagnostic(self) -> bool:
        return self.passed is None

    def record(self, params, x, lhs, rhs) -> None:
        """Fold one comparison in, keeping the worst point as witness."""
        lhs, rhs = complex(lhs), complex(rhs)
        rel = relative_deviation(lhs, rhs)
        self.max_abs_dev = max(self.max_abs_dev, abs(lhs - rhs))
        if rel >= self.max_rel_dev or not self.witnesses:
            self.max_rel_dev = max(self.max_rel_dev, rel)
            self.witnesses = [{"params": _params_json(params), "x": x, "lhs": _cjson(lhs), "rhs": _cjson(rhs)}]
        if x not in self.sample_points:
            self.sample_points.append(x)

    def fail(self, params, x, exc: Exception) -> None:
        self.errors.append({"params": _params_json(params), "x": x, "error": f"{type(exc).__name__}: {exc}"})

    def finish(self) -> "IdentityReport":
        self.sample_points.sort()
        if self.passed is not None:
            self.passed = not self.errors and self.max_rel_dev <= self.tolerance
        return self

    def merge(self, other: "IdentityReport") -> "IdentityReport":
        """Combine two reports of the same identity (different draws)."""
        out = IdentityReport(self.identity_id, self.param_draws + other.param_draws, tolerance=self.tolerance)
        out.passed = None if self.passed is None else True
        out.sample_points = sorted(set(self.sample_points) | set(other.sample_points))
        out.max_abs_dev = max(self.max_abs_dev, other.max_abs_dev)
        out.max_rel_dev = max(self.max_rel_dev, other.max_rel_dev)
        worst = self if self.max_rel_dev >= other.max_rel_dev else other
        out.witnesses = list(worst.witnesses)
        out.errors = self.errors + other.errors
        return out.finish()

    def to_dict(self) -> dict:
        return {
            "identity_id": self.identity_id,
            "param_draws": self.param_draws,
            "sample_points": list(self.sample_points),
            "max_abs_dev": self.max_abs_dev,
            "max_rel_dev": self.max_rel_dev,
            "pass": self.passed,
            "tolerance": self.tolerance,
            "witnesses": self.witnesses,
            "errors": self.errors,
        }


def polynomial_corpus(c: float = 0.0) -> list[PowerSum]:
    """1, x, x^2, x^3 + x as power sums about c."""
    return [
        PowerSum.polynomial([1], c),
        PowerSum.polynomial([0, 1], c),
        PowerSum.polynomial([0, 0, 1], c),
        PowerSum.polynomial([0, 1, 0, 1], c),
    ]


@dataclass
class SuiteConfig:
    """Seeded suite settings; ``x_grid`` holds offsets from the base point, in (0, 2]."""

    seed: int = 0
    draws: int = 20
    tol_map: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    x_grid: tuple = (0.25, 0.5, 0.75, 1.0)
    corpus: list = field(default_factory=polynomial_corpus)
    base_point: float = 0.0
    trunc: Truncation = field(default_factory=Truncation)

    def __post_init__(self):
        if self.draws < 0:
            raise ValueError("draws must be >= 0")
        if not all(0 < v <= 2 for v in self.x_grid):
            raise ValueError("x_grid offsets must lie in (0, 2]")

    def tol(self, identity: str) -> float:
        return self.tol_map.get(identity, DEFAULT_TOLERANCES[identity])

    @property
    def points(self) -> list[float]:
        return [self.base_point + v for v in self.x_grid]


def _near_pole(z: float, gap: float = 1e-3) -> bool:
    return z <= gap and abs(z - round(z)) < gap


def series_tractable(p: ParamSet, span: float, trunc: Truncation = Truncation(), max_growth: float = 1e3) -> bool:
    """Whether sum_n (rho)_{kappa n} (omega span^alpha)^n / (n! Gamma(alpha n + beta)) is summable in doubles.

    The series is entire whenever kappa - alpha < 1, but near that edge
    the terms first grow for hundreds of indices.  Reject when the largest
    term exceeds ``max_growth`` times the first one (cancellation) or when
    the terms have not fallen below ``trunc.rel_tol`` of the peak within
    ``trunc.max_terms``.
    """
    z = complex(p.omega) * span ** p.alpha.real
    if z == 0 or is_gamma_pole(p.rho):
        return True
    logz = math.log(abs(z))
    lg0 = math.lgamma(p.beta.real)
    peak = -lg0
    for n in range(1, trunc.max_terms):
        try:
            rho_part = math.lgamma(p.rho.real + p.kappa.real * n) - math.lgamma(p.rho.real)
        except ValueError:  # a pole of the numerator Gamma: untractable anyway
            return False
        lt = rho_part + n * logz - math.lgamma(n + 1) - math.lgamma(p.alpha.real * n + p.beta.real)
        peak = max(peak, lt)
        if peak + lg0 > math.log(max_growth):
            return False
        if n > 8 and lt < peak + math.log(trunc.rel_tol) - 3.0:
            return True
    return False


def draw_params(
    rng: np.random.Generator, c: float = 0.0, kappa_one: bool = False, span: float = 2.0
) -> ParamSet:
    """One draw from the documented ranges that is numerically tractable on [c, c + span].

    Satisfies the convergence conditions by construction; draws whose
    series cannot be summed in double precision are redrawn.
    """
    while True:
        alpha = rng.uniform(0.2, 1.5)
        beta_ = rng.uniform(0.2, 1.5)
        kappa = 1.0 if kappa_one else rng.uniform(0.5, min(1.2, alpha + 0.99))
        rho = rng.uniform(-2.0, 2.0)
        while _near_pole(rho):
            rho = rng.uniform(-2.0, 2.0)
        omega = rng.uniform(-1.0, 1.0)
        p = ParamSet(alpha, beta_, omega, rho, kappa, c)
        if series_tractable(p, span):
            return p


def _report(cfg: SuiteConfig, identity: str, draws: int = 1) -> IdentityReport:
    rep = IdentityReport(identity, draws, tolerance=cfg.tol(identity))
    if math.isnan(rep.tolerance):
        rep.passed = None
    return rep


def _compare(rep: IdentityReport, params, points, lhs_fn, rhs_fn) -> None:
    for x in points:
        try:
            rep.record(params, x, lhs_fn(x), rhs_fn(x))
        except Exception as exc:  # recorded per witness, never raised
            rep.fail(params, x, exc)


def check_semigroup(p1: ParamSet, p2: ParamSet, f: FunctionRepr, cfg: SuiteConfig) -> IdentityReport:
    """E(beta1, rho1) E(beta2, rho2) f against E(beta1 + beta2, rho1 + rho2) f."""
    rep = _report(cfg, "semigroup")
    params = {"p1": _params_json(p1), "p2": _params_json(p2)}
    xs = cfg.points
    try:
        for p in (p1, p2):
            p.require_classical()
            p.require_integral()
        if p1.alpha != p2.alpha or p1.omega != p2.omega or p1.c != p2.c:
            raise ValueError("semigroup needs shared alpha, omega and c")
        inner = prabhakar_operator(p2).powersum(f, max(xs), cfg.trunc)
        lhs = prabhakar_operator(p1).powersum(inner, max(xs), cfg.trunc)
        joint = ParamSet(p1.alpha, p1.beta + p2.beta, p1.omega, p1.rho + p2.rho, 1, p1.c)
    except Exception as exc:
        rep.fail(params, None, exc)
        return rep.finish()
    _compare(rep, params, xs, lhs, lambda x: prabhakar_series(joint, f, x, cfg.trunc).value)
    return rep.finish()


def check_left_inverse(p: ParamSet, gammas, f: FunctionRepr, cfg: SuiteConfig) -> list[IdentityReport]:
    """Recovery of f through the left inverse, and independence of the auxiliary order gamma."""
    rec = _report(cfg, "left_inverse.recovery")
    ind = _report(cfg, "left_inverse.gamma_independence")
    xs = cfg.points
    try:
        image = prabhakar_operator(p).powersum(f, max(xs), cfg.trunc)
    except Exception as exc:
        rec.fail(p, None, exc)
        return [rec.finish(), ind.finish()]
    for g in gammas:
        params = dict(_params_json(p), gamma=_cjson(g))
        _compare(rec, params, xs, lambda x: prabhakar_left_inverse_form(p, g, image, x, cfg.trunc).value, f)
        _compare(
            ind,
            params,
            xs,
            lambda x: prabhakar_left_inverse_form(p, g, f, x, cfg.trunc).value,
            lambda x: prabhakar_derivative(p, f, x, cfg.trunc).value,
        )
    return [rec.finish(), ind.finish()]


def check_rl_commutation(p: ParamSet, mu, f: FunctionRepr, cfg: SuiteConfig) -> list[IdentityReport]:
    """I^mu E f = E(beta + mu) f, and (Re mu > 0) I^mu E f = E I^mu f.

    For Re mu <= 0 the second identity is only measured, as a diagnostic;
    it genuinely fails at negative integers mu, where I^mu f loses the
    boundary terms.  The first report is omitted when Re mu <= -Re beta.
    """
    mu = complex(mu)
    xs = cfg.points
    params = dict(_params_json(p), mu=_cjson(mu))
    out = []
    e1 = _report(cfg, "rl_commutation.eqn1")
    try:
        image = prabhakar_operator(p).powersum(f, max(xs), cfg.trunc)
        lhs = image.differintegrate(mu)
    except Exception as exc:
        e1.fail(params, None, exc)
        return [e1.finish()]
    # eqn1 only claims anything for Re(mu) > -Re(beta); otherwise skip it
    if mu.real > -p.beta.real:
        shifted = prabhakar_operator(p, shift=p.beta + mu)
        _compare(e1, params, xs, lhs, lambda x: shifted(f, x, cfg.trunc).value)
        out.append(e1.finish())
    e2 = _report(cfg, "rl_commutation.eqn2" if mu.real > 0 else "rl_commutation.eqn2_diagnostic")
    if mu.real <= 0:
        e2.passed = None
    ps = f if isinstance(f, PowerSum) else None
    try:
        moved = ps.differintegrate(mu)
        rhs = prabhakar_operator(p).powersum(moved, max(xs), cfg.trunc)
    except Exception as exc:
        e2.fail(params, None, exc)
        out.append(e2.finish())
        return out
    _compare(e2, params, xs, lhs, rhs)
    out.append(e2.finish())
    return out


def check_beta_identity(rho1, rho2, kmax: int, cfg: SuiteConfig | None = None) -> IdentityReport:
    """sum_{m+n=k} B(rho1+n, rho2+m) k! / (B(rho1, rho2) n! m!) = 1 for k = 0..kmax."""
    cfg = cfg or SuiteConfig()
    rep = _report(cfg, "beta_identity")
    params = {"rho1": _cjson(rho1), "rho2": _cjson(rho2)}
    try:
        base = beta(rho1, rho2)
        for k in range(kmax + 1):
            s = 0j
            for n in range(k + 1):
                m = k - n
                s += beta(rho1 + n, rho2 + m) * math.comb(k, n)
            rep.record(params, k, s / base, 1.0)
    except Exception as exc:
        rep.fail(params, None, exc)
    return rep.finish()


def check_iterated_semigroup(p: ParamSet, mu, nu, f: FunctionRepr, cfg: SuiteConfig) -> IdentityReport:
    """(E)^mu (E)^nu f = (E)^(mu + nu) f for Re(nu beta) > 0."""
    rep = _report(cfg, "iterated_semigroup")
    mu, nu = complex(mu), complex(nu)
    params = dict(_params_json(p), mu=_cjson(mu), nu=_cjson(nu))
    xs = cfg.points
    try:
        if not (nu * p.beta).real > 0:
            raise ValueError("need Re(nu beta) > 0")
        inner = prabhakar_operator(p, shift=nu * p.beta, rho=nu * p.rho).powersum(f, max(xs), cfg.trunc)
        lhs = prabhakar_operator(p, shift=mu * p.beta, rho=mu * p.rho).powersum(inner, max(xs), cfg.trunc)
        joint = prabhakar_operator(p, shift=(mu + nu) * p.beta, rho=(mu + nu) * p.rho)
    except Exception as exc:
        rep.fail(params, None, exc)
        return rep.finish()
    _compare(rep, params, xs, lhs, lambda x: joint(f, x, cfg.trunc).value)
    return rep.finish()


def check_cross_method(p: ParamSet, f: FunctionRepr, cfg: SuiteConfig) -> IdentityReport:
    """Series of RL integrals against quadrature of the Mittag-Leffler kernel."""
    rep = _report(cfg, "cross_method")
    params = _params_json(p)
    _compare(
        rep,
        params,
        cfg.points,
        lambda x: prabhakar_series(p, f, x, cfg.trunc).value,
        lambda x: prabhakar_quadrature(p, f, x, trunc=cfg.trunc).value,
    )
    return rep.finish()


def check_product_rule(p: ParamSet, f: PowerSum, g: PowerSum, cfg: SuiteConfig) -> IdentityReport:
    """Leibniz-rule value against the direct series on the expanded product f g."""
    rep = _report(cfg, "product_rule")
    params = _params_json(p)
    prod = PowerSum(
        p.c, tuple((a * b, mu + nu) for a, mu in f.terms for b, nu in g.terms)
    ).simplified()
    _compare(
        rep,
        params,
        cfg.points,
        lambda x: product_rule_apply(f, g, p, x).value,
        lambda x: prabhakar_series(p, prod, x, cfg.trunc).value,
    )
    return rep.finish()


def check_special_cases(alpha: float, rho: float, f: FunctionRepr, cfg: SuiteConfig) -> IdentityReport:
    """ABR, ABC and iterated AB through the generalised model against their own series."""
    rep = _report(cfg, "special_cases")
    c = cfg.base_point
    ab = ABConfig(alpha)
    params = {"alpha": alpha, "rho": rho}
    cases = [
        (specialize_model("abr", cfg=ab, c=c), lambda x: ab_derivative_r(ab, f, c, x, cfg.trunc).value),
        (specialize_model("abc", cfg=ab, c=c), lambda x: ab_derivative_c(ab, f, c, x, cfg.trunc).value),
        (specialize_model("iab", cfg=ab, rho=rho, c=c), lambda x: iterated_ab(ab, rho, f, c, x, cfg.trunc).value),
    ]
    for spec, direct in cases:
        _compare(rep, params, cfg.points, lambda x: apply_specialized(spec, f, x, cfg.trunc).value, direct)
    return rep.finish()


def _away_from_poles(rng: np.random.Generator, lo: float, hi: float) -> float:
    z = rng.uniform(lo, hi)
    while _near_pole(z, 0.1):
        z = rng.uniform(lo, hi)
    return z


def run_suite(cfg: SuiteConfig) -> list[IdentityReport]:
    """Run every checker over ``cfg.draws`` seeded parameter draws.

    Returns one merged report per identity, in a fixed order.  With
    ``draws == 0`` nothing runs and a ConfigWarning is issued.
    """
    if cfg.draws == 0:
        warnings.warn("draws=0: no identities checked, suite does not pass", ConfigWarning)
        return []
    rng = np.random.default_rng(cfg.seed)
    c = cfg.base_point
    gaussian = named_function("gaussian")
    merged: dict[str, IdentityReport] = {}

    def add(reps):
        for r in reps if isinstance(reps, list) else [reps]:
            merged[r.identity_id] = merged[r.identity_id].merge(r) if r.identity_id in merged else r

    for _ in range(cfg.draws):
        p = draw_params(rng, c, span=max(cfg.x_grid))
        for f in list(cfg.corpus) + [gaussian]:
            add(check_cross_method(p, f, cfg))

        q = draw_params(rng, c, kappa_one=True, span=max(cfg.x_grid))
        q2 = ParamSet(q.alpha, rng.uniform(0.2, 1.5), q.omega, _away_from_poles(rng, -2, 2), 1, c)
        for f in cfg.corpus:
            add(check_semigroup(q, q2, f, cfg))
            add(check_left_inverse(q, (0.3, 0.9, 1.6), f, cfg))
            add(check_iterated_semigroup(q, rng.uniform(-1.5, 1.5), rng.uniform(0.2, 1.5), f, cfg))

        mu = rng.uniform(0.1, 1.5)
        for f in cfg.corpus:
            add(check_rl_commutation(p, mu, f, cfg))
            add(check_rl_commutation(p, -0.3 * p.beta.real, f, cfg))
            add(check_rl_commutation(p, -1.0, f, cfg))

        r1, r2 = _away_from_poles(rng, -2, 2), _away_from_poles(rng, -2, 2)
        while _near_pole(r1 + r2, 0.1):
            r2 = _away_from_poles(rng, -2, 2)
        add(check_beta_identity(r1, r2, 10, cfg))

        deg_f, deg_g = rng.integers(0, 5, size=2)
        fpoly = PowerSum.polynomial(list(rng.uniform(-1, 1, deg_f + 1)), c)
        gpoly = PowerSum.polynomial(list(rng.uniform(-1, 1, deg_g + 1)), c)
        add(check_product_rule(p, fpoly, gpoly, cfg))

        a = float(rng.choice([0.25, 0.5, 0.75]))
        add(check_special_cases(a, rng.uniform(-1.5, 1.5), cfg.corpus[int(rng.integers(len(cfg.corpus)))], cfg))

    add(check_beta_identity(1.3, 2.7 + 0.5j, 10, cfg))
    reports = [merged[k] for k in _ORDER if k in merged]
    for r in reports:
        r.param_draws = cfg.draws
    return reports


def suite_passed(reports: list[IdentityReport]) -> bool:
    """AND of all asserted identities; an empty run does not pass."""
    asserted = [r for r in reports if not r.diagnostic]
    return bool(asserted) and all(r.passed for r in asserted)
