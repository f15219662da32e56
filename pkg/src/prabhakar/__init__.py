"""Generalised Prabhakar fractional operators as series of Riemann-Liouville differintegrals."""

from .errors import (
    ConditionError,
    ConfigError,
    DomainError,
    NonConvergence,
    PoleError,
    PrabhakarError,
    QuadratureFailure,
    RangeError,
    SmoothnessError,
)
from .funcspace import (
    CallableFunction,
    EvalResult,
    Exponential,
    PowerSum,
    QuadratureSpec,
    named_function,
    rl_differintegrate,
)
from .operators import (
    ABConfig,
    IterationOrder,
    ParamSet,
    ab_derivative_c,
    ab_derivative_r,
    ab_integral,
    apply_specialized,
    iterated_ab,
    iterated_prabhakar,
    prabhakar_derivative,
    prabhakar_left_inverse_form,
    prabhakar_operator,
    prabhakar_quadrature,
    prabhakar_series,
    specialize_model,
)
from .rules import RuleTruncation, chain_rule_apply, product_rule_apply
from .special import Truncation, gamma, mittag_leffler
from .verify import IdentityReport, SuiteConfig, run_suite

__version__ = "0.1.0"
