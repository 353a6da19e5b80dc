"""Riemann-Liouville fractional integrals, weighted Montgomery identities and
the Ostrowski-type bounds that follow from them, as checkable numerics."""

from .bounds import BoundReport, kernel_l1, ostrowski_bound, tightness_sweep
from .corpus import DEFAULT_PAIRS, lookup, lookup_function, lookup_weight, reference_rl
from .errors import (
    DomainInvalid,
    FracMontError,
    InvalidFrame,
    InvalidFunction,
    InvalidIntegrand,
    InvalidOrder,
    NonConverged,
    NonFiniteSample,
    OutOfDomain,
    ToleranceNotMet,
    UnknownName,
)
from .fractional_ops import (
    ProblemFrame,
    TestFunction,
    WeightFunction,
    peano_classical,
    peano_fractional,
    peano_weighted,
    rl_integral,
)
from .identities import IdentityReport, montgomery_classical, montgomery_fractional, montgomery_weighted
from .quadrature import QuadratureConfig, SingularIntegrand, integrate, oracle_integrate
from .serialize import serialize_report

__version__ = "0.1.0"
