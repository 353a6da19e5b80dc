"""Named test functions and weights, parsed from short spec strings.

Function grammar: ``poly:c0,c1,...`` (ascending powers of t), ``exp:rate``,
``sin:freq,phase``, ``runge:scale``.  Weight grammar: ``uniform``,
``linear:slope``, ``jacobi:p``, ``bump:center,width``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainInvalid, InvalidFunction, InvalidOrder, UnknownName
from .fractional_ops import TestFunction, WeightFunction, gamma

__all__ = [
    "FUNCTION_KINDS",
    "WEIGHT_KINDS",
    "DEFAULT_PAIRS",
    "NamedFunction",
    "NamedWeight",
    "parse_function",
    "parse_weight",
    "lookup",
    "lookup_function",
    "lookup_weight",
    "reference_rl",
]

FUNCTION_KINDS = ("poly", "exp", "sin", "runge")
WEIGHT_KINDS = ("uniform", "linear", "jacobi", "bump")

# (f, w) pairs used by the default verification grids.
DEFAULT_PAIRS = (
    ("poly:1,-2,3", "uniform"),
    ("poly:0,1,0,-1", "jacobi:0.5"),
    ("exp:1", "linear:2"),
    ("exp:-2", "bump:0.5,0.3"),
    ("sin:3,0.5", "jacobi:1"),
    ("sin:1,0", "linear:0.5"),
    ("runge:4", "uniform"),
)


def _split(spec: str):
    name = spec.strip()
    kind, _, rest = name.partition(":")
    if not rest:
        return kind, ()
    try:
        params = tuple(float(p) for p in rest.split(","))
    except ValueError:
        raise UnknownName(f"malformed parameters in {spec!r}") from None
    return kind, params


def _check_domain(domain):
    a, b = (float(v) for v in domain)
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise DomainInvalid(f"need a < b, got {domain}")
    return a, b


def _nonzero(bound):
    # A constant has f' = 0, so any positive number is a valid bound.
    return bound if bound > 0 else 1.0


@dataclass(frozen=True)
class NamedFunction:
    name: str
    kind: str
    params: tuple
    domain: tuple

    def build(self) -> TestFunction:
        a, b = self.domain
        p = self.params
        if self.kind == "poly":
            coeffs = np.asarray(p, dtype=float)
            dcoeffs = P.polyder(coeffs) if len(coeffs) > 1 else np.zeros(1)
            R = max(abs(a), abs(b))
            bound = sum(abs(c) * R**k for k, c in enumerate(dcoeffs))
            return TestFunction(
                value=lambda t: P.polyval(t, coeffs),
                derivative=lambda t: P.polyval(t, dcoeffs) + 0.0 * np.asarray(t),
                deriv_sup_bound=_nonzero(bound),
                domain=(a, b),
                name=self.name,
            )
        if self.kind == "exp":
            (r,) = p
            return TestFunction(
                value=lambda t: np.exp(r * np.asarray(t)),
                derivative=lambda t: r * np.exp(r * np.asarray(t)),
                deriv_sup_bound=_nonzero(abs(r) * math.exp(max(r * a, r * b))),
                domain=(a, b),
                name=self.name,
            )
        if self.kind == "sin":
            freq, phase = p
            return TestFunction(
                value=lambda t: np.sin(freq * np.asarray(t) + phase),
                derivative=lambda t: freq * np.cos(freq * np.asarray(t) + phase),
                deriv_sup_bound=_nonzero(abs(freq)),
                domain=(a, b),
                name=self.name,
            )
        if self.kind == "runge":
            (s,) = p
            s2 = s * s
            return TestFunction(
                value=lambda t: 1.0 / (1.0 + s2 * np.asarray(t) ** 2),
                derivative=lambda t: -2.0 * s2 * np.asarray(t) / (1.0 + s2 * np.asarray(t) ** 2) ** 2,
                # global maximum of |f'|, attained at |t| = 1 / (s sqrt 3)
                deriv_sup_bound=_nonzero(3.0 * math.sqrt(3.0) / 8.0 * abs(s)),
                domain=(a, b),
                name=self.name,
            )
        raise UnknownName(f"unknown function kind {self.kind!r}")


def _bump(center, width):
    def w(u):
        s = (np.asarray(u, dtype=float) - center) / width
        inside = np.abs(s) < 1.0
        out = np.zeros_like(s)
        out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
        return out

    return w


@dataclass(frozen=True)
class NamedWeight:
    name: str
    kind: str
    params: tuple
    domain: tuple

    @property
    def closed_cumulative(self) -> bool:
        return self.kind != "bump"

    def build(self) -> WeightFunction:
        a, b = self.domain
        p = self.params
        if self.kind == "uniform":
            return WeightFunction(
                value=lambda u: np.ones_like(np.asarray(u, dtype=float)),
                cumulative=lambda t: np.asarray(t, dtype=float) - a,
                domain=(a, b),
                name=self.name,
            )
        if self.kind == "linear":
            (slope,) = p
            if slope < 0:
                raise InvalidFunction(f"{self.name}: slope must be >= 0")
            return WeightFunction(
                value=lambda u: 1.0 + slope * (np.asarray(u, dtype=float) - a),
                cumulative=lambda t: (np.asarray(t, dtype=float) - a)
                + 0.5 * slope * (np.asarray(t, dtype=float) - a) ** 2,
                domain=(a, b),
                name=self.name,
            )
        if self.kind == "jacobi":
            (q,) = p
            if q < 0:
                raise InvalidFunction(f"{self.name}: exponent must be >= 0")
            top = (b - a) ** (q + 1)
            return WeightFunction(
                value=lambda u: np.maximum(b - np.asarray(u, dtype=float), 0.0) ** q,
                cumulative=lambda t: (top - np.maximum(b - np.asarray(t, dtype=float), 0.0) ** (q + 1)) / (q + 1),
                domain=(a, b),
                name=self.name,
            )
        if self.kind == "bump":
            center, width = p
            if not width > 0:
                raise InvalidFunction(f"{self.name}: width must be positive")
            return WeightFunction(value=_bump(center, width), cumulative=None, domain=(a, b), name=self.name)
        raise UnknownName(f"unknown weight kind {self.kind!r}")


_FUNCTION_ARITY = {"poly": None, "exp": 1, "sin": 2, "runge": 1}
_WEIGHT_ARITY = {"uniform": 0, "linear": 1, "jacobi": 1, "bump": 2}


def parse_function(spec: str, domain) -> NamedFunction:
    kind, params = _split(spec)
    if kind not in _FUNCTION_ARITY:
        raise UnknownName(f"unknown function {spec!r}; expected one of {FUNCTION_KINDS}")
    arity = _FUNCTION_ARITY[kind]
    if (arity is None and not params) or (arity is not None and len(params) != arity):
        raise UnknownName(f"wrong number of parameters in {spec!r}")
    return NamedFunction(spec.strip(), kind, params, _check_domain(domain))


def parse_weight(spec: str, domain) -> NamedWeight:
    kind, params = _split(spec)
    if kind not in _WEIGHT_ARITY:
        raise UnknownName(f"unknown weight {spec!r}; expected one of {WEIGHT_KINDS}")
    if len(params) != _WEIGHT_ARITY[kind]:
        raise UnknownName(f"wrong number of parameters in {spec!r}")
    return NamedWeight(spec.strip(), kind, params, _check_domain(domain))


def lookup_function(spec: str, domain) -> TestFunction:
    return parse_function(spec, domain).build()


def lookup_weight(spec: str, domain) -> WeightFunction:
    return parse_weight(spec, domain).build()


def lookup(name: str, domain):
    """Build the registered function or weight called ``name`` on ``domain``."""
    kind, _ = _split(name)
    if kind in _WEIGHT_ARITY:
        return lookup_weight(name, domain)
    if kind in _FUNCTION_ARITY:
        return lookup_function(name, domain)
    raise UnknownName(f"unknown name {name!r}")


def reference_rl(beta: int, a: float, alpha: float, x: float) -> float:
    """Closed form of ``J_a^alpha (t - a)**beta`` evaluated at ``x``."""
    if not alpha >= 0:
        raise InvalidOrder(f"order must be non-negative, got {alpha}")
    if int(beta) != beta or beta < 0:
        raise ValueError(f"beta must be a nonnegative integer, got {beta}")
    return gamma(beta + 1) / gamma(alpha + beta + 1) * (x - a) ** (alpha + beta)
