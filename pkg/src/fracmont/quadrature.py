"""Quadrature for integrals with a right-endpoint algebraic singularity.

Everything here evaluates

    I = integral_a^b (b - t)**mu * g(t) dt,    mu > -1,

where ``g`` is piecewise smooth with at most one interior breakpoint.  The
panel touching ``t = b`` uses a Gauss-Jacobi rule that carries the factor
``(b - t)**mu`` exactly; all other panels use Gauss-Legendre on the full
integrand.  Both rules are open, so ``g`` is never sampled at ``t = b``.

Smooth parts must accept a numpy array of abscissae and return an array of
the same shape (a scalar is broadcast).  They must be safe to call from
several threads at once.
"""

from __future__ import annotations

import functools
import heapq
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special

from .errors import InvalidIntegrand, NonFiniteSample, ToleranceNotMet

__all__ = [
    "SCHEMES",
    "QuadratureConfig",
    "SingularIntegrand",
    "integrate",
    "oracle_integrate",
]

SCHEMES = ("gauss_jacobi", "adaptive_graded", "oracle_riemann")

_EPS = np.finfo(float).eps
# Roundoff floor on a panel's error estimate, relative to the integral of |integrand|.
_ROUNDOFF = 50.0 * _EPS
_GRADED_PANELS = 8


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and scheme choice for :func:`integrate`.

    ``grading_exponent=None`` selects ``max(2, 2 / (1 + mu))`` per integrand.
    """

    scheme: str = "gauss_jacobi"
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 400
    jacobi_nodes: int = 32
    grading_exponent: Optional[float] = None
    oracle_panels: int = 100_000

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise ValueError("abs_tol and rel_tol cannot both be zero")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be a positive integer")
        if int(self.jacobi_nodes) != self.jacobi_nodes or self.jacobi_nodes < 2:
            raise ValueError("jacobi_nodes must be an integer >= 2")
        if int(self.oracle_panels) != self.oracle_panels or self.oracle_panels < 16:
            raise ValueError("oracle_panels must be an integer >= 16")
        if self.grading_exponent is not None and not self.grading_exponent >= 1:
            raise ValueError("grading_exponent must be >= 1")

    def grading_for(self, mu: float) -> float:
        if self.grading_exponent is not None:
            return float(self.grading_exponent)
        return max(2.0, 2.0 / (1.0 + mu))

    def tolerance_for(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class SingularIntegrand:
    """``(b - t)**exponent * smooth_part(t)`` on ``[a, b]``."""

    smooth_part: Callable[[np.ndarray], np.ndarray]
    a: float
    b: float
    exponent: float = 0.0
    breakpoint: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise InvalidIntegrand(f"need finite a < b, got [{self.a}, {self.b}]")
        if not self.exponent > -1:
            raise InvalidIntegrand(f"exponent must exceed -1 for integrability, got {self.exponent}")
        if self.breakpoint is not None and not self.a < self.breakpoint < self.b:
            raise InvalidIntegrand(
                f"breakpoint {self.breakpoint} must lie strictly inside ({self.a}, {self.b})"
            )

    def pieces(self):
        if self.breakpoint is None:
            return [(self.a, self.b)]
        return [(self.a, self.breakpoint), (self.breakpoint, self.b)]


@functools.lru_cache(maxsize=None)
def _jacobi_rule(n: int, mu: float):
    s, w = special.roots_jacobi(n, mu, 0.0)
    s.setflags(write=False)
    w.setflags(write=False)
    return s, w


@functools.lru_cache(maxsize=None)
def _legendre_rule(n: int):
    s, w = special.roots_legendre(n)
    s.setflags(write=False)
    w.setflags(write=False)
    return s, w


def _sample(g, t):
    vals = np.asarray(g(t), dtype=float)
    if vals.shape != t.shape:
        vals = np.broadcast_to(vals, t.shape)
    if not np.all(np.isfinite(vals)):
        bad = t[~np.isfinite(vals)][0]
        raise NonFiniteSample(f"smooth part returned a non-finite value at t={bad!r}")
    return vals


def _apply_rule(g, mu, b, c, d, n):
    """One rule application on [c, d]: returns (value, integral of |integrand|)."""
    half = 0.5 * (d - c)
    mid = 0.5 * (c + d)
    if d == b:
        s, w = _jacobi_rule(n, mu)
        t = mid + half * s
        vals = _sample(g, t)
        scale = half ** (mu + 1.0)
        return scale * float(w @ vals), scale * float(w @ np.abs(vals))
    s, w = _legendre_rule(n)
    t = mid + half * s
    vals = _sample(g, t) * (b - t) ** mu
    return half * float(w @ vals), half * float(w @ np.abs(vals))


def _panel(g, mu, b, c, d, n):
    # An n-node companion alone can agree with the 2n rule by accident on
    # C-infinity but non-analytic integrands, so a 3n/2-node rule also votes.
    fine, fine_abs = _apply_rule(g, mu, b, c, d, 2 * n)
    coarse, _ = _apply_rule(g, mu, b, c, d, n)
    middle, _ = _apply_rule(g, mu, b, c, d, n + max(n // 2, 1))
    err = max(abs(fine - coarse), abs(fine - middle), _ROUNDOFF * fine_abs)
    return fine, err


def _initial_edges(integrand: SingularIntegrand, cfg: QuadratureConfig):
    edges = []
    for c, d in integrand.pieces():
        if cfg.scheme == "adaptive_graded" and d == integrand.b:
            q = cfg.grading_for(integrand.exponent)
            k = np.arange(_GRADED_PANELS + 1)
            nodes = d - (d - c) * ((_GRADED_PANELS - k) / _GRADED_PANELS) ** q
            nodes[0], nodes[-1] = c, d
            edges.extend(zip(nodes[:-1].tolist(), nodes[1:].tolist()))
        else:
            edges.append((c, d))
    return edges


def _adaptive(integrand: SingularIntegrand, cfg: QuadratureConfig):
    g, mu, b = integrand.smooth_part, integrand.exponent, integrand.b
    n = int(cfg.jacobi_nodes)
    heap = []
    values = {}
    errors = {}
    key = 0
    for c, d in _initial_edges(integrand, cfg):
        v, e = _panel(g, mu, b, c, d, n)
        values[key], errors[key] = v, e
        heapq.heappush(heap, (-e, key, c, d))
        key += 1

    splits = 0
    while True:
        value = math.fsum(values.values())
        err = math.fsum(errors.values())
        if err <= cfg.tolerance_for(value):
            return value, err
        _, worst, c, d = heap[0]
        mid = 0.5 * (c + d)
        if splits >= cfg.max_subdivisions or not c < mid < d:
            raise ToleranceNotMet(
                f"error estimate {err:.3e} above tolerance {cfg.tolerance_for(value):.3e} "
                f"after {splits} subdivisions",
                value,
                err,
            )
        heapq.heappop(heap)
        del values[worst], errors[worst]
        for lo, hi in ((c, mid), (mid, d)):
            v, e = _panel(g, mu, b, lo, hi, n)
            values[key], errors[key] = v, e
            heapq.heappush(heap, (-e, key, lo, hi))
            key += 1
        splits += 1


def _graded_distances(integrand: SingularIntegrand, panels: int, q: float) -> np.ndarray:
    """Node distances from ``b``, decreasing; tiny panels near ``b`` stay resolvable."""
    a, b = integrand.a, integrand.b
    k = np.arange(panels + 1, dtype=float)
    dist = (b - a) * ((panels - k) / panels) ** q
    dist[0], dist[-1] = b - a, 0.0
    bp = integrand.breakpoint
    if bp is not None:
        target = b - bp
        i = int(np.searchsorted(-dist, -target))
        if dist[i] != target:
            dist = np.insert(dist, i, target)
    return dist


def oracle_integrate(integrand: SingularIntegrand, panels: int, grading_exponent: Optional[float] = None) -> float:
    """Composite midpoint rule on a mesh graded toward ``t = b``.

    Nodes are ``t_k = b - (b - a) * ((panels - k) / panels)**q``; the
    breakpoint, if any, is inserted as an extra node.  Deliberately naive so
    it shares nothing with :func:`integrate` beyond the integrand.
    """
    panels = int(panels)
    if panels < 1:
        raise ValueError("panels must be positive")
    mu = integrand.exponent
    q = grading_exponent if grading_exponent is not None else max(2.0, 2.0 / (1.0 + mu))
    dist = _graded_distances(integrand, panels, q)
    mid = 0.5 * (dist[:-1] + dist[1:])
    vals = _sample(integrand.smooth_part, integrand.b - mid)
    return float(np.sum(mid**mu * vals * (dist[:-1] - dist[1:])))


def integrate(integrand: SingularIntegrand, cfg: QuadratureConfig = QuadratureConfig()):
    """Approximate ``integral_a^b (b - t)**mu g(t) dt``.

    Returns ``(value, err_estimate)``.  Raises :class:`ToleranceNotMet` (with
    the best value attached) when the subdivision budget runs out.
    """
    if cfg.scheme == "oracle_riemann":
        q = cfg.grading_for(integrand.exponent)
        fine = oracle_integrate(integrand, cfg.oracle_panels, q)
        coarse = oracle_integrate(integrand, max(cfg.oracle_panels // 2, 1), q)
        err = abs(fine - coarse)
        if err > cfg.tolerance_for(fine):
            raise ToleranceNotMet(
                f"oracle estimate {err:.3e} above tolerance with {cfg.oracle_panels} panels",
                fine,
                err,
            )
        return fine, err
    return _adaptive(integrand, cfg)
