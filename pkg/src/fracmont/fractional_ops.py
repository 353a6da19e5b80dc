"""Riemann-Liouville integration and the Peano kernels built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy import special

from .errors import InvalidFrame, InvalidFunction, InvalidOrder, OutOfDomain
from .quadrature import QuadratureConfig, SingularIntegrand, integrate

__all__ = [
    "ProblemFrame",
    "TestFunction",
    "WeightFunction",
    "gamma",
    "rl_integral",
    "peano_classical",
    "peano_fractional",
    "peano_weighted",
]

_CHECK_SEED = 20240601
_FD_POINTS = 20
_FD_RTOL = 1e-6
_SUP_SAMPLES = 1000


def gamma(x: float) -> float:
    return math.gamma(x)


@dataclass(frozen=True)
class ProblemFrame:
    """Interval ``[a, b]``, evaluation point ``x`` and order ``alpha``.

    ``x = b`` is rejected because ``(b - x)**(1 - alpha)`` blows up there.
    """

    a: float
    b: float
    x: float
    alpha: float

    def __post_init__(self):
        vals = (self.a, self.b, self.x, self.alpha)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidFrame(f"frame values must be finite, got {vals}")
        if not self.a < self.b:
            raise InvalidFrame(f"need a < b, got a={self.a}, b={self.b}")
        if not self.a <= self.x < self.b:
            raise InvalidFrame(f"need a <= x < b, got x={self.x} on [{self.a}, {self.b}]")
        if self.alpha < 0:
            raise InvalidOrder(f"order must be non-negative, got {self.alpha}")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def prefactor(self) -> float:
        """``(b - x)**(1 - alpha) * Gamma(alpha)``, shared by both fractional kernels."""
        return (self.b - self.x) ** (1.0 - self.alpha) * gamma(self.alpha)

    def require_identity_order(self):
        if self.alpha < 1:
            raise InvalidOrder(f"identities and bounds need alpha >= 1, got {self.alpha}")

    def with_alpha(self, alpha: float) -> "ProblemFrame":
        return replace(self, alpha=alpha)


def _domain_pair(domain) -> tuple[float, float]:
    a, b = (float(v) for v in domain)
    if not a < b:
        raise InvalidFrame(f"need a < b for a domain, got {domain}")
    return a, b


@dataclass(frozen=True)
class TestFunction:
    """A differentiable ``f`` on ``domain`` with ``|f'| <= deriv_sup_bound``.

    Construction checks the derivative against central differences and the
    bound against dense sampling; both callables must be numpy-vectorised.
    """

    __test__ = False  # keep pytest from collecting this class

    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    deriv_sup_bound: float
    domain: tuple[float, float]
    name: str = "f"

    def __post_init__(self):
        a, b = _domain_pair(self.domain)
        object.__setattr__(self, "domain", (a, b))
        M = self.deriv_sup_bound
        if not (math.isfinite(M) and M > 0):
            raise InvalidFunction(f"{self.name}: derivative bound must be finite and positive, got {M}")

        rng = np.random.default_rng(_CHECK_SEED)
        h = 1e-5 * (b - a)
        t = rng.uniform(a + 2 * h, b - 2 * h, _FD_POINTS)
        fd = (np.asarray(self.value(t + h)) - np.asarray(self.value(t - h))) / (2 * h)
        df = np.asarray(self.derivative(t), dtype=float)
        scale = np.maximum(np.abs(df), max(M, 1.0))
        if not np.all(np.abs(fd - df) <= _FD_RTOL * scale):
            worst = int(np.argmax(np.abs(fd - df) / scale))
            raise InvalidFunction(
                f"{self.name}: derivative disagrees with finite differences at t={t[worst]!r} "
                f"({df[worst]!r} vs {fd[worst]!r})"
            )

        grid = np.linspace(a, b, _SUP_SAMPLES)
        sampled = np.abs(np.asarray(self.derivative(grid), dtype=float))
        if not np.all(np.isfinite(sampled)) or sampled.max() > M * (1 + 1e-12):
            raise InvalidFunction(f"{self.name}: |f'| reaches {sampled.max()!r} > bound {M!r}")

    def __call__(self, t):
        return self.value(t)


class _TabulatedCumulative:
    """``W(t) = integral_a^t w`` from panel sums fixed at construction.

    A query adds the tabulated sum up to the left panel edge and a fixed
    Gauss-Legendre correction over the remainder.
    """

    _LOCAL_NODES = 24

    def __init__(self, w, a, b, panels=64):
        self.edges = np.linspace(a, b, panels + 1)
        cfg = QuadratureConfig(abs_tol=1e-300, rel_tol=1e-13, max_subdivisions=2000, jacobi_nodes=16)
        sums, errs = [], []
        for lo, hi in zip(self.edges[:-1], self.edges[1:]):
            v, e = integrate(SingularIntegrand(w, float(lo), float(hi), 0.0), cfg)
            sums.append(v)
            errs.append(e)
        self.cum = np.concatenate([[0.0], np.cumsum(sums)])
        self.cum[-1] = math.fsum(sums)
        self.total = float(self.cum[-1])
        self.err = math.fsum(errs)
        self.w = w
        self.s, self.wts = special.roots_legendre(self._LOCAL_NODES)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        k = np.clip(np.searchsorted(self.edges, t, side="right") - 1, 0, len(self.edges) - 2)
        left = self.edges[k]
        half = 0.5 * (t - left)
        nodes = (left + half)[..., None] + half[..., None] * self.s
        local = half * (np.asarray(self.w(nodes), dtype=float) @ self.wts)
        return np.clip(self.cum[k] + local, 0.0, self.total)


@dataclass(frozen=True)
class WeightFunction:
    """Nonnegative weight ``w`` on ``domain`` with cumulative ``W`` and mass ``m``.

    Pass ``cumulative=None`` to have ``W`` tabulated by quadrature; the table
    is built here, once, so the object is immutable afterwards.
    """

    value: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float]
    cumulative: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "w"
    total_mass: float = field(init=False)
    closed_cumulative: bool = field(init=False)
    cumulative_err: float = field(init=False)

    def __post_init__(self):
        a, b = _domain_pair(self.domain)
        object.__setattr__(self, "domain", (a, b))
        grid = np.linspace(a, b, _SUP_SAMPLES)
        wv = np.asarray(self.value(grid), dtype=float)
        wv = np.broadcast_to(wv, grid.shape)
        if not np.all(np.isfinite(wv)) or np.any(wv < 0):
            raise InvalidFunction(f"{self.name}: weight must be finite and nonnegative on [{a}, {b}]")

        if self.cumulative is None:
            table = _TabulatedCumulative(self.value, a, b)
            object.__setattr__(self, "cumulative", table)
            object.__setattr__(self, "total_mass", table.total)
            object.__setattr__(self, "closed_cumulative", False)
            object.__setattr__(self, "cumulative_err", table.err)
        else:
            object.__setattr__(self, "total_mass", float(self.cumulative(np.float64(b))))
            object.__setattr__(self, "closed_cumulative", True)
            object.__setattr__(self, "cumulative_err", 0.0)

        m = self.total_mass
        if not (math.isfinite(m) and m >= 0):
            raise InvalidFunction(f"{self.name}: total mass must be finite, got {m}")
        W = np.broadcast_to(np.asarray(self.cumulative(grid), dtype=float), grid.shape)
        slack = 1e-12 * max(m, 1e-300)
        if abs(W[0]) > slack or np.any(np.diff(W) < -slack):
            raise InvalidFunction(f"{self.name}: cumulative weight must start at 0 and be nondecreasing")

    def __call__(self, t):
        return self.value(t)

    def W(self, t):
        return self.cumulative(t)

    def scaled(self, c: float) -> "WeightFunction":
        """The weight ``c * w`` (c > 0), reusing this object's cumulative."""
        if not c > 0:
            raise InvalidFunction(f"scale factor must be positive, got {c}")
        value, cum = self.value, self.cumulative
        out = WeightFunction(
            value=lambda t: c * np.asarray(value(t), dtype=float),
            domain=self.domain,
            cumulative=lambda t: c * np.asarray(cum(t), dtype=float),
            name=f"{c!r}*{self.name}",
        )
        object.__setattr__(out, "closed_cumulative", self.closed_cumulative)
        object.__setattr__(out, "cumulative_err", c * self.cumulative_err)
        return out


def rl_integral(f, a: float, alpha: float, x: float, cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """Left Riemann-Liouville integral ``J_a^alpha f(x)``.

    ``alpha = 0`` returns ``f(x)`` without touching quadrature.
    """
    value, _ = rl_integral_with_error(f, a, alpha, x, cfg)
    return value


def rl_integral_with_error(f, a, alpha, x, cfg=QuadratureConfig()):
    if not alpha >= 0:
        raise InvalidOrder(f"order must be non-negative, got {alpha}")
    if alpha == 0:
        return float(f(np.float64(x))), 0.0
    if not x > a:
        raise InvalidFrame(f"need x > a, got a={a}, x={x}")
    g = gamma(alpha)
    value, err = integrate(SingularIntegrand(f, float(a), float(x), alpha - 1.0), cfg)
    return value / g, err / g


def _check_t(frame: ProblemFrame, t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < frame.a) or np.any(arr > frame.b) or np.any(np.isnan(arr)):
        raise OutOfDomain(f"t must lie in [{frame.a}, {frame.b}]")
    return arr


def _unwrap(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def peano_classical(frame: ProblemFrame, t):
    t = _check_t(frame, t)
    a, b, x = frame.a, frame.b, frame.x
    return _unwrap(np.where(t < x, (t - a) / (b - a), (t - b) / (b - a)))


def peano_fractional(frame: ProblemFrame, t):
    frame.require_identity_order()
    return _unwrap(frame.prefactor * np.asarray(peano_classical(frame, t)))


def peano_weighted(frame: ProblemFrame, w: WeightFunction, t):
    """Weighted fractional kernel; the right branch is ``W(t) - m``, i.e. ``integral_b^t w``."""
    frame.require_identity_order()
    t = _check_t(frame, t)
    W = np.asarray(w.W(t), dtype=float)
    return _unwrap(frame.prefactor * np.where(t < frame.x, W, W - w.total_mass))
