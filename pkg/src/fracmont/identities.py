"""Term-by-term evaluation of the classical, fractional and weighted
Montgomery identities.

Every identity here has the shape ``lhs = T1 - T2 + T3`` with

* ``T1`` the (weighted) fractional mean of ``f``,
* ``T2`` the order ``alpha - 1`` integral of ``kernel * f``,
* ``T3`` the order ``alpha`` integral of ``kernel * f'``,

all anchored at ``b``.  The kernel jumps at ``t = x``, so ``T2`` and ``T3``
are integrated with a breakpoint there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import NonConverged, ToleranceNotMet
from .fractional_ops import (
    ProblemFrame,
    TestFunction,
    WeightFunction,
    gamma,
    peano_classical,
    peano_fractional,
    peano_weighted,
)
from .quadrature import QuadratureConfig, SingularIntegrand, integrate

__all__ = [
    "IdentityReport",
    "identity_tolerance",
    "montgomery_weighted",
    "montgomery_fractional",
    "montgomery_classical",
    "weighted_terms",
    "failed_report",
]

_EPS = np.finfo(float).eps
# Grading used on the correction term, whose exponent alpha - 2 can sit close to -1.
_CORRECTION_GRADING = 3.0


def identity_tolerance(quadrature_err: float) -> float:
    """PASS threshold for an identity residual."""
    return max(1e-7, 20.0 * quadrature_err)


@dataclass(frozen=True)
class IdentityReport:
    frame: ProblemFrame
    lhs: float
    term_main: float
    term_correction: float
    term_derivative: float
    residual: float
    quadrature_err: float
    kind: str = "weighted"
    function: str = ""
    weight: str = ""
    error: Optional[str] = None

    @property
    def tolerance(self) -> float:
        return identity_tolerance(self.quadrature_err)

    @property
    def converged(self) -> bool:
        return self.error is None

    @property
    def passed(self) -> bool:
        return self.converged and math.isfinite(self.residual) and abs(self.residual) <= self.tolerance

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def terms(self) -> dict:
        return {
            "lhs": self.lhs,
            "term_main": self.term_main,
            "term_correction": self.term_correction,
            "term_derivative": self.term_derivative,
        }


def _quad(g, a, b, mu, breakpoint, cfg, partial, label):
    bp = breakpoint if breakpoint is not None and a < breakpoint < b else None
    try:
        return integrate(SingularIntegrand(g, a, b, mu, bp), cfg)
    except ToleranceNotMet as exc:
        partial[label] = exc.value
        raise NonConverged(f"{label}: {exc}", dict(partial)) from exc


def _assemble(
    frame: ProblemFrame,
    f: TestFunction,
    lhs: float,
    main_prefactor: float,
    main_part: Callable,
    kernel: Callable,
    cfg: QuadratureConfig,
):
    """Evaluate ``(T1, T2, T3, err)`` for a kernel-based Montgomery identity.

    ``T1 = main_prefactor * J^alpha(main_part)(b)``; ``kernel(t)`` is the
    Peano kernel multiplying ``f`` and ``f'`` in ``T2`` and ``T3``.
    """
    a, b, x, alpha = frame.a, frame.b, frame.x, frame.alpha
    partial = {"lhs": lhs}
    g_alpha = gamma(alpha)

    v1, e1 = _quad(main_part, a, b, alpha - 1.0, None, cfg, partial, "term_main")
    t1 = main_prefactor * (v1 / g_alpha)
    err = abs(main_prefactor) * e1 / g_alpha
    partial["term_main"] = t1

    if alpha == 1:
        # J^0 is the identity and the kernel vanishes at t = b.
        t2 = 0.0
    else:
        g_corr = gamma(alpha - 1.0)
        cfg2 = cfg
        if cfg.scheme == "adaptive_graded":
            cfg2 = replace(cfg, grading_exponent=max(cfg.grading_for(alpha - 2.0), _CORRECTION_GRADING))
        v2, e2 = _quad(
            lambda t: kernel(t) * f.value(t), a, b, alpha - 2.0, x, cfg2, partial, "term_correction"
        )
        t2 = v2 / g_corr
        err += e2 / g_corr
    partial["term_correction"] = t2

    v3, e3 = _quad(lambda t: kernel(t) * f.derivative(t), a, b, alpha - 1.0, x, cfg, partial, "term_derivative")
    t3 = v3 / g_alpha
    err += e3 / g_alpha

    # rounding in the final combination
    err += 4 * _EPS * (abs(lhs) + abs(t1) + abs(t2) + abs(t3))
    return t1, t2, t3, float(err)


def weighted_terms(frame: ProblemFrame, f: TestFunction, w: WeightFunction, cfg: QuadratureConfig):
    """``(lhs, T1, T2, T3, err)`` of the weighted identity, without building a report."""
    frame.require_identity_order()
    lhs = w.total_mass * float(f.value(np.float64(frame.x)))
    t1, t2, t3, err = _assemble(
        frame,
        f,
        lhs,
        frame.prefactor,
        lambda t: np.asarray(w.value(t), dtype=float) * f.value(t),
        lambda t: peano_weighted(frame, w, t),
        cfg,
    )
    return lhs, t1, t2, t3, err


def _report(frame, lhs, t1, t2, t3, err, kind, f, w=None):
    return IdentityReport(
        frame=frame,
        lhs=lhs,
        term_main=t1,
        term_correction=t2,
        term_derivative=t3,
        residual=lhs - (t1 - t2 + t3),
        quadrature_err=err,
        kind=kind,
        function=f.name,
        weight=w.name if w is not None else "",
    )


def montgomery_weighted(
    frame: ProblemFrame, f: TestFunction, w: WeightFunction, cfg: QuadratureConfig = QuadratureConfig()
) -> IdentityReport:
    """Weighted fractional Montgomery identity.

    ``m(a,b) f(x) = (b-x)^(1-alpha) Gamma(alpha) J^alpha(w f)(b)
    - J^(alpha-1)(Omega_w f)(b) + J^alpha(Omega_w f')(b)``.

    Raises :class:`NonConverged` (with the terms obtained so far) when a
    quadrature misses its tolerance.
    """
    lhs, t1, t2, t3, err = weighted_terms(frame, f, w, cfg)
    return _report(frame, lhs, t1, t2, t3, err, "weighted", f, w)


def montgomery_fractional(frame: ProblemFrame, f: TestFunction, cfg: QuadratureConfig = QuadratureConfig()) -> IdentityReport:
    """Unweighted fractional Montgomery identity with kernel ``P2``; ``lhs = f(x)``."""
    frame.require_identity_order()
    lhs = float(f.value(np.float64(frame.x)))
    t1, t2, t3, err = _assemble(
        frame,
        f,
        lhs,
        frame.prefactor / frame.length,
        f.value,
        lambda t: peano_fractional(frame, t),
        cfg,
    )
    return _report(frame, lhs, t1, t2, t3, err, "fractional", f)


def montgomery_classical(frame: ProblemFrame, f: TestFunction, cfg: QuadratureConfig = QuadratureConfig()) -> IdentityReport:
    """Classical Montgomery identity ``f(x) = mean(f) + integral P1 f'``.

    The frame's order is ignored; the report carries ``alpha = 1``.
    """
    frame = frame.with_alpha(1.0)
    lhs = float(f.value(np.float64(frame.x)))
    t1, t2, t3, err = _assemble(
        frame,
        f,
        lhs,
        1.0 / frame.length,
        f.value,
        lambda t: peano_classical(frame, t),
        cfg,
    )
    return _report(frame, lhs, t1, t2, t3, err, "classical", f)


def failed_report(frame, kind, f_name, w_name, exc) -> IdentityReport:
    """Report standing in for an identity that could not be evaluated."""
    partial = getattr(exc, "partial", {}) or {}
    nan = float("nan")
    return IdentityReport(
        frame=frame,
        lhs=partial.get("lhs", nan),
        term_main=partial.get("term_main", nan),
        term_correction=partial.get("term_correction", nan),
        term_derivative=partial.get("term_derivative", nan),
        residual=nan,
        quadrature_err=nan,
        kind=kind,
        function=f_name,
        weight=w_name,
        error=str(exc),
    )
