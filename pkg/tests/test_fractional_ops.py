import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracmont.corpus import lookup_function, lookup_weight
from fracmont.errors import InvalidFrame, InvalidFunction, InvalidOrder, OutOfDomain
from fracmont.fractional_ops import (
    ProblemFrame,
    TestFunction,
    WeightFunction,
    gamma,
    peano_classical,
    peano_fractional,
    peano_weighted,
    rl_integral,
)
from fracmont.quadrature import QuadratureConfig, SingularIntegrand, oracle_integrate

CFG = QuadratureConfig()


def one(t):
    return np.ones_like(np.asarray(t, dtype=float))


def test_rl_order_one_is_plain_integration():
    assert rl_integral(one, 0.0, 1.0, 2.0) == pytest.approx(2.0, abs=1e-14)


def test_rl_order_two():
    assert rl_integral(one, 0.0, 2.0, 1.0) == pytest.approx(0.5, abs=1e-14)


def test_rl_half_order_against_oracle():
    ref = oracle_integrate(SingularIntegrand(lambda t: t, 0.0, 1.0, -0.5), 100_000) / gamma(0.5)
    assert abs(rl_integral(lambda t: t, 0.0, 0.5, 1.0) - ref) <= 1e-8


def test_rl_order_zero_is_exact_and_skips_quadrature():
    calls = []

    def f(t):
        calls.append(np.shape(t))
        return np.sin(t) * 1.2345678901234567

    x = 0.7303
    assert rl_integral(f, 0.0, 0.0, x) == np.sin(x) * 1.2345678901234567
    assert calls == [()]


def test_rl_negative_order():
    with pytest.raises(InvalidOrder):
        rl_integral(one, 0.0, -0.5, 1.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
@pytest.mark.parametrize("beta", [0.5, 1.0, 1.5])
def test_semigroup(alpha, beta):
    # the inner integral behaves like t**beta at t = a, so keep the
    # relative tolerance out of the way and let abs_tol govern
    cfg = QuadratureConfig(rel_tol=1e-12)
    f = lookup_function("poly:1,-2,0,4", (0.0, 2.0))

    def inner(t):
        vals = [rl_integral(f.value, 0.0, beta, ti, cfg) for ti in np.atleast_1d(t)]
        return np.array(vals).reshape(np.shape(t))

    lhs = rl_integral(inner, 0.0, alpha, 1.7, cfg)
    rhs = rl_integral(f.value, 0.0, alpha + beta, 1.7, cfg)
    assert abs(lhs - rhs) <= 10 * cfg.abs_tol


@pytest.mark.parametrize("z", [1.0, 1.05, 1.5, 2.5, 7.25, 13.0, 29.9, 30.0])
def test_gamma_twelve_digits(z):
    assert gamma(z) == pytest.approx(float(mpmath.gamma(z)), rel=1e-12)


FRAME = ProblemFrame(0.0, 1.0, 0.5, 1.0)


def test_peano_classical_branches():
    assert peano_classical(FRAME, 0.25) == 0.25
    assert peano_classical(FRAME, 0.75) == -0.25
    assert peano_classical(FRAME, 0.0) == 0.0


def test_peano_fractional_examples():
    t = np.linspace(0, 1, 101)
    assert np.array_equal(peano_fractional(FRAME, t), peano_classical(FRAME, t))
    # 0.25 * Gamma(2) * 0.5**-1
    assert peano_fractional(ProblemFrame(0.0, 1.0, 0.5, 2.0), 0.25) == pytest.approx(0.5, rel=1e-15)
    assert peano_fractional(ProblemFrame(0.0, 1.0, 0.5, 2.0), 1.0) == 0.0


def test_peano_weighted_uniform_examples(uniform):
    assert peano_weighted(FRAME, uniform, 0.25) == pytest.approx(0.25, abs=1e-16)
    assert peano_weighted(FRAME, uniform, 0.75) == pytest.approx(-0.25, abs=1e-16)


@pytest.mark.parametrize("spec", ["uniform", "linear:2", "jacobi:0.5", "bump:0.5,0.3"])
def test_peano_weighted_vanishes_at_b(spec):
    w = lookup_weight(spec, (0.0, 1.0))
    assert peano_weighted(ProblemFrame(0.0, 1.0, 0.3, 1.7), w, 1.0) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("alpha", [1.0, 1.25, 2.0, 3.0])
@pytest.mark.parametrize("interval", [(0.0, 1.0), (-1.0, 2.5)])
def test_kernel_reduction(alpha, interval):
    a, b = interval
    w = lookup_weight("uniform", interval)
    frame = ProblemFrame(a, b, a + 0.37 * (b - a), alpha)
    t = np.linspace(a, b, 257)
    lhs = peano_weighted(frame, w, t)
    rhs = (b - a) * peano_fractional(frame, t)
    assert np.allclose(lhs, rhs, rtol=8 * np.finfo(float).eps, atol=0)


@pytest.mark.parametrize("spec", ["uniform", "linear:2", "jacobi:1", "jacobi:0.5", "bump:0.5,0.3"])
@pytest.mark.parametrize("alpha", [1.0, 1.5, 3.0])
def test_jump_at_breakpoint(spec, alpha):
    w = lookup_weight(spec, (0.0, 1.0))
    frame = ProblemFrame(0.0, 1.0, 0.45, alpha)
    left = peano_weighted(frame, w, np.nextafter(frame.x, -np.inf))
    right = peano_weighted(frame, w, frame.x)
    scale = frame.prefactor * max(w.total_mass, 1.0)
    assert abs((left - right) - frame.prefactor * w.total_mass) <= 1e-8 * scale


def test_kernel_out_of_domain(uniform):
    with pytest.raises(OutOfDomain):
        peano_classical(FRAME, 1.5)
    with pytest.raises(OutOfDomain):
        peano_weighted(FRAME, uniform, np.array([0.1, -0.1]))


def test_kernels_need_alpha_at_least_one(uniform):
    low = ProblemFrame(0.0, 1.0, 0.5, 0.5)
    with pytest.raises(InvalidOrder):
        peano_fractional(low, 0.2)
    with pytest.raises(InvalidOrder):
        peano_weighted(low, uniform, 0.2)


@pytest.mark.parametrize(
    "args",
    [(1.0, 0.0, 0.5, 1.0), (0.0, 1.0, 1.0, 1.0), (0.0, 1.0, -0.1, 1.0), (0.0, 1.0, 0.5, float("nan"))],
)
def test_frame_invariants(args):
    with pytest.raises(InvalidFrame):
        ProblemFrame(*args)


def test_frame_negative_order():
    with pytest.raises(InvalidOrder):
        ProblemFrame(0.0, 1.0, 0.5, -1.0)


def test_frame_accepts_left_endpoint_and_fractional_operator_order():
    ProblemFrame(0.0, 1.0, 0.0, 2.0)
    ProblemFrame(0.0, 1.0, 0.5, 0.3)


def test_test_function_rejects_wrong_derivative():
    with pytest.raises(InvalidFunction):
        TestFunction(np.sin, lambda t: 1.01 * np.cos(t), 2.0, (0.0, 1.0))


def test_test_function_rejects_low_bound():
    with pytest.raises(InvalidFunction):
        TestFunction(lambda t: 3 * t, lambda t: 3 + 0 * t, 2.9, (0.0, 1.0))


def test_weight_rejects_negative_values():
    with pytest.raises(InvalidFunction):
        WeightFunction(lambda u: u - 0.5, (0.0, 1.0), cumulative=lambda t: t * t / 2 - t / 2)


def test_weight_rejects_decreasing_cumulative():
    with pytest.raises(InvalidFunction):
        WeightFunction(lambda u: 1.0 + 0 * u, (0.0, 1.0), cumulative=lambda t: -t)


def test_tabulated_cumulative_matches_mpmath():
    w = lookup_weight("bump:0.5,0.3", (0.0, 1.0))
    assert not w.closed_cumulative

    def bump(u):
        s = (u - mpmath.mpf("0.5")) / mpmath.mpf("0.3")
        return mpmath.exp(-1 / (1 - s * s)) if abs(s) < 1 else mpmath.mpf(0)

    mpmath.mp.dps = 30
    for t in (0.0, 0.21, 0.33, 0.5, 0.61, 0.79, 0.95, 1.0):
        pts = [0.2] + [p for p in (0.5,) if p < t] + [min(max(t, 0.2), 0.8)]
        ref = mpmath.quad(bump, pts) if t > 0.2 else 0
        assert float(w.W(t)) == pytest.approx(float(ref), abs=1e-13)
    grid = np.linspace(0, 1, 4001)
    assert np.all(np.diff(w.W(grid)) >= -1e-15)
    assert w.W(0.0) == 0.0


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 10.0))
def test_scaled_weight(c):
    w = lookup_weight("linear:2", (0.0, 1.0))
    cw = w.scaled(c)
    assert cw.total_mass == pytest.approx(c * w.total_mass, rel=1e-14)
    assert cw.W(0.3) == pytest.approx(c * w.W(0.3), rel=1e-14)
