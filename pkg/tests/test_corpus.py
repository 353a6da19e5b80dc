import math

import numpy as np
import pytest

from fracmont.corpus import (
    DEFAULT_PAIRS,
    lookup,
    lookup_function,
    lookup_weight,
    parse_weight,
    reference_rl,
)
from fracmont.errors import DomainInvalid, InvalidFunction, InvalidOrder, UnknownName
from fracmont.fractional_ops import TestFunction, WeightFunction, rl_integral
from fracmont.quadrature import QuadratureConfig, SingularIntegrand, integrate, oracle_integrate

CFG = QuadratureConfig()


def test_lookup_uniform():
    w = lookup("uniform", (0, 1))
    assert isinstance(w, WeightFunction)
    assert w.total_mass == 1.0
    assert w.W(0.3) == pytest.approx(0.3)
    assert w.closed_cumulative


def test_lookup_square():
    f = lookup("poly:0,0,1", (0, 1))
    assert isinstance(f, TestFunction)
    assert f(0.5) == 0.25
    assert f.derivative(0.5) == 1.0
    assert f.deriv_sup_bound == 2.0


def test_lookup_jacobi_one():
    w = lookup("jacobi:1", (0, 1))
    assert w(0.25) == 0.75
    t = np.linspace(0, 1, 11)
    assert np.allclose(w.W(t), t - t**2 / 2, atol=1e-16)
    assert w.total_mass == 0.5


@pytest.mark.parametrize("name", ["poly:", "cosh:1", "exp:1,2", "sin:1", "linear", "bump:1", "poly:a,b", ""])
def test_unknown_names(name):
    with pytest.raises(UnknownName):
        lookup(name, (0, 1))


def test_domain_invalid():
    with pytest.raises(DomainInvalid):
        lookup("uniform", (1, 1))
    with pytest.raises(DomainInvalid):
        lookup("exp:1", (2, 0))


def test_weight_parameter_ranges():
    with pytest.raises(InvalidFunction):
        lookup_weight("linear:-1", (0, 1))
    with pytest.raises(InvalidFunction):
        lookup_weight("jacobi:-0.5", (0, 1))
    with pytest.raises(InvalidFunction):
        lookup_weight("bump:0.5,0", (0, 1))


FUNCTIONS = sorted({f for f, _ in DEFAULT_PAIRS} | {"poly:2", "exp:0", "sin:0,1", "runge:0.5", "poly:0,0,0,0,1"})
WEIGHTS = sorted({w for _, w in DEFAULT_PAIRS} | {"jacobi:0", "jacobi:2.5", "bump:0.1,0.5"})
DOMAINS = [(0.0, 1.0), (-1.0, 2.0), (0.5, 0.75)]


@pytest.mark.parametrize("domain", DOMAINS)
@pytest.mark.parametrize("spec", FUNCTIONS)
def test_functions_satisfy_invariants(spec, domain):
    f = lookup_function(spec, domain)
    # construction already checked derivative and bound; spot-check the bound more densely
    t = np.linspace(*domain, 20001)
    assert np.max(np.abs(f.derivative(t))) <= f.deriv_sup_bound * (1 + 1e-12)


@pytest.mark.parametrize("domain", DOMAINS)
@pytest.mark.parametrize("spec", WEIGHTS)
def test_weights_satisfy_invariants(spec, domain):
    w = lookup_weight(spec, domain)
    t = np.linspace(*domain, 1000)
    assert np.all(w(t) >= 0)
    W = w.W(t)
    assert W[0] == pytest.approx(0.0, abs=1e-15)
    assert np.all(np.diff(W) >= -1e-14)
    assert math.isfinite(w.total_mass)
    assert parse_weight(spec, domain).closed_cumulative == w.closed_cumulative


@pytest.mark.parametrize("domain", DOMAINS)
@pytest.mark.parametrize("spec", [w for w in WEIGHTS if not w.startswith("bump")])
def test_closed_cumulative_matches_quadrature(spec, domain):
    w = lookup_weight(spec, domain)
    a, b = domain
    tight = QuadratureConfig(abs_tol=1e-14, rel_tol=1e-13)
    for t in np.linspace(a, b, 7)[1:]:
        v, _ = integrate(SingularIntegrand(w.value, a, float(t), 0.0), tight)
        assert abs(float(w.W(t)) - v) <= 1e-10


def test_reference_rl_examples():
    assert reference_rl(0, 0.0, 1.0, 2.0) == 2.0
    assert reference_rl(0, 0.0, 2.0, 1.0) == 0.5
    g25 = 1.329340388179137  # Gamma(2.5) = 3 sqrt(pi) / 4
    assert g25 == pytest.approx(0.75 * math.sqrt(math.pi), rel=1e-15)
    expected = 1.0 / g25
    assert reference_rl(1, 0.0, 0.5, 1.0) == pytest.approx(expected, rel=1e-14)
    oracle = oracle_integrate(SingularIntegrand(lambda t: t, 0.0, 1.0, -0.5), 100_000) / math.gamma(0.5)
    assert reference_rl(1, 0.0, 0.5, 1.0) == pytest.approx(oracle, abs=1e-8)


def test_reference_rl_rejects_bad_input():
    with pytest.raises(InvalidOrder):
        reference_rl(1, 0.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        reference_rl(1.5, 0.0, 1.0, 1.0)


@pytest.mark.parametrize("x", [0.25, 0.5, 1.0])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0, 3.0])
@pytest.mark.parametrize("beta", [0, 1, 2, 3])
def test_reference_matches_rl_integral(beta, alpha, x):
    got = rl_integral(lambda t: t**beta + 0 * t, 0.0, alpha, x)
    assert abs(got - reference_rl(beta, 0.0, alpha, x)) <= 10 * CFG.abs_tol
