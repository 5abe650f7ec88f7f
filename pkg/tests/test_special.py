import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kreinkernels.errors import DomainError, NonIntegrable
from kreinkernels.measures import custom, exp_over_u, fbm_bernstein_measure, lebesgue, power_law
from kreinkernels.special import (
    BernsteinFunction,
    bernstein_eval,
    gamma,
    generalized_gamma,
    laplace_moment,
    rgamma,
    v_h,
)


# -- gamma -----------------------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 21))
def test_gamma_integers_are_factorials(n):
    assert gamma(n) == math.factorial(n - 1)


def test_gamma_half_against_quadrature():
    # u = v**2 removes the endpoint singularity of the oracle integrand
    ref = mp.quad(lambda v: 2 * mp.exp(-v * v), [0, 1, mp.inf])
    assert gamma(0.5) == pytest.approx(float(ref), rel=1e-14)


def test_gamma_relative_error_on_probe_grid():
    xs = np.concatenate([np.linspace(1e-3, 1, 40), np.linspace(1.01, 50, 60)])
    worst = max(abs(gamma(x) / float(mp.gamma(x)) - 1) for x in xs)
    assert worst < 1e-12


@given(st.floats(min_value=1e-3, max_value=50.0))
def test_gamma_recurrence(x):
    assert gamma(x + 1) == pytest.approx(x * gamma(x), rel=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, float("nan")])
def test_gamma_rejects_nonpositive(x):
    with pytest.raises(DomainError):
        gamma(x)


def test_rgamma_at_pole():
    assert rgamma(0.0) == 0.0
    assert rgamma(3.0) == 0.5


# -- v_h ---------------------------------------------------------------------------


def test_v_h_values():
    assert v_h(0.5) == 1.0
    assert v_h(0.25) == pytest.approx(1.5957691216057308, rel=1e-12)
    # gamma(1/2) cos(3 pi/4) / (pi * (-1/2) * 3/4)
    assert v_h(0.75) == pytest.approx(float(mp.gamma(0.5) * mp.cos(0.75 * mp.pi) / (mp.pi * -0.5 * 0.75)), rel=1e-12)


@pytest.mark.parametrize("d", [1e-6, -1e-6, 1e-5, -3e-5, 2e-4])
def test_v_h_continuous_at_half(d):
    with mp.workdps(40):
        H = mp.mpf(0.5 + d)
        exact = mp.gamma(2 - 2 * H) * mp.cos(H * mp.pi) / (mp.pi * (1 - 2 * H) * H)
    assert v_h(0.5 + d) == pytest.approx(float(exact), rel=1e-12)
    if abs(d) <= 1e-6:
        assert abs(v_h(0.5 + d) - 1) < 1e-4


@pytest.mark.parametrize("H", [0.0, 1.0, -0.1])
def test_v_h_domain(H):
    with pytest.raises(DomainError):
        v_h(H)


# -- generalized gamma ---------------------------------------------------------------


def test_generalized_gamma_examples():
    assert generalized_gamma(2, 1, lebesgue()) == pytest.approx(1.0, rel=1e-12)
    assert generalized_gamma(2, 1, exp_over_u()) == pytest.approx(0.5, rel=1e-12)
    with pytest.raises(NonIntegrable):
        generalized_gamma(1, 0, lebesgue())


@pytest.mark.parametrize("z", [0.5, 1.0, 2.5])
@pytest.mark.parametrize("mu", [0.5, 1.0, 3.0])
def test_generalized_gamma_lebesgue_closed_form_by_quadrature(z, mu):
    quad = generalized_gamma(z, mu, lebesgue(), 1e-10, method="quad")
    assert quad == pytest.approx(gamma(z) * mu**-z, rel=1e-9)
    # recurrence transported through the closed form
    nxt = generalized_gamma(z + 1, mu, lebesgue(), 1e-10, method="quad")
    assert nxt == pytest.approx(z * quad / mu, rel=1e-9)


@pytest.mark.parametrize("z", [1.5, 2.0, 4.0])
@pytest.mark.parametrize("mu", [0.0, 0.7, 2.0])
def test_generalized_gamma_exp_over_u_quad_matches_closed(z, mu):
    quad = generalized_gamma(z, mu, exp_over_u(), 1e-10, method="quad")
    ref = mp.quad(lambda v: 2 * v ** (2 * z - 3) * mp.exp(-(1 + mu) * v * v), [0, 1, mp.inf])
    assert quad == pytest.approx(float(ref), rel=1e-9)
    assert generalized_gamma(z, mu, exp_over_u()) == pytest.approx(float(ref), rel=1e-12)


def test_generalized_gamma_custom_measure():
    m = custom(lambda u: np.exp(-u) / np.sqrt(u), sing0=-0.5, decay="exp")
    ref = mp.quad(lambda u: u**2 * mp.exp(-3 * u) / mp.sqrt(u), [0, 1, mp.inf])
    assert generalized_gamma(3, 2, m) == pytest.approx(float(ref), rel=1e-9)


def test_laplace_moment_shift():
    m = fbm_bernstein_measure(0.3)
    assert laplace_moment(2, 1.5, m) == generalized_gamma(3, 1.5, m)


# -- Bernstein functions ---------------------------------------------------------------


def test_bernstein_eval_examples():
    assert bernstein_eval(BernsteinFunction(exp_over_u()), 1.0) == pytest.approx(math.log(2), rel=1e-10)
    assert bernstein_eval(BernsteinFunction(fbm_bernstein_measure(0.25)), 4.0) == pytest.approx(2.0, rel=1e-10)
    assert bernstein_eval(BernsteinFunction(exp_over_u()), 0.0) == 0.0


def test_bernstein_function_rejects_lebesgue():
    with pytest.raises(DomainError):
        BernsteinFunction(lebesgue())


@pytest.mark.parametrize("H", [0.1, 0.3, 0.45])
def test_bernstein_closed_form_agrees_with_quadrature(H):
    phi = BernsteinFunction(fbm_bernstein_measure(H))
    for x in (0.1, 1.0, 7.0):
        assert bernstein_eval(phi, x) == pytest.approx(x ** (2 * H), rel=1e-9)
        assert phi(x) == pytest.approx(x ** (2 * H), rel=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([exp_over_u(), fbm_bernstein_measure(0.2), power_law(0.3, -1.7)]))
def test_bernstein_monotone_and_concave(measure):
    phi = BernsteinFunction(measure)
    xs = np.linspace(0.0, 6.0, 13)
    vals = np.array([bernstein_eval(phi, x) for x in xs])
    assert np.all(np.diff(vals) >= -1e-12)
    assert np.all(np.diff(vals, 2) <= 1e-6)
