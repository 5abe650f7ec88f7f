import json
import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kreinkernels.decompositions import fbm_decomposition_b
from kreinkernels.errors import DivergentPoint, DivergentSeries, DomainError
from kreinkernels.kernels import abs_generator, krein
from kreinkernels.measures import exp_over_u, fbm_bernstein_measure
from kreinkernels.series import TruncationPolicy
from kreinkernels.special import generalized_gamma
from kreinkernels.transforms import (
    TransformContext,
    fbm_bound_constant,
    psi_apply,
    psi_bound,
    psi_terms,
    results_to_json,
)

LOG_CTX = TransformContext(abs_generator(), exp_over_u(), 1.0)


def brute_force_log(mu, x, n_max):
    # exp(-u)/u moments: int u**n exp(-mu u) exp(-u)/u du = Gamma(n) / (1 + mu)**n
    with mp.workdps(30):
        return float(mp.fsum(mp.gamma(n) / (1 + mp.mpf(mu)) ** n * mp.mpf(x) ** n / mp.factorial(n) for n in range(1, n_max + 1)))


def test_psi_zero():
    res = psi_apply(LOG_CTX, {0.5: 0.0, 2.0: 0.0})
    assert all(r.value == 0.0 for r in res.values())


def test_psi_single_term():
    res = psi_apply(LOG_CTX, {1.5: 0.4}, TruncationPolicy.fixed(1))[1.5]
    assert res.value == pytest.approx(generalized_gamma(2, LOG_CTX.cutoff(1.5), exp_over_u()) * 0.4, rel=1e-14)


def test_psi_matches_brute_force():
    f = 0.1 * krein(abs_generator())(1.0, 0.5)
    res = psi_apply(LOG_CTX, {1.0: f}, TruncationPolicy(rel_tol=1e-14))[1.0]
    assert res.value == pytest.approx(brute_force_log(LOG_CTX.cutoff(1.0), f, 200), abs=1e-10)
    # for phi = log1p the sum is log(1 + mu) - log(1 + mu - f)
    assert res.value == pytest.approx(math.log(3) - math.log(3 - f), abs=1e-12)


def test_psi_divergent_point_does_not_stop_others():
    res = psi_apply(TransformContext(abs_generator(), fbm_bernstein_measure(0.25), 1.0), {0.5: 0.3, 1.0: 9.0})
    assert isinstance(res[1.0], DivergentPoint)
    assert res[0.5].converged
    body = json.loads(results_to_json(res))
    assert body["1.0"]["error"]["kind"] == "DivergentPoint"
    assert "value" in body["0.5"]


def test_psi_bound_examples():
    assert psi_bound(LOG_CTX, 0.0).value == 0.0
    res = psi_bound(LOG_CTX, 0.5, TruncationPolicy(rel_tol=1e-14))
    assert res.value == pytest.approx(brute_force_log(2.0, 0.25, 500), abs=1e-10)
    with pytest.raises(DivergentSeries):
        psi_bound(TransformContext(abs_generator(), fbm_bernstein_measure(0.25), 1.0), 100.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 1.3), st.floats(0.0, 1.3))
def test_psi_bound_monotone_in_norm(a, b):
    lo, hi = sorted((a, b))
    assert psi_bound(LOG_CTX, lo).value <= psi_bound(LOG_CTX, hi).value + 1e-15


def test_psi_terms_match_fbm_decomposition_terms():
    # f(t) = K_H(t, t0) under the Bernstein context of x**(2H)
    H, t0 = 0.25, 0.7
    ctx = TransformContext(abs_generator(), fbm_bernstein_measure(H), t0)
    for t in (0.4, 1.3):
        k = abs(t) + abs(t0) - abs(t - t0)
        mine = psi_terms(ctx, t, k, 10)
        theirs = fbm_decomposition_b(H, t, t0, TruncationPolicy.fixed(10)).terms
        for a, b in zip(mine, theirs):
            assert a == pytest.approx(b, rel=1e-10)


def test_bound_constant_example():
    bc = fbm_bound_constant(0.25, 1.0)
    with mp.workdps(30):
        terms = [mp.gamma(n - 0.5) / (2**n * mp.factorial(n) * 2 ** (n - 0.5)) for n in range(2, 6)]
        ref = mp.fsum(mp.gamma(n - 0.5) / (2**n * mp.factorial(n) * 2 ** (n - 0.5)) for n in range(2, 502))
    assert [float(x) for x in terms[:3]] == pytest.approx([0.03917, 0.00490, 0.00077], rel=1e-2)
    assert bc.value == pytest.approx(float(ref), abs=1e-10)
    assert bc.value == pytest.approx(0.0450, abs=5e-5)
    assert bc.prefactor == pytest.approx(0.5 / math.sqrt(math.pi), rel=1e-14)
    d = bc.to_json()
    assert d["with_prefactor_squared"] == pytest.approx(bc.prefactor**2 * bc.value, rel=1e-15)


def test_bound_constant_domain():
    with pytest.raises(DomainError):
        fbm_bound_constant(0.25, 0.4)
    with pytest.raises(DomainError):
        fbm_bound_constant(0.5, 1.0)


@pytest.mark.parametrize("H", [0.05, 0.25, 0.45])
def test_bound_constant_decreasing_in_t0(H):
    vals = [fbm_bound_constant(H, t0).value for t0 in (0.6, 1.0, 2.0, 4.0)]
    assert all(math.isfinite(v) for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_context_validation():
    with pytest.raises(DomainError):
        TransformContext(abs_generator(), exp_over_u(), 0.0)
