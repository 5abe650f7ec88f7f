"""Acceptance criteria AC-1 to AC-10, each at its stated tolerance."""

import math
import time

import mpmath as mp
import numpy as np

from kreinkernels.decompositions import (
    bifbm_decomposition,
    fbm_decomposition_a,
    fbm_decomposition_b,
    spectral_kernel,
)
from kreinkernels.errors import DomainError
from kreinkernels.kernels import (
    abs_generator,
    bernstein_composite,
    bernstein_generator,
    bifbm,
    eval_closed,
    fbm,
    gram,
    krein,
    log_generator,
    log_kernel,
    power_generator,
    psd_certificate,
)
from kreinkernels.measures import exp_over_u, fbm_bernstein_measure, fbm_spectral_measure, integrate, lebesgue, power_law
from kreinkernels.rkhs import atom, atom_gram_check, from_function, induced_function, node_layout, rkhs_norm
from kreinkernels.rkhs import sobolev_density, sobolev_primitive
from kreinkernels.sampling import empirical_covariance, sample_paths
from kreinkernels.series import TruncationPolicy
from kreinkernels.special import BernsteinFunction, bernstein_eval, gamma, v_h
from kreinkernels.transforms import TransformContext, fbm_bound_constant, psi_apply

GRID = [0.25, 0.5, 1.0, 2.0]
OFF_TOL = 1e-8
DIAG_TOL_ACCEL = 1e-6
OFF_POLICY = TruncationPolicy()
DIAG_POLICY = TruncationPolicy(rel_tol=1e-8, acceleration="levin")


def _pairs(grid):
    return [(t, s) for i, t in enumerate(grid) for s in grid[: i + 1]]


def _worst(fn, target):
    off = diag = 0.0
    for t, s in _pairs(GRID):
        policy = DIAG_POLICY if t == s else OFF_POLICY
        closed = target(t, s)
        dev = abs(fn(t, s, policy).value - closed) / max(1.0, abs(closed))
        if t == s:
            diag = max(diag, dev)
        else:
            off = max(off, dev)
    return off, diag


def test_ac1_gaussian_schoenberg_form(acceptance):
    start = time.perf_counter()
    off = diag = 0.0
    for H in (0.1, 0.3, 0.5, 0.7, 0.9):
        c = gamma(1 - H) / (2 * H)
        o, d = _worst(lambda t, s, p: fbm_decomposition_a(H, t, s, p), lambda t, s: c * eval_closed(fbm(H), t, s))
        off, diag = max(off, o), max(diag, d)
    elapsed = time.perf_counter() - start
    ok = off <= OFF_TOL and diag <= DIAG_TOL_ACCEL and elapsed <= 10
    assert acceptance("AC-1", ok, f"off-diagonal {off:.2e}, diagonal (Levin) {diag:.2e}, {elapsed:.2f}s")


def test_ac2_bernstein_series_forms(acceptance):
    start = time.perf_counter()
    off = diag = 0.0
    for H in (0.1, 0.25, 0.4):
        o, d = _worst(lambda t, s, p: fbm_decomposition_b(H, t, s, p), lambda t, s: eval_closed(fbm(H), t, s))
        off, diag = max(off, o), max(diag, d)
    zero_series = True
    for H in (0.3, 0.5, 0.7):
        for alpha in (0.25, 0.5, 0.75, 1.0):
            spec = bifbm(H, alpha)
            o, d = _worst(lambda t, s, p: bifbm_decomposition(H, alpha, t, s, p), lambda t, s: eval_closed(spec, t, s))
            off, diag = max(off, o), max(diag, d)
            if alpha == 1.0:
                for t, s in _pairs(GRID):
                    res = bifbm_decomposition(H, 1.0, t, s)
                    zero_series &= all(x == 0.0 for x in res.terms[1:])
                    zero_series &= abs(res.value - eval_closed(fbm(H), t, s)) <= OFF_TOL * max(1, res.value)
    elapsed = time.perf_counter() - start
    ok = off <= OFF_TOL and diag <= DIAG_TOL_ACCEL and zero_series and elapsed <= 20
    detail = f"off-diagonal {off:.2e}, diagonal (Levin) {diag:.2e}, alpha=1 series part zero: {zero_series}, {elapsed:.2f}s"
    assert acceptance("AC-2", ok, detail)


def test_ac3_spectral_normalisation(acceptance):
    worst_spread = worst_vs_vh = 0.0
    constants = {}
    for H in (0.25, 0.5, 0.75):
        m = fbm_spectral_measure(H)
        ratios = [
            spectral_kernel(m, t, s, 1e-12) / eval_closed(fbm(H), t, s) for t, s in _pairs(GRID)
        ]
        c = float(np.mean(ratios))
        constants[H] = c
        worst_spread = max(worst_spread, max(abs(r / c - 1) for r in ratios))
        worst_vs_vh = max(worst_vs_vh, abs(c / v_h(H) - 1))
    ok = worst_spread <= 1e-6 and worst_vs_vh <= 1e-6
    shown = ", ".join(f"C({H})={c:.10f}" for H, c in constants.items())
    assert acceptance("AC-3", ok, f"C_H = V_H; single-constant spread {worst_spread:.1e}, |C/V_H-1| {worst_vs_vh:.1e}; {shown}")


def test_ac4_quadrature_identities(acceptance):
    errs = []
    res = integrate(lambda u: 2 * np.sin(u / 2) ** 2 / (u * u), lebesgue(), 1e-10,
                    oscillation_scale=1.0, order_inf=-2, tail_mean=lambda u: 1 / (u * u))
    errs.append(abs(res.value - math.pi / 2))
    for H in (0.2, 0.5, 0.8):
        res = integrate(lambda u: -np.expm1(-u * u), power_law(1.0, -1 - 2 * H), 1e-10, order0=2)
        errs.append(abs(res.value - gamma(1 - H) / (2 * H)))
    phi = BernsteinFunction(exp_over_u())
    for x in (0.5, 1.0, 5.0):
        errs.append(abs(bernstein_eval(phi, x, 1e-10) - math.log1p(x)))
    worst = max(errs)
    assert acceptance("AC-4", worst <= 1e-8, f"max error {worst:.2e} over {len(errs)} identities")


def _random_spec(rng):
    kind = rng.integers(9)
    H = rng.uniform(0.02, 0.98)
    if kind == 0:
        return fbm(H)
    if kind == 1:
        return bifbm(H, rng.uniform(0.02, 1.0))
    if kind == 2:
        return krein(abs_generator())
    if kind == 3:
        return krein(power_generator(rng.uniform(0.05, 2.0), rng.uniform(0.1, 3.0)))
    if kind == 4:
        return krein(log_generator(rng.uniform(0.1, 3.0)))
    if kind == 5:
        return krein(bernstein_generator(power_law(1.0, rng.uniform(-1.95, -1.05))))
    if kind == 6:
        return bernstein_composite(abs_generator(), BernsteinFunction(exp_over_u()))
    if kind == 7:
        phi = BernsteinFunction(fbm_bernstein_measure(rng.uniform(0.02, 0.48)))
        return bernstein_composite(power_generator(rng.uniform(0.05, 2.0)), phi)
    return log_kernel()


def test_ac5_positivity(acceptance):
    rng = np.random.default_rng(20261015)
    start = time.perf_counter()
    failures = checked = 0
    worst = math.inf
    for _ in range(100):
        n = int(rng.integers(1, 13))
        grid = rng.uniform(-5, 5, n)
        grams = []
        for _ in range(9):
            g = gram(_random_spec(rng), grid).entries
            grams.append(g)
        for g in grams + [a + b for a, b in zip(grams, grams[1:])] + [a * b for a, b in zip(grams, grams[1:])]:
            cert = psd_certificate(g, 1e-10)
            checked += 1
            failures += not cert.passed
            worst = min(worst, cert.min_eigenvalue / max(1.0, cert.max_eigenvalue))
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed <= 30
    detail = f"{checked} certificates, {failures} failures, worst scaled min eigenvalue {worst:.1e}, {elapsed:.2f}s"
    assert acceptance("AC-5", ok, detail)


def test_ac6_reproducing_property(acceptance):
    grid = [0.5, 1.0, 2.0]
    leb = power_law(1 / (2 * math.pi), 0.0)
    residuals = [atom_gram_check(leb, grid, kernel=lambda t, s: 0.5 * (abs(t) + abs(s) - abs(t - s)))]
    norm_err = 0.0
    for H in (0.3, 0.7):
        m = fbm_spectral_measure(H)
        closed = lambda t, s, H=H: v_h(H) * eval_closed(fbm(H), t, s)  # noqa: E731
        residuals.append(atom_gram_check(m, grid, kernel=closed))
        layout = node_layout(m, frequency=4.0)
        for s in grid:
            norm_err = max(norm_err, abs(rkhs_norm(atom(layout, s)) ** 2 - closed(s, s)) / closed(s, s))
    worst = max(residuals)
    ok = worst <= 1e-6 and norm_err <= 1e-6
    assert acceptance("AC-6", ok, f"max Gram residual {worst:.1e}, max |norm^2 - K(s,s)| rel {norm_err:.1e}")


def test_ac7_sobolev_primitive(acceptance):
    layout = node_layout(lebesgue(), frequency=4.0)
    elements = [
        lambda u: np.exp(-((u - 2) ** 2)) - np.exp(-((u + 2) ** 2)),
        lambda u: 1j * (np.exp(-((u - 1) ** 2)) + np.exp(-((u + 1) ** 2))),
        lambda u: u * np.exp(-u * u / 2) + 1j * np.exp(-u * u) * (1 + u * u),
    ]
    route = fd = 0.0
    h = 1e-4
    for fn in elements:
        f = from_function(layout, fn)
        for t in (0.5, 1.0, 1.7):
            direct, primitive = sobolev_primitive(f, t)
            route = max(route, abs(direct - primitive) / max(1.0, abs(direct)))
            deriv = (induced_function(f, t + h) - induced_function(f, t - h)) / (2 * h)
            fd = max(fd, abs(deriv - sobolev_density(f, t)))
    ok = route <= 1e-6 and fd <= 1e-4
    assert acceptance("AC-7", ok, f"route agreement {route:.1e}, finite-difference derivative {fd:.1e}")


def test_ac8_sampling(acceptance):
    start = time.perf_counter()
    devs, recon, jitter = [], 0.0, 0.0
    for spec, grid in ((fbm(0.7), [0.5, 1.0, 1.5, 2.0]), (bifbm(0.5, 0.5), [0.5, 1.0, 1.5, 2.0])):
        e = sample_paths(spec, grid, 100_000, seed=2026)
        devs.append(empirical_covariance(e).max_standardized_deviation)
        recon = max(recon, e.reconstruction_error)
        jitter = max(jitter, e.jitter_used)
    elapsed = time.perf_counter() - start
    ok = max(devs) <= 5 and recon <= 1e-12 and jitter == 0.0 and elapsed <= 60
    detail = f"standardized deviations {devs[0]:.2f}, {devs[1]:.2f}; reconstruction {recon:.1e} (no jitter); {elapsed:.2f}s"
    assert acceptance("AC-8", ok, detail)


def test_ac9_transforms(acceptance):
    bc = fbm_bound_constant(0.25, 1.0, TruncationPolicy(rel_tol=1e-14))
    with mp.workdps(30):
        ref = mp.fsum(mp.gamma(n - 0.5) / (2**n * mp.factorial(n) * 2 ** (n - 0.5)) for n in range(2, 502))
    bound_err = abs(bc.value - float(ref))

    ctx = TransformContext(abs_generator(), exp_over_u(), 1.0)
    k = krein(abs_generator())
    probes = {t: 0.1 * k(t, 0.5) for t in (0.25, 0.5, 1.0, 2.0, 3.0)}
    res = psi_apply(ctx, probes, TruncationPolicy(rel_tol=1e-14))
    psi_err = 0.0
    with mp.workdps(30):
        for t, f in probes.items():
            mu = 1 + ctx.cutoff(t)
            brute = mp.fsum(mp.gamma(n) / mp.mpf(mu) ** n * mp.mpf(f) ** n / mp.factorial(n) for n in range(1, 201))
            psi_err = max(psi_err, abs(res[t].value - float(brute)))
    try:
        fbm_bound_constant(0.25, 0.4)
        rejected = False
    except DomainError:
        rejected = True
    ok = bound_err <= 1e-10 and psi_err <= 1e-10 and rejected
    detail = f"bound constant {bc.value:.12f} (err {bound_err:.1e}), psi max err {psi_err:.1e}, t0=0.4 rejected: {rejected}"
    assert acceptance("AC-9", ok, detail)


def test_ac10_leading_term_identity(acceptance):
    # The criterion as stated: term_1 == 2H (|t|+|s|-|t-s|) to 1e-12 relative.
    worst, worst_pair = 0.0, None
    for H in (0.1, 0.25, 0.4):
        for t, s in _pairs(GRID):
            term = fbm_decomposition_b(H, t, s, TruncationPolicy.fixed(1)).terms[0]
            target = 2 * H * (abs(t) + abs(s) - abs(t - s))
            dev = abs(term - target) / abs(target)
            if dev > worst:
                worst, worst_pair = dev, (H, t, s)
    ok = worst <= 1e-12
    detail = f"max relative deviation {worst:.3e} at (H, t, s) = {worst_pair}; see decisions ledger"
    assert acceptance("AC-10", ok, detail)
