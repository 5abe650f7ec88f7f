"""Integral and series representations of the kernels, with cross-validation.

Every series is generated term by term from its ratio recurrence, so no
Gamma function of a large argument is ever formed.  Each evaluator returns a
:class:`~kreinkernels.series.SeriesResult` whose ``integral_part`` holds the
quadrature contribution and whose ``terms`` hold the summed series terms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ._gamma import gamma
from .errors import DivergentSeries, DomainError, MethodMismatch, NonIntegrable
from .kernels import GeneratorFunction, KernelSpec, abs_generator, eval_closed, power_generator
from .measures import (
    WeightedMeasure,
    admissible,
    exp_over_u,
    fbm_bernstein_measure,
    fbm_spectral_measure,
    integrate,
    power_law,
    stable_bernstein_measure,
)
from .series import DEFAULT_TOL, SeriesResult, TruncationPolicy, sum_series, sum_terms
from .special import laplace_moment, v_h

__all__ = [
    "spectral_generator",
    "spectral_kernel",
    "fbm_decomposition_a",
    "fbm_decomposition_b",
    "bifbm_decomposition",
    "bernstein_decomposition",
    "laplace_series",
    "cross_validate",
    "CrossValidationReport",
    "METHODS",
]


def _quad_tol(rel_tol: float) -> float:
    return min(max(rel_tol, 1e-13), 1e-2)


def _zero() -> SeriesResult:
    return SeriesResult(0.0, 0, 0.0, 0.0, True, ())


# -- spectral integral -----------------------------------------------------------


def spectral_generator(measure: WeightedMeasure, a: float, tol: float = DEFAULT_TOL) -> float:
    """``r(a) = 2 int_0^inf (1 - cos(a u)) / u**2 dm(u)`` for the folded even measure."""
    adm = admissible(measure, "spectral")
    if not adm:
        raise NonIntegrable(adm.diagnostic)
    a = abs(float(a))
    if a == 0.0:
        return 0.0
    half = 0.5 * a

    def f(u):
        return 2.0 * np.sin(half * u) ** 2 / (u * u)

    res = integrate(
        f,
        measure,
        tol,
        oscillation_scale=a,
        order0=0.0,
        order_inf=-2.0,
        tail_mean=(lambda u: 1.0 / (u * u)) if measure.tail_exponent is not None else None,
        strict=True,
    )
    return 2.0 * res.value


def spectral_kernel(measure: WeightedMeasure, t: float, s: float, tol: float = DEFAULT_TOL) -> float:
    """``int_R (e^{itu}-1)/u * (e^{-isu}-1)/u dm(u)`` for an even measure given on (0, inf).

    Evaluated as ``r(t) + r(s) - r(t-s)`` with each ``r`` integrated at its
    own frequency, which keeps every quadrature panel within half a period
    of the single cosine it resolves.
    """
    if t == 0.0 or s == 0.0:
        admissible(measure, "spectral")
        return 0.0
    inner = 0.25 * tol
    rt = spectral_generator(measure, t, inner)
    rs = rt if abs(s) == abs(t) else spectral_generator(measure, s, inner)
    rd = spectral_generator(measure, t - s, inner)
    return rt + rs - rd


# -- Schoenberg representation, Gaussian form -------------------------------------


def fbm_decomposition_a(H: float, t: float, s: float, policy: TruncationPolicy = TruncationPolicy()) -> SeriesResult:
    """Integral plus series form of ``Gamma(1-H)/(2H) * K_H(t, s)``.

    ``integral_part = int_0^inf (1-exp(-u^2 t^2))(1-exp(-u^2 s^2)) u^(-1-2H) du``
    and the series has terms ``2^(n-1) Gamma(n-H)/n! (ts)^n/(t^2+s^2)^(n-H)``
    with the signed product ``ts``.
    """
    if not 0.0 < H < 1.0:
        raise DomainError("H must lie in (0, 1)")
    t, s = float(t), float(s)
    if t == 0.0 or s == 0.0:
        return _zero()
    t2, s2 = t * t, s * s
    res = integrate(
        lambda u: np.expm1(-u * u * t2) * np.expm1(-u * u * s2),
        power_law(1.0, -1.0 - 2.0 * H),
        _quad_tol(policy.rel_tol),
        order0=4.0,
    )
    if not res.converged:
        raise NonIntegrable(f"integral part did not converge (estimate {res.value!r})")
    x = t * s / (t2 + s2)
    first = gamma(1.0 - H) * t * s / (t2 + s2) ** (1.0 - H)
    return sum_series(
        first,
        lambda n: 2.0 * (n - H) / (n + 1) * x,
        policy,
        ratio_limit=min(1.0, 2.0 * abs(x)),
        decay=H,
        integral_part=res.value,
    )


# -- Bernstein composites ----------------------------------------------------------


def _bernstein_power_series(
    alpha: float, K: float, R: float, policy: TruncationPolicy, integral_part: float = 0.0
) -> SeriesResult:
    """``sum_n alpha/Gamma(1-alpha) K^n Gamma(n-alpha)/(n! R^(n-alpha))`` for ``phi(x) = x**alpha``.

    The n = 1 term is ``alpha K R^(alpha-1)``; for ``alpha = 1`` all later terms
    vanish because the ratio recurrence carries the factor ``(n - alpha)``.
    """
    first = alpha * K * R ** (alpha - 1.0)
    q = K / R
    return sum_series(
        first,
        lambda n: (n - alpha) / (n + 1) * q,
        policy,
        ratio_limit=min(1.0, q),
        decay=alpha,
        integral_part=integral_part,
    )


def fbm_decomposition_b(H: float, t: float, s: float, policy: TruncationPolicy = TruncationPolicy()) -> SeriesResult:
    """``K_H(t, s)`` as the Bernstein composite of ``x**(2H)`` with ``r(t) = |t|``.

    ``integral_part`` is ``2H/Gamma(1-2H) int (1-e^{-u|t|})(1-e^{-u|s|}) u^(-1-2H) du``;
    the series term of order n is
    ``2H/Gamma(1-2H) K^n Gamma(n-2H)/(n! (|t|+|s|)^(n-2H))`` with
    ``K = |t|+|s|-|t-s|``.  Its first term is ``2H K (|t|+|s|)^(2H-1)``.
    """
    if not 0.0 < H < 0.5:
        raise DomainError("this representation needs 0 < H < 1/2")
    t, s = float(t), float(s)
    if t == 0.0 or s == 0.0:
        return _zero()
    at, as_ = abs(t), abs(s)
    R = at + as_
    K = R - abs(t - s)
    m = fbm_bernstein_measure(H)
    res = integrate(
        lambda u: np.expm1(-u * at) * np.expm1(-u * as_),
        m,
        _quad_tol(policy.rel_tol),
        order0=2.0,
    )
    if not res.converged:
        raise NonIntegrable(f"integral part did not converge (estimate {res.value!r})")
    return _bernstein_power_series(2.0 * H, K, R, policy, integral_part=res.value)


def bifbm_decomposition(
    H: float, alpha: float, t: float, s: float, policy: TruncationPolicy = TruncationPolicy()
) -> SeriesResult:
    """``(|t|^2H + |s|^2H)^alpha - |t-s|^(2H alpha)`` as a series in ``K_H(t, s)``."""
    if not 0.0 < H < 1.0:
        raise DomainError("H must lie in (0, 1)")
    if not 0.0 < alpha <= 1.0:
        raise DomainError("alpha must lie in (0, 1]")
    t, s = float(t), float(s)
    if t == 0.0 or s == 0.0:
        return _zero()
    e = 2.0 * H
    rt, rs, rd = abs(t) ** e, abs(s) ** e, abs(t - s) ** e
    R = rt + rs
    K = R - rd
    return _bernstein_power_series(alpha, K, R, policy)


def bernstein_decomposition(
    r: GeneratorFunction,
    phi_measure: WeightedMeasure,
    t: float,
    s: float,
    policy: TruncationPolicy = TruncationPolicy(),
    with_integral: bool = True,
) -> SeriesResult:
    """Series in ``K_r(t, s)`` with Laplace-moment coefficients.

    The series ``sum_n K_r^n/n! int u^n exp(-u (r(t)+r(s))) dm(u)`` equals
    ``phi(r(t)+r(s)) - phi(r(t-s))``.  With ``with_integral`` (the default)
    ``int (1-e^{-u r(t)})(1-e^{-u r(s)}) dm(u)`` is added, and the total is the
    Krein kernel of ``phi o r``: ``phi(r(t)) + phi(r(s)) - phi(r(t-s))``.
    """
    adm = admissible(phi_measure, "bernstein")
    if not adm:
        raise DomainError(adm.diagnostic)
    t, s = float(t), float(s)
    rt, rs, rd = float(r(t)), float(r(s)), float(r(t - s))
    R = rt + rs
    K = R - rd
    tol = _quad_tol(policy.rel_tol)
    integral = 0.0
    if with_integral and rt > 0.0 and rs > 0.0:
        res = integrate(lambda u: np.expm1(-u * rt) * np.expm1(-u * rs), phi_measure, tol, order0=2.0)
        if not res.converged:
            raise NonIntegrable(f"integral part did not converge (estimate {res.value!r})")
        integral = res.value
    if K == 0.0:
        return SeriesResult(integral, 0, 0.0, integral, True, ())
    return laplace_series(K, R, phi_measure, policy, integral_part=integral)


def laplace_series(
    x: float,
    mu: float,
    measure: WeightedMeasure,
    policy: TruncationPolicy = TruncationPolicy(),
    integral_part: float = 0.0,
) -> SeriesResult:
    """``sum_{n>=1} x**n / n! * int u**n exp(-mu u) dm(u)``, which is ``phi(mu) - phi(mu - x)``.

    Power-law and ``exp(-u)/u`` measures use exact ratio recurrences; other
    measures compute every moment by quadrature.  Raises
    :class:`DivergentSeries` when ``|x|`` exceeds the radius of convergence.
    """
    if mu <= 0.0:
        raise NonIntegrable("the Laplace moments need a positive cutoff mu")
    tail = measure.tail_exponent
    decay = -1.0 - tail if tail is not None else 1.0
    if x == 0.0:
        return SeriesResult(integral_part, 0, 0.0, integral_part, True, ())
    if measure.family == "exp_over_u":
        y = x / (1.0 + mu)
        return sum_series(
            measure.normalization * y, lambda n: n / (n + 1) * y, policy, abs(y), None, integral_part
        )
    y = x / mu
    q = abs(y)
    if measure.family == "power_law":
        p = measure.p
        first = x * measure.scale * gamma(2.0 + p) * mu ** (-2.0 - p)
        return sum_series(first, lambda n: (n + 1 + p) / (n + 1) * y, policy, q, decay, integral_part)
    if q > 1.0:
        raise DivergentSeries(f"|x|/mu = {q:.6g} exceeds the radius of convergence")
    tol = _quad_tol(policy.rel_tol)

    def terms():
        coeff = 1.0
        for n in range(1, policy.n_max + 1):
            coeff *= x / n
            yield coeff * laplace_moment(n, mu, measure, tol)

    return sum_terms(terms(), policy, ratio_limit=q, decay=decay, integral_part=integral_part)


# -- cross-validation ------------------------------------------------------------------

METHODS = ("spectral", "schoenberg_a", "schoenberg_b", "bernstein", "bifbm_series")


@dataclass
class CrossValidationReport:
    method: str
    grid: list
    max_rel_dev: float
    argmax_pair: tuple | None
    diagonal_max_rel_dev: float
    non_converged_pairs: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "grid": list(self.grid),
            "max_rel_dev": self.max_rel_dev,
            "argmax_pair": None if self.argmax_pair is None else list(self.argmax_pair),
            "diagonal_max_rel_dev": self.diagonal_max_rel_dev,
            "non_converged_pairs": [list(p) for p in self.non_converged_pairs],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _evaluator(spec: KernelSpec, method: str, policy: TruncationPolicy):
    """Return ``f(t, s) -> (value, converged)`` for the requested representation of ``spec``."""
    v = spec.variant

    def mismatch():
        return MethodMismatch(f"method {method!r} does not apply to a {v} kernel")

    def series(fn):
        def run(t, s):
            res = fn(t, s)
            return res.value, res.converged

        return run

    if method == "spectral":
        if v == "fbm":
            m = fbm_spectral_measure(spec.H).scaled(1.0 / v_h(spec.H))
        elif v == "krein" and spec.r.spectral_measure is not None:
            m = spec.r.spectral_measure
        else:
            raise mismatch()
        tol = _quad_tol(policy.rel_tol)
        return lambda t, s: (spectral_kernel(m, t, s, tol), True), 1.0
    if method == "schoenberg_a":
        if v != "fbm":
            raise mismatch()
        H = spec.H
        return series(lambda t, s: fbm_decomposition_a(H, t, s, policy)), gamma(1.0 - H) / (2.0 * H)
    if method == "schoenberg_b":
        if v != "fbm" or not spec.H < 0.5:
            raise mismatch()
        return series(lambda t, s: fbm_decomposition_b(spec.H, t, s, policy)), 1.0
    if method == "bifbm_series":
        if v == "bifbm":
            return series(lambda t, s: bifbm_decomposition(spec.H, spec.alpha, t, s, policy)), 1.0
        if v == "fbm":
            return series(lambda t, s: bifbm_decomposition(spec.H, 1.0, t, s, policy)), 1.0
        raise mismatch()
    if method == "bernstein":
        absr = abs_generator()
        if v == "log":
            args, full = (absr, exp_over_u()), True
        elif v == "fbm" and spec.H < 0.5:
            args, full = (absr, fbm_bernstein_measure(spec.H)), True
        elif v == "krein" and spec.r.bernstein_measure is not None:
            args, full = (absr, spec.r.bernstein_measure), True
        elif v == "bernstein":
            args, full = (spec.r, spec.phi.measure), False
        elif v == "bifbm" and spec.alpha < 1.0:
            args, full = (power_generator(2.0 * spec.H), stable_bernstein_measure(spec.alpha)), False
        else:
            raise mismatch()
        return series(lambda t, s: bernstein_decomposition(*args, t, s, policy, with_integral=full)), 1.0
    raise DomainError(f"unknown method {method!r}; expected one of {METHODS}")


def cross_validate(
    spec: KernelSpec, method: str, grid, policy: TruncationPolicy = TruncationPolicy()
) -> CrossValidationReport:
    """Compare a representation against the closed form on ``grid x grid``.

    The deviation is ``|rep - factor * closed| / max(1, |factor * closed|)``
    where ``factor`` is ``Gamma(1-H)/(2H)`` for ``schoenberg_a`` and 1 otherwise.
    Pairs with ``t == s`` are reported separately.
    """
    g = [float(x) for x in np.asarray(grid, dtype=float).ravel()]
    evaluate, factor = _evaluator(spec, method, policy)
    off, diag, arg = 0.0, 0.0, None
    bad = []
    for i, t in enumerate(g):
        for s in g[: i + 1]:
            target = factor * eval_closed(spec, t, s)
            value, ok = evaluate(t, s)
            value *= spec.scale
            dev = abs(value - target) / max(1.0, abs(target))
            if not ok:
                bad.append((t, s))
            if t == s:
                diag = max(diag, dev)
            elif dev > off or arg is None:
                off, arg = max(off, dev), (t, s)
    return CrossValidationReport(method, g, off, arg, diag, bad)
