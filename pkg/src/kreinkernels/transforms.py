"""Power-series transforms ``psi(f)`` built from a Bernstein measure, and their bounds."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from ._gamma import gamma
from .decompositions import laplace_series
from .errors import DivergentPoint, DivergentSeries, DomainError
from .kernels import GeneratorFunction
from .measures import WeightedMeasure, admissible
from .series import SeriesResult, TruncationPolicy, sum_series

__all__ = [
    "TransformContext",
    "psi_apply",
    "psi_terms",
    "psi_bound",
    "BoundConstant",
    "fbm_bound_constant",
    "results_to_json",
]


@dataclass(frozen=True)
class TransformContext:
    """Generator ``r``, Bernstein measure and anchor ``t0`` defining ``psi``.

    ``psi(f)(t) = sum_n f(t)**n / n! * int u**n exp(-u (r(t) + r(t0))) dm(u)``.
    """

    r: GeneratorFunction
    phi_measure: WeightedMeasure
    t0: float

    def __post_init__(self):
        if self.t0 == 0.0 or not math.isfinite(self.t0):
            raise DomainError("t0 must be a nonzero real")
        adm = admissible(self.phi_measure, "bernstein")
        if not adm:
            raise DomainError(adm.diagnostic)

    def cutoff(self, t: float) -> float:
        return float(self.r(t)) + float(self.r(self.t0))


def psi_apply(
    ctx: TransformContext, f_values: dict, policy: TruncationPolicy = TruncationPolicy()
) -> dict:
    """Evaluate ``psi(f)`` at every ``t`` in ``f_values``.

    Returns ``{t: SeriesResult}``; a point outside the radius of convergence
    maps to a :class:`DivergentPoint` instance instead, and the remaining
    points are still evaluated.
    """
    out: dict = {}
    for t, ft in f_values.items():
        try:
            out[t] = laplace_series(float(ft), ctx.cutoff(float(t)), ctx.phi_measure, policy)
        except DivergentSeries as exc:
            out[t] = DivergentPoint(f"t={t}: {exc}")
    return out


def psi_terms(ctx: TransformContext, t: float, ft: float, n_terms: int) -> list[float]:
    """The first ``n_terms`` summands of ``psi(f)(t)`` (no truncation test)."""
    res = laplace_series(float(ft), ctx.cutoff(float(t)), ctx.phi_measure, TruncationPolicy.fixed(n_terms))
    return list(res.terms)


def psi_bound(ctx: TransformContext, norm_f: float, policy: TruncationPolicy = TruncationPolicy()) -> SeriesResult:
    """``sum_n ||f||**(2n) / n! * int u**n exp(-2 r(t0) u) dm(u)``."""
    if norm_f < 0:
        raise DomainError("norm_f must be >= 0")
    return laplace_series(norm_f * norm_f, 2.0 * float(ctx.r(ctx.t0)), ctx.phi_measure, policy)


@dataclass(frozen=True)
class BoundConstant:
    """Series ``S`` with the prefactor ``c = 2H/Gamma(1-2H)`` and both scalings."""

    series: SeriesResult
    prefactor: float

    @property
    def value(self) -> float:
        return self.series.value

    @property
    def with_prefactor(self) -> float:
        return self.prefactor * self.series.value

    @property
    def with_prefactor_squared(self) -> float:
        return self.prefactor**2 * self.series.value

    def to_json(self) -> dict:
        d = self.series.to_dict()
        d.update(
            prefactor=self.prefactor,
            with_prefactor=self.with_prefactor,
            with_prefactor_squared=self.with_prefactor_squared,
        )
        return d


def fbm_bound_constant(H: float, t0: float, policy: TruncationPolicy = TruncationPolicy()) -> BoundConstant:
    """``sum_{n>=2} Gamma(n-2H) / (2**n n! (2 t0)**(n-2H))`` for ``0 < H < 1/2``, ``t0 > 1/2``.

    Terms come from the recurrence ``a_{n+1}/a_n = (n-2H)/((n+1) 4 t0)``.
    """
    if not 0.0 < H < 0.5:
        raise DomainError("H must lie in (0, 1/2)")
    if not t0 > 0.5:
        raise DomainError(f"the bound series is only asserted for t0 > 1/2, got t0={t0}")
    e = 2.0 * H
    first = gamma(2.0 - e) / (8.0 * (2.0 * t0) ** (2.0 - e))
    q = 1.0 / (4.0 * t0)
    res = sum_series(first, lambda n: (n + 1 - e) / ((n + 2) * 4.0 * t0), policy, q, e)
    return BoundConstant(res, e / gamma(1.0 - e))


def results_to_json(results: dict) -> str:
    """Serialize a ``psi_apply`` map, keyed by the decimal string of ``t``."""
    body = {}
    for t, r in results.items():
        body[repr(float(t))] = r.to_dict() if isinstance(r, SeriesResult) else {"error": {"kind": r.kind, "detail": str(r)}}
    return json.dumps(body, sort_keys=True)
