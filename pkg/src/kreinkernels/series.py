"""Truncated summation with tail diagnostics and optional acceleration."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Literal

from ._accel import levin_estimate, wynn_epsilon
from .errors import DivergentSeries, DomainError

DEFAULT_TOL = 1e-10

Acceleration = Literal[None, "shanks", "levin"]


@dataclass(frozen=True)
class TruncationPolicy:
    """How far to sum a series and whether to extrapolate its tail.

    ``acceleration`` may be ``None``, ``"shanks"`` (Wynn epsilon) or
    ``"levin"`` (Levin u-transform; the one that handles the diagonal
    ``n**(-1-H)`` decay).
    """

    rel_tol: float = DEFAULT_TOL
    n_max: int = 500
    acceleration: Acceleration = None

    def __post_init__(self):
        if self.n_max < 1:
            raise DomainError("n_max must be >= 1")
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if self.acceleration not in (None, "shanks", "levin"):
            raise DomainError(f"unknown acceleration {self.acceleration!r}")

    @classmethod
    def fixed(cls, n_terms: int) -> "TruncationPolicy":
        """Sum exactly ``n_terms`` terms (tolerance too small to stop earlier)."""
        return cls(rel_tol=1e-300, n_max=n_terms)


@dataclass
class SeriesResult:
    value: float
    n_terms: int
    tail_estimate: float
    integral_part: float = 0.0
    converged: bool = True
    terms: tuple = field(default=(), repr=False)
    accelerated: str | None = None

    @property
    def series_part(self) -> float:
        return self.value - self.integral_part

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("terms")
        return d


def tail_bound(last_term: float, n: int, ratio_limit: float, decay: float | None) -> float:
    """Estimate ``sum_{m>n} |a_m|`` from the last summed term.

    Geometric bound ``|a_n| q/(1-q)`` when the ratios stay below ``q < 1``;
    integral comparison ``|a_n| n/decay`` when terms fall like ``m**(-1-decay)``.
    The smaller applicable estimate is returned.
    """
    a = abs(last_term)
    if a == 0.0:
        return 0.0
    candidates = []
    if ratio_limit < 1.0:
        candidates.append(a * ratio_limit / (1.0 - ratio_limit))
    if decay is not None and decay > 0:
        candidates.append(a * n / decay)
    return min(candidates) if candidates else math.inf


def sum_series(
    first: float,
    ratio: Callable[[int], float],
    policy: TruncationPolicy,
    ratio_limit: float,
    decay: float | None = None,
    integral_part: float = 0.0,
) -> SeriesResult:
    """Sum ``a_1 + a_2 + ...`` with ``a_{n+1} = a_n * ratio(n)``.

    ``ratio_limit`` bounds ``|ratio(n)|`` for all n; ``decay`` is the exponent
    in ``|a_n| ~ n**(-1-decay)`` used when ``ratio_limit == 1``.
    """
    if ratio_limit > 1.0 or (ratio_limit == 1.0 and not (decay and decay > 0)):
        raise DivergentSeries(f"ratio test fails (limit ratio {ratio_limit:.6g})")
    terms = [first]
    partial = [first]
    s = first
    n = 1
    last_levin = None
    if first == 0.0:
        return SeriesResult(integral_part, 1, 0.0, integral_part, True, tuple(terms))
    while True:
        value = integral_part + s
        tail = tail_bound(terms[-1], n, ratio_limit, decay)
        if tail <= policy.rel_tol * max(1.0, abs(value)):
            return SeriesResult(value, n, tail, integral_part, True, tuple(terms))
        if policy.acceleration == "levin" and n >= 4 and n % 2 == 0:
            est, err = levin_estimate(partial, terms, max_order=min(10, n - 1))
            if last_levin is not None:
                err = max(err, abs(est - last_levin))
                if err <= policy.rel_tol * max(1.0, abs(integral_part + est)):
                    return SeriesResult(integral_part + est, n, err, integral_part, True, tuple(terms), "levin")
            last_levin = est
        if n >= policy.n_max:
            break
        a = terms[-1] * ratio(n)
        n += 1
        terms.append(a)
        s += a
        partial.append(s)
    value = integral_part + s
    tail = tail_bound(terms[-1], n, ratio_limit, decay)
    if policy.acceleration == "shanks":
        est, err = wynn_epsilon(partial[-40:])
        ok = err <= policy.rel_tol * max(1.0, abs(integral_part + est))
        return SeriesResult(integral_part + est, n, err, integral_part, ok, tuple(terms), "shanks")
    if policy.acceleration == "levin":
        est, err = levin_estimate(partial, terms, max_order=min(10, n - 1))
        ok = err <= policy.rel_tol * max(1.0, abs(integral_part + est))
        return SeriesResult(integral_part + est, n, err, integral_part, ok, tuple(terms), "levin")
    return SeriesResult(value, n, tail, integral_part, False, tuple(terms))


def sum_terms(
    terms_in,
    policy: TruncationPolicy,
    ratio_limit: float,
    decay: float | None = None,
    integral_part: float = 0.0,
) -> SeriesResult:
    """Like :func:`sum_series` but for an iterator of explicitly computed terms."""
    terms: list[float] = []
    partial: list[float] = []
    s = 0.0
    n = 0
    for a in terms_in:
        n += 1
        terms.append(a)
        s += a
        partial.append(s)
        value = integral_part + s
        tail = tail_bound(a, n, ratio_limit, decay)
        if tail <= policy.rel_tol * max(1.0, abs(value)):
            return SeriesResult(value, n, tail, integral_part, True, tuple(terms))
        if n >= policy.n_max:
            break
    value = integral_part + s
    tail = tail_bound(terms[-1], n, ratio_limit, decay) if terms else 0.0
    if policy.acceleration == "shanks" and n >= 3:
        est, err = wynn_epsilon(partial[-40:])
        ok = err <= policy.rel_tol * max(1.0, abs(integral_part + est))
        return SeriesResult(integral_part + est, n, err, integral_part, ok, tuple(terms), "shanks")
    if policy.acceleration == "levin" and n >= 3:
        est, err = levin_estimate(partial, terms, max_order=min(10, n - 1))
        ok = err <= policy.rel_tol * max(1.0, abs(integral_part + est))
        return SeriesResult(integral_part + est, n, err, integral_part, ok, tuple(terms), "levin")
    return SeriesResult(value, n, tail, integral_part, tail <= policy.rel_tol * max(1.0, abs(value)), tuple(terms))
