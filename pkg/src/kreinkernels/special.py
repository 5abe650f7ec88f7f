"""Gamma, the measure-weighted Gamma, the fBm constant and Bernstein functions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._gamma import gamma, rgamma
from .errors import DomainError, NonIntegrable
from .measures import WeightedMeasure, admissible, integrate
from .series import DEFAULT_TOL

__all__ = [
    "gamma",
    "rgamma",
    "generalized_gamma",
    "laplace_moment",
    "v_h",
    "BernsteinFunction",
    "bernstein_eval",
]


def generalized_gamma(
    z: float, mu: float, measure: WeightedMeasure, tol: float = DEFAULT_TOL, method: str = "auto"
) -> float:
    """``int_0^inf u**(z-1) exp(-mu u) dm(u)``.

    ``method="auto"`` uses the closed form for power-law and ``exp(-u)/u``
    measures and quadrature otherwise; ``method="quad"`` always integrates.
    """
    if mu < 0:
        raise DomainError("mu must be >= 0")
    a0 = z - 1.0 + measure.sing0
    if a0 <= -1.0:
        raise NonIntegrable(f"u^(z-1) dm ~ u^{a0:g} at 0 is not integrable")
    tail = measure.tail_exponent
    if mu == 0.0:
        if tail is not None and z - 1.0 + tail >= -1.0:
            raise NonIntegrable("mu = 0 with an algebraic tail diverges at infinity")
    if method == "auto" and measure.family == "power_law":
        s = z + measure.p
        return measure.scale * gamma(s) * mu ** (-s)
    if method == "auto" and measure.family == "exp_over_u":
        s = z - 1.0
        return measure.normalization * gamma(s) * (1.0 + mu) ** (-s)
    if method not in ("auto", "quad"):
        raise DomainError(f"unknown method {method!r}")
    # exp(-mu u) makes the integrand decay faster than any power when mu > 0
    res = integrate(
        lambda u: u ** (z - 1.0) * np.exp(-mu * u),
        measure,
        tol,
        order0=z - 1.0,
        order_inf=None if mu > 0.0 else z - 1.0,
    )
    if not res.converged:
        raise NonIntegrable(f"quadrature did not converge (estimate {res.value!r})")
    return res.value


def laplace_moment(n: int, mu: float, measure: WeightedMeasure, tol: float = DEFAULT_TOL, method: str = "auto") -> float:
    """``int_0^inf u**n exp(-mu u) dm(u)``, i.e. ``generalized_gamma(n + 1, mu)``.

    This is the coefficient that multiplies ``K**n / n!`` when
    ``phi(x + y) - phi(y)`` is expanded in powers of ``x``.
    """
    return generalized_gamma(n + 1.0, mu, measure, tol, method)


def v_h(H: float) -> float:
    """``Gamma(2-2H) cos(H pi) / (pi (1-2H) H)``, equal to 1 at H = 1/2."""
    if not 0.0 < H < 1.0:
        raise DomainError(f"H must lie in (0, 1), got {H}")
    if H == 0.5:
        return 1.0
    d = 0.5 - H
    if abs(d) < 1e-4:
        # cos(H pi)/(1-2H) = sin(pi d)/(2d); series avoids the 0/0 quotient
        x = math.pi * d
        ratio = 0.5 * math.pi * (1.0 - x * x / 6.0 + x**4 / 120.0)
    else:
        ratio = math.cos(H * math.pi) / (1.0 - 2.0 * H)
    return gamma(2.0 - 2.0 * H) * ratio / (math.pi * H)


@dataclass(frozen=True)
class BernsteinFunction:
    """``phi(x) = int_0^inf (1 - exp(-u x)) dm(u)`` for a Bernstein-admissible measure."""

    measure: WeightedMeasure

    def __post_init__(self):
        adm = admissible(self.measure, "bernstein")
        if not adm:
            raise DomainError(adm.diagnostic)

    @property
    def has_closed_form(self) -> bool:
        m = self.measure
        return m.family == "exp_over_u" or (m.family == "power_law" and -2.0 < m.p < -1.0)

    def closed_form(self, x):
        """Exact value for the two known families."""
        m = self.measure
        x = np.asarray(x, dtype=float)
        if m.family == "exp_over_u":
            return m.normalization * np.log1p(x)
        if m.family == "power_law":
            beta = -1.0 - m.p
            return m.scale * gamma(1.0 - beta) / beta * x**beta
        raise DomainError("no closed form for a custom Bernstein measure")

    def __call__(self, x, tol: float = DEFAULT_TOL):
        if self.has_closed_form:
            out = self.closed_form(x)
            return float(out) if np.ndim(out) == 0 else out
        if np.ndim(x) == 0:
            return bernstein_eval(self, float(x), tol)
        return np.array([bernstein_eval(self, float(v), tol) for v in np.ravel(x)]).reshape(np.shape(x))


def bernstein_eval(phi: BernsteinFunction, x: float, tol: float = DEFAULT_TOL) -> float:
    """``phi(x)`` by quadrature of ``(1 - exp(-u x)) dm(u)``."""
    if x < 0:
        raise DomainError("Bernstein functions are evaluated at x >= 0")
    if x == 0:
        return 0.0
    res = integrate(lambda u: -np.expm1(-u * x), phi.measure, tol, order0=1.0)
    if not res.converged:
        raise NonIntegrable(f"quadrature did not converge (estimate {res.value!r})")
    return res.value
