"""Weighted measures ``dm(u) = w(u) du`` on (0, inf) and quadrature against them.

Three families are supported:

* ``power_law``   ``w(u) = c * u**p``
* ``exp_over_u``  ``w(u) = exp(-u) / u``
* ``custom``      a user density with declared behaviour at 0 and infinity

Even measures on the whole line are represented by their restriction to
(0, inf); callers that need the full-line integral multiply by two (see
:func:`kreinkernels.decompositions.spectral_kernel`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Callable, Literal

import numpy as np

from . import _quad
from ._gamma import gamma
from .errors import DomainError, NonIntegrable, ToleranceNotReached, UnknownTail
from .series import DEFAULT_TOL

Role = Literal["spectral", "bernstein"]

_PROBE = np.logspace(-8, 8, 65)


@dataclass(frozen=True)
class WeightedMeasure:
    family: str
    c: float = 1.0
    p: float = 0.0
    density: Callable[[np.ndarray], np.ndarray] | None = None
    sing0_decl: float | None = None
    decay: float | str | None = None
    normalization: float = 1.0

    def __post_init__(self):
        if self.family not in ("power_law", "exp_over_u", "custom"):
            raise DomainError(f"unknown measure family {self.family!r}")
        if not self.normalization > 0:
            raise DomainError("normalization must be positive")
        if self.family == "power_law" and not self.c > 0:
            raise DomainError("power_law requires c > 0")
        if self.family == "custom":
            if self.density is None or self.sing0_decl is None:
                raise DomainError("custom measure needs a density and sing0")
            if isinstance(self.decay, str) and self.decay != "exp":
                raise DomainError("custom decay must be a power exponent or 'exp'")

    # -- behaviour -------------------------------------------------------
    @property
    def sing0(self) -> float:
        """Exponent ``a`` with ``w(u) ~ u**a`` as u -> 0."""
        if self.family == "power_law":
            return self.p
        if self.family == "exp_over_u":
            return -1.0
        return float(self.sing0_decl)

    @property
    def tail_exponent(self) -> float | None:
        """Algebraic decay exponent at infinity, ``None`` for exponential decay."""
        if self.family == "power_law":
            return self.p
        if self.family == "exp_over_u":
            return None
        if self.decay is None:
            raise UnknownTail("custom measure has no declared decay at infinity")
        return None if self.decay == "exp" else float(self.decay)

    @property
    def scale(self) -> float:
        return self.normalization * (self.c if self.family == "power_law" else 1.0)

    def weight(self, u):
        u = np.asarray(u, dtype=float)
        if self.family == "power_law":
            return self.scale * u**self.p
        if self.family == "exp_over_u":
            return self.normalization * np.exp(-u) / u
        return self.normalization * np.asarray(self.density(u), dtype=float)

    def scaled(self, factor: float) -> "WeightedMeasure":
        return replace(self, normalization=self.normalization * factor)

    def validate(self) -> None:
        """Spot-check nonnegativity and the declared exponent at 0."""
        w = self.weight(_PROBE)
        if np.any(w < 0) or np.any(np.isnan(w)):
            raise DomainError("density is negative or undefined on the probe grid")
        lo = np.array([1e-8, 1e-4])
        wl = self.weight(lo)
        if np.all(wl > 0):
            slope = float(np.diff(np.log(wl))[0] / np.diff(np.log(lo))[0])
            if abs(slope - self.sing0) > 0.1:
                raise DomainError(f"declared sing0 {self.sing0} but log-slope near 0 is {slope:.3f}")

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        if self.family == "power_law":
            d = {"family": "power_law", "c": self.c, "p": self.p}
        elif self.family == "exp_over_u":
            d = {"family": "exp_over_u"}
        else:
            raise DomainError("custom measures carry a callable and cannot be serialized")
        if self.normalization != 1.0:
            d["normalization"] = self.normalization
        return d

    @classmethod
    def from_json(cls, obj) -> "WeightedMeasure":
        if isinstance(obj, str):
            obj = json.loads(obj)
        fam = obj.get("family")
        norm = float(obj.get("normalization", 1.0))
        if fam == "power_law":
            return cls("power_law", c=float(obj.get("c", 1.0)), p=float(obj["p"]), normalization=norm)
        if fam == "exp_over_u":
            return cls("exp_over_u", normalization=norm)
        raise DomainError(f"cannot deserialize measure family {fam!r}")


def power_law(c: float = 1.0, p: float = 0.0) -> WeightedMeasure:
    return WeightedMeasure("power_law", c=c, p=p)


def exp_over_u() -> WeightedMeasure:
    return WeightedMeasure("exp_over_u")


def custom(density, sing0: float, decay: float | str | None = None) -> WeightedMeasure:
    return WeightedMeasure("custom", density=density, sing0_decl=sing0, decay=decay)


def lebesgue() -> WeightedMeasure:
    return power_law(1.0, 0.0)


def fbm_spectral_measure(H: float) -> WeightedMeasure:
    """``(1/pi) |u|**(1-2H) du`` restricted to (0, inf)."""
    _check_hurst(H)
    return power_law(1.0 / math.pi, 1.0 - 2.0 * H)


def fbm_bernstein_measure(H: float) -> WeightedMeasure:
    """``2H/Gamma(1-2H) u**(-1-2H) du``, whose Bernstein function is ``x**(2H)``."""
    if not 0.0 < H < 0.5:
        raise DomainError("the Bernstein form of x**(2H) needs 0 < H < 1/2")
    return power_law(2.0 * H / gamma(1.0 - 2.0 * H), -1.0 - 2.0 * H)


def stable_bernstein_measure(alpha: float) -> WeightedMeasure:
    """``alpha/Gamma(1-alpha) u**(-1-alpha) du``, whose Bernstein function is ``x**alpha``."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    return power_law(alpha / gamma(1.0 - alpha), -1.0 - alpha)


def _check_hurst(H: float) -> None:
    if not 0.0 < H < 1.0:
        raise DomainError(f"H must lie in (0, 1), got {H}")


# -- admissibility -----------------------------------------------------------


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    diagnostic: str

    def __bool__(self) -> bool:
        return self.ok


def admissible(measure: WeightedMeasure, role: Role) -> Admissibility:
    """Check the integrability condition a measure needs for ``role``.

    ``spectral``: ``int dm(u)/(1+u^2) < inf`` (tail ``p < 1``, and ``sing0 > -1``
    so that ``|chi_s|^2 dm`` is integrable at 0).
    ``bernstein``: ``int_1^inf dm < inf`` (tail ``p < -1``) and
    ``int_0^1 u dm < inf`` (``sing0 > -2``).
    """
    if role not in ("spectral", "bernstein"):
        raise DomainError(f"unknown role {role!r}")
    tail = measure.tail_exponent
    a0 = measure.sing0
    if role == "spectral":
        tail_ok = tail is None or tail < 1.0
        zero_ok = a0 > -1.0
        need = "tail exponent < 1 and exponent at 0 > -1"
    else:
        tail_ok = tail is None or tail < -1.0
        zero_ok = a0 > -2.0
        need = "tail exponent < -1 and exponent at 0 > -2"
    t_txt = "exponential" if tail is None else f"u^{tail:g}"
    diag = f"{role}: tail {t_txt}, origin u^{a0:g}; requires {need}"
    return Admissibility(tail_ok and zero_ok, diag)


# -- quadrature ----------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    panels: int
    converged: bool = True


def integrate(
    integrand: Callable[[np.ndarray], np.ndarray],
    measure: WeightedMeasure,
    tol: float = DEFAULT_TOL,
    oscillation_scale: float | None = None,
    *,
    order0: float = 0.0,
    order_inf: float | None = 0.0,
    tail_mean: Callable[[np.ndarray], np.ndarray] | None = None,
    strict: bool = False,
) -> QuadratureResult:
    """``int_0^inf integrand(u) w(u) du`` to relative tolerance ``tol``.

    ``integrand`` must accept numpy arrays.  ``order0`` is the order with which
    the integrand vanishes at 0 (``f ~ u**order0``) and ``order_inf`` its
    algebraic growth at infinity (``None`` when it decays faster than any
    power); together with the measure they fix the endpoint substitutions and
    decide integrability.

    With ``oscillation_scale`` set, panels never exceed half a period and the
    part of ``[1, inf)`` left after removing ``tail_mean`` (default: nothing
    removed) must oscillate about zero; it is summed period by period with
    epsilon extrapolation, while ``tail_mean`` is integrated separately.
    """
    if not 0.0 < tol <= 1e-2:
        raise DomainError("tol must lie in (0, 1e-2]")
    a0 = measure.sing0 + order0
    if a0 <= -1.0:
        raise NonIntegrable(f"integrand*w ~ u^{a0:g} at 0 is not integrable")
    tail_exp = measure.tail_exponent
    b = None if tail_exp is None or order_inf is None else tail_exp + order_inf
    if b is not None:
        if oscillation_scale is None or tail_mean is not None:
            if b >= -1.0:
                raise NonIntegrable(f"integrand*w ~ u^{b:g} at infinity is not integrable")
        elif b >= 0.0:
            raise NonIntegrable(f"oscillation amplitude ~ u^{b:g} does not decay")

    def g(u):
        return np.asarray(integrand(u), dtype=float) * measure.weight(u)

    width = None if oscillation_scale is None else math.pi / oscillation_scale

    def run(rt: float) -> list[_quad.Piece]:
        pieces = [_quad.head(g, 1.0, a0, rt, max_width=width)]
        if oscillation_scale is None:
            pieces.append(_quad.tail(g, 1.0, b, rt))
        else:
            if tail_mean is not None:

                def gm(u):
                    return np.asarray(tail_mean(u), dtype=float) * measure.weight(u)

                def osc(u):
                    return g(u) - gm(u)

                pieces.append(_quad.tail(gm, 1.0, b, rt))
            else:
                osc = g
            pieces.append(_quad.oscillatory_tail(osc, 1.0, oscillation_scale, rt))
        return pieces

    try:
        pieces = run(0.25 * tol)
        total = math.fsum(p.value for p in pieces)
        err = sum(p.error for p in pieces)
        if err > tol * abs(total) and total != 0.0:
            mass = sum(abs(p.value) for p in pieces)
            pieces = run(max(0.25 * tol * abs(total) / mass, 1e-15))
            total = math.fsum(p.value for p in pieces)
            err = sum(p.error for p in pieces)
    except FloatingPointError as exc:
        raise NonIntegrable(str(exc)) from exc
    converged = all(p.converged for p in pieces) and (err <= tol * abs(total) or err == 0.0)
    res = QuadratureResult(total, err, sum(p.panels for p in pieces), converged)
    if strict and not converged:
        raise ToleranceNotReached(f"estimate {total!r} with error {err:.3g}", res)
    return res
