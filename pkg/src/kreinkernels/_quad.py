"""Low-level adaptive quadrature on finite and semi-infinite intervals.

Panels use a 20-point Gauss-Legendre rule; the error of a panel is estimated
by comparing with the embedded-in-spirit 10-point rule on the same panel.
Summation order is fixed (sorted by left endpoint) so results are
deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from ._accel import wynn_epsilon

Integrand = Callable[[np.ndarray], np.ndarray]

N_HI = 20
N_LO = 10
MAX_PANELS = 20000


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@dataclass
class Piece:
    value: float
    error: float
    panels: int
    converged: bool


def _eval_panels(f: Integrand, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    xh, wh = gauss_legendre(N_HI)
    xl, wl = gauss_legendre(N_LO)
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    nodes = np.concatenate([(c[:, None] + h[:, None] * xh).ravel(), (c[:, None] + h[:, None] * xl).ravel()])
    vals = np.asarray(f(nodes), dtype=float)
    if vals.shape != nodes.shape:
        vals = np.broadcast_to(vals, nodes.shape)
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("integrand returned non-finite values")
    m = a.size * N_HI
    hi = h * (vals[:m].reshape(a.size, N_HI) @ wh)
    lo = h * (vals[m:].reshape(a.size, N_LO) @ wl)
    return hi, np.abs(hi - lo)


def adaptive(
    f: Integrand,
    a: float,
    b: float,
    rel_tol: float,
    abs_tol: float = 0.0,
    max_width: float | None = None,
    max_panels: int = MAX_PANELS,
) -> Piece:
    """Integrate ``f`` over ``[a, b]`` by bisecting the worst panels."""
    if b <= a:
        return Piece(0.0, 0.0, 0, True)
    n0 = 1 if max_width is None else max(1, math.ceil((b - a) / max_width))
    edges = np.linspace(a, b, n0 + 1)
    left, right = edges[:-1], edges[1:]
    vals, errs = _eval_panels(f, left, right)
    while True:
        total = math.fsum(vals)
        target = max(rel_tol * abs(total), abs_tol)
        err = float(np.sum(errs))
        if err <= target:
            return Piece(total, err, left.size, True)
        if left.size >= max_panels:
            return Piece(total, err, left.size, False)
        order = np.argsort(errs)[::-1]
        cum = np.cumsum(errs[order])
        # split the largest contributors until the remainder would meet half the target
        k = int(np.searchsorted(cum, err - 0.5 * target)) + 1
        k = max(1, min(k, order.size, max_panels - left.size))
        split = order[:k]
        keep = np.ones(left.size, dtype=bool)
        keep[split] = False
        mid = 0.5 * (left[split] + right[split])
        new_left = np.concatenate([left[split], mid])
        new_right = np.concatenate([mid, right[split]])
        nv, ne = _eval_panels(f, new_left, new_right)
        left = np.concatenate([left[keep], new_left])
        right = np.concatenate([right[keep], new_right])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])
        srt = np.argsort(left, kind="stable")
        left, right, vals, errs = left[srt], right[srt], vals[srt], errs[srt]


def substitution_power(exponent: float) -> int:
    """Smallest ``k`` making ``v**(k*(exponent+1)-1)`` at least C^2 at 0."""
    if exponent >= 2.0:
        return 1
    return max(1, math.ceil(3.0 / (exponent + 1.0)))


def _safe(g: Integrand, u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    ok = (u > 0.0) & np.isfinite(u)
    if np.any(ok):
        with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
            out[ok] = g(u[ok])
    return out


def head(
    g: Integrand,
    upper: float,
    exponent0: float,
    rel_tol: float,
    abs_tol: float = 0.0,
    max_width: float | None = None,
    max_panels: int = MAX_PANELS,
) -> Piece:
    """``int_0^upper g(u) du`` for ``g ~ u**exponent0`` as u -> 0 (exponent0 > -1)."""
    k = substitution_power(exponent0)

    def h(v):
        u = upper * v**k
        with np.errstate(under="ignore"):
            jac = upper * k * v ** (k - 1)
        vals = _safe(g, u) * jac
        # where u underflowed to 0 the transformed integrand is 0 (order >= 2)
        return np.where(u > 0.0, vals, 0.0)

    width = None if max_width is None else max_width / (upper * k)
    return adaptive(h, 0.0, 1.0, rel_tol, abs_tol, width, max_panels)


def tail(
    g: Integrand,
    start: float,
    exponent_inf: float | None,
    rel_tol: float,
    abs_tol: float = 0.0,
    max_panels: int = MAX_PANELS,
) -> Piece:
    """``int_start^inf g(u) du`` for non-oscillatory ``g``.

    ``exponent_inf`` is the algebraic decay ``g ~ u**b`` (b < -1); ``None``
    means faster than any power (exponential cutoff).  Uses
    ``u = start * x**(-m)`` so the transformed integrand is smooth at 0.
    """
    m = 1 if exponent_inf is None else substitution_power(-exponent_inf - 2.0)

    def h(x):
        with np.errstate(over="ignore", divide="ignore", under="ignore"):
            u = start * x ** (-m)
            jac = start * m * x ** (-m - 1)
            vals = _safe(g, u) * jac
        return np.where(np.isfinite(vals) & (x > 0.0), vals, 0.0)

    return adaptive(h, 0.0, 1.0, rel_tol, abs_tol, None, max_panels)


def oscillatory_tail(
    g: Integrand,
    start: float,
    frequency: float,
    rel_tol: float,
    abs_tol: float = 0.0,
    max_cycles: int = 4000,
) -> Piece:
    """``int_start^inf g(u) du`` for ``g`` oscillating about zero at ``frequency``.

    Half-period panels are integrated one by one and the partial sums are
    extrapolated with the epsilon algorithm.
    """
    half = math.pi / frequency
    chunk = 16
    sums: list[float] = []
    acc = 0.0
    prev_est = None
    panels = 0
    k = 0
    while k < max_cycles:
        left = start + half * np.arange(k, k + chunk)
        right = left + half
        vals, errs = _eval_panels(g, left, right)
        bad = errs > max(abs_tol, 1e-3 * rel_tol * max(abs(acc), np.max(np.abs(vals))))
        for i in np.flatnonzero(bad):
            p = adaptive(g, float(left[i]), float(right[i]), 1e-3 * rel_tol, 0.0)
            vals[i], panels = p.value, panels + p.panels
        panels += chunk
        for v in vals:
            acc += float(v)
            sums.append(acc)
        k += chunk
        est, est_err = wynn_epsilon(sums[-48:])
        if prev_est is not None:
            est_err = max(est_err, abs(est - prev_est))
            if est_err <= max(rel_tol * abs(est), abs_tol):
                return Piece(est, est_err, panels, True)
        prev_est = est
    return Piece(prev_est if prev_est is not None else acc, math.inf, panels, False)
