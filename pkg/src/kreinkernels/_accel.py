"""Sequence acceleration: Wynn's epsilon algorithm and the Levin u-transform."""

from __future__ import annotations

import math
from typing import Sequence


def wynn_epsilon(partial_sums: Sequence[float]) -> tuple[float, float]:
    """Iterated Shanks transform of ``partial_sums``.

    Returns the highest even-column entry of the epsilon table and the
    difference to the previous even-column entry as an error estimate.
    """
    cur = [float(v) for v in partial_sums]
    n = len(cur)
    if n == 0:
        return 0.0, math.inf
    if n < 3:
        return cur[-1], abs(cur[-1] - cur[0]) if n > 1 else math.inf
    prev = [0.0] * (n + 1)
    estimates = [cur[-1]]
    col = 0
    while len(cur) > 1:
        nxt = []
        for i in range(len(cur) - 1):
            d = cur[i + 1] - cur[i]
            if d == 0.0:
                # exact stagnation: the sequence has converged at this level
                return cur[i + 1], 0.0
            nxt.append(prev[i + 1] + 1.0 / d)
        prev, cur = cur, nxt
        col += 1
        if col % 2 == 0:
            if not math.isfinite(cur[-1]):
                break
            estimates.append(cur[-1])
    if len(estimates) == 1:
        return estimates[0], abs(partial_sums[-1] - partial_sums[-2])
    return estimates[-1], abs(estimates[-1] - estimates[-2])


def levin_u(partial_sums: Sequence[float], terms: Sequence[float], order: int, beta: float = 1.0) -> float:
    """Levin u-transform of order ``order`` anchored at the first partial sum.

    ``terms[m]`` is the m-th summand (0-based) and ``partial_sums[m]`` the sum
    through it.  Needs ``order + 1`` entries.
    """
    if len(partial_sums) < order + 1:
        raise ValueError("not enough partial sums for the requested order")
    num = 0.0
    den = 0.0
    last = order + beta
    for j in range(order + 1):
        a = terms[j]
        if a == 0.0:
            return float(partial_sums[j])
        omega = (j + beta) * a
        c = (-1) ** j * math.comb(order, j) * ((j + beta) / last) ** (order - 1)
        num += c * partial_sums[j] / omega
        den += c / omega
    return num / den


def levin_estimate(partial_sums: Sequence[float], terms: Sequence[float], max_order: int = 8) -> tuple[float, float]:
    """Best Levin u estimate and ``|T_k - T_{k-1}|`` for the largest usable order.

    Orders are kept small: the alternating binomial sum loses roughly
    ``2**order`` ulps, and low orders already resolve hypergeometric tails.
    """
    k = min(max_order, len(partial_sums) - 1)
    if k < 2:
        s = float(partial_sums[-1]) if len(partial_sums) else 0.0
        return s, math.inf
    t_hi = levin_u(partial_sums, terms, k)
    t_lo = levin_u(partial_sums, terms, k - 1)
    return t_hi, abs(t_hi - t_lo)

